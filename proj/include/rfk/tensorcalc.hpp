#pragma once

// Chart-level tensor calculus in four real dimensions: finite-difference
// derivatives with one Richardson level, Levi-Civita curvature, exterior
// derivative of 2-forms and the Nijenhuis tensor of an almost-complex
// structure.

#include <array>
#include <cmath>
#include <functional>
#include <string_view>

#include "rfk/errors.hpp"

namespace rfk {

inline constexpr int kDim = 4;

using Vec4 = std::array<double, kDim>;
using Mat4 = std::array<std::array<double, kDim>, kDim>;
using Tensor3 = std::array<Mat4, kDim>;     // t[a][b][c]
using Tensor4 = std::array<Tensor3, kDim>;  // t[a][b][c][d]
using MultiIndex = std::array<int, kDim>;

enum class ChartId { generic, hitchin_zy, gh_theta_b_a };

std::string_view chart_name(ChartId id);

struct ChartPoint {
  Vec4 coords{};
  ChartId chart = ChartId::generic;
};

struct MetricSample {
  Mat4 g{};
  ChartPoint point;
};

struct TwoFormSample {
  Mat4 omega{};
  ChartPoint point;
};

struct ComplexStructureSample {
  Mat4 J{};  // J[row][col]: column c is the image of the c-th basis vector
  ChartPoint point;
};

struct CurvatureBundle {
  Tensor3 christoffel{};  // Gamma^k_{ij} stored as [k][i][j]
  Tensor4 riemann{};      // R^l_{ijk} stored as [l][i][j][k]
  Mat4 ricci{};
  double scalar = 0.0;
  double ricci_norm = 0.0;
  double riem_norm_sq = 0.0;
};

/// dω components in the order (012, 013, 023, 123), together with the
/// largest sum of absolute values of the three terms entering a component.
/// The latter is the natural scale against which cancellation is judged.
struct ThreeFormSample {
  std::array<double, 4> components{};
  double term_scale = 0.0;
};

struct NijenhuisSample {
  Tensor3 n{};  // N^k_{ij} stored as [k][i][j]
  double term_scale = 0.0;
};

using MetricField = std::function<MetricSample(const ChartPoint&)>;
using TwoFormField = std::function<TwoFormSample(const ChartPoint&)>;
using ComplexStructureField =
    std::function<ComplexStructureSample(const ChartPoint&)>;

// --- small dense linear algebra -------------------------------------------

Mat4 identity4();
Mat4 transpose(const Mat4& a);
Mat4 multiply(const Mat4& a, const Mat4& b);
double determinant(const Mat4& a);
/// Cofactor inverse. Throws degenerate-metric if the determinant vanishes.
Mat4 inverse(const Mat4& a);
/// Jacobi eigenvalues of a symmetric matrix, ascending.
Vec4 symmetric_eigenvalues(const Mat4& a);
double max_abs(const Mat4& a);
double max_abs_diff(const Mat4& a, const Mat4& b);

// --- finite differences -----------------------------------------------------

namespace detail {

inline double lincomb(double ca, double a, double cb, double b) {
  return ca * a + cb * b;
}

template <class T, std::size_t N>
std::array<T, N> lincomb(double ca, const std::array<T, N>& a, double cb,
                         const std::array<T, N>& b) {
  std::array<T, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = lincomb(ca, a[i], cb, b[i]);
  return r;
}

inline bool all_finite(double v) { return std::isfinite(v); }

template <class T, std::size_t N>
bool all_finite(const std::array<T, N>& a) {
  for (const auto& v : a)
    if (!all_finite(v)) return false;
  return true;
}

template <class F>
auto richardson_first(F&& f, const ChartPoint& p, int axis, double h) {
  auto central = [&](double step) {
    ChartPoint plus = p, minus = p;
    plus.coords[axis] += step;
    minus.coords[axis] -= step;
    return lincomb(0.5 / step, f(plus), -0.5 / step, f(minus));
  };
  const auto coarse = central(h);
  const auto fine = central(0.5 * h);
  return lincomb(4.0 / 3.0, fine, -1.0 / 3.0, coarse);
}

template <class F>
auto differentiate_rec(F&& field, const ChartPoint& p, MultiIndex mi,
                       const Vec4& step) -> decltype(field(p)) {
  for (int axis = 0; axis < kDim; ++axis) {
    if (mi[axis] > 0) {
      --mi[axis];
      auto inner = [&](const ChartPoint& q) {
        return differentiate_rec(field, q, mi, step);
      };
      return richardson_first(inner, p, axis, step[axis]);
    }
  }
  return field(p);
}

}  // namespace detail

/// Mixed partial derivative of a field valued in double or nested
/// std::array<double, ...>. Orders up to 2 per coordinate; higher orders are
/// nested first-derivative stencils, each a central difference at (h, h/2)
/// combined by one Richardson step (fourth-order accurate).
template <class F>
auto differentiate_field(F&& field, const ChartPoint& p,
                         const MultiIndex& multi_index, const Vec4& step)
    -> decltype(field(p)) {
  for (int axis = 0; axis < kDim; ++axis) {
    if (multi_index[axis] < 0 || multi_index[axis] > 2) {
      fail(ErrorCode::invalid_argument,
           "differentiate_field: order per coordinate must be in [0, 2]");
    }
    if (multi_index[axis] > 0 && !(step[axis] > 0)) {
      fail(ErrorCode::invalid_argument,
           "differentiate_field: step must be positive");
    }
  }
  auto result = detail::differentiate_rec(field, p, multi_index, step);
  if (!detail::all_finite(result)) {
    fail(ErrorCode::numeric_overflow, "differentiate_field: non-finite result");
  }
  return result;
}

template <class F>
auto differentiate_field(F&& field, const ChartPoint& p,
                         const MultiIndex& multi_index, double step)
    -> decltype(field(p)) {
  return differentiate_field(std::forward<F>(field), p, multi_index,
                             Vec4{step, step, step, step});
}

/// Default step: 1e-3 * max(1, |x_i|) per coordinate.
Vec4 default_steps(const ChartPoint& p);

// --- curvature ---------------------------------------------------------------

struct CurvatureOptions {
  double condition_limit = 1e12;
};

/// Throws degenerate-metric when g is not positive definite or the
/// condition number of D g D, D = diag(g)^{-1/2}, exceeds the limit.
void check_metric(const Mat4& g, double condition_limit = 1e12);

Tensor3 christoffel_at(const MetricField& metric, const ChartPoint& p,
                       const Vec4& step, const CurvatureOptions& opts = {});

CurvatureBundle curvature_at(const MetricField& metric, const ChartPoint& p,
                             const Vec4& step,
                             const CurvatureOptions& opts = {});

CurvatureBundle curvature_at(const MetricField& metric, const ChartPoint& p);

/// Curvature bundle of the constant rescaling λ·g evaluated from an already
/// computed bundle of g (Christoffel and Riemann^l_ijk are unchanged).
CurvatureBundle rescale_curvature(const CurvatureBundle& c, const Mat4& g,
                                  double lambda);

/// Invariant contractions of a curvature bundle with respect to g.
void fill_curvature_norms(CurvatureBundle& c, const Mat4& g);

// --- forms and complex structures --------------------------------------------

ThreeFormSample exterior_derivative(const TwoFormField& form,
                                    const ChartPoint& p, const Vec4& step);

NijenhuisSample nijenhuis_at(const ComplexStructureField& J,
                             const ChartPoint& p, const Vec4& step);

/// max |ω - g(J·,·)| / max|g|.
double compatibility_residual(const Mat4& g, const Mat4& J, const Mat4& omega);
/// max |g(J·,J·) - g| / max|g|.
double hermitian_residual(const Mat4& g, const Mat4& J);

}  // namespace rfk
