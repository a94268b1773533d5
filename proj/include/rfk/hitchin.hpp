#pragma once

// Hitchin's ALE hyperkähler metric on x y = prod(z + conj(a_i)) in the local
// chart (z, y), y != 0. The height b is defined implicitly by
// prod((b - b_i) + Δ_i) = |y|^2 with Δ_i = sqrt((b - b_i)^2 + |conj(z) + a_i|^2).
//
// Real-metric convention: g is the symmetric real part of the Hermitian form
//   h = γ dz ⊗ dz̄ + γ^{-1} (2dy/y + δ̄ dz) ⊗ (2dȳ/ȳ + δ dz̄),
// so dz dz̄ contributes dx^2 + dy^2, and the Kähler form is ω = g(J0·,·) =
// -Im h, i.e. half of i γ dz∧dz̄ + i γ^{-1}(...)∧(...).

#include <span>
#include <vector>

#include "rfk/numerics.hpp"
#include "rfk/singularities.hpp"
#include "rfk/tensorcalc.hpp"

namespace rfk {

struct HitchinPoint {
  cplx z{};
  cplx y{1.0, 0.0};
};

struct ImplicitSolution {
  double b = 0.0;
  /// |prod((b - b_i) + Δ_i) / |y|^2 - 1|.
  double residual = 0.0;
  std::vector<double> delta_list;
  int iterations = 0;
};

struct HitchinOptions {
  double y_floor = 1e-8;
  double solver_tol = 1e-13;
  int max_iterations = 400;
  /// Finite-difference step as a fraction of the local length scale.
  double step_fraction = 1e-3;
};

class HitchinMetric {
 public:
  /// Requires an ALE-mode configuration with pairwise distinct a_i.
  explicit HitchinMetric(CenterConfiguration config, HitchinOptions opts = {});

  const CenterConfiguration& config() const noexcept { return config_; }
  const HitchinOptions& options() const noexcept { return opts_; }

  /// Unique real root of the implicit height equation.
  ImplicitSolution solve_b(cplx z, double y_abs_sq) const;

  /// sum_i log((b - b_i) + Δ_i), evaluated without cancellation.
  double log_height_product(cplx z, double b) const;

  double gamma(cplx z, double b) const;
  cplx delta(cplx z, double b) const;

  MetricSample metric_at(const HitchinPoint& p) const;
  TwoFormSample kahler_form_at(const HitchinPoint& p) const;
  /// The standard chart complex structure (multiplication by i on z and y).
  ComplexStructureSample complex_structure_at(const HitchinPoint& p) const;

  /// Chart point lying over the base point (b, a): z = -conj(a) and
  /// |y|^2 = prod((b - b_i) + Δ_i), arg y = phase.
  HitchinPoint point_over(double b, cplx a, double phase = 0.0) const;

  /// Finite-difference steps: fraction · local_scale for z, fraction · |y|
  /// for y.
  Vec4 steps_at(const HitchinPoint& p) const;

  /// min_i |a - a_i|: distance from the base point to the nearest vertical
  /// line through a center, where the chart formulas degenerate.
  double local_scale(cplx a) const;

  MetricField metric_field() const;
  TwoFormField kahler_form_field() const;
  ComplexStructureField complex_structure_field() const;

  static HitchinPoint from_chart(const ChartPoint& p);
  static ChartPoint to_chart(const HitchinPoint& p);

 private:
  struct Frame {
    double gamma;
    cplx delta;
  };
  Frame frame(const HitchinPoint& p) const;
  void check_point(const HitchinPoint& p) const;

  CenterConfiguration config_;
  HitchinOptions opts_;
};

struct DecayResult {
  FitResult fit;
  bool flat = false;  // every sample below the noise floor; no fit attempted
  std::vector<double> ale_radii;
  std::vector<double> mean_riem_sq;
};

/// Asymptotic radius of the flat cone C^2/Z_k over base distance R:
/// ρ^2 = 2 k R.
double ale_radius_to_base(double ale_radius, int k);

/// Fits log mean |Rm|^2 against log ρ, ρ the asymptotic Euclidean radius,
/// averaging over `directions` base directions per radius. The metric counts
/// as flat when ρ^4 |Rm|^2, which is scale free, stays below noise_floor at
/// every radius; finite-difference roundoff sits near 1e-15 there.
DecayResult ale_curvature_decay(const HitchinMetric& metric,
                                std::span<const double> ale_radii,
                                int directions = 8,
                                double noise_floor = 1e-12);

}  // namespace rfk
