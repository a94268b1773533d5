#pragma once

// Quotient-singularity signatures, Z_n-symmetric monopole-center
// configurations, their defining polynomials, the cyclic group actions on the
// two charts and Kähler-class vectors.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rfk {

using cplx = std::complex<double>;

/// Signature (d, n, m) of a 1/(d n^2)(1, d n m - 1) singularity. n = 1 encodes
/// a plain A_{d-1} smoothing with trivial quotient (then m = 0).
class QuotientSignature {
 public:
  /// Validates: d > 0, n >= 1, 1 <= m < n with gcd(m, n) = 1 for n >= 2,
  /// m = 0 for n = 1. Throws invalid-signature otherwise.
  QuotientSignature(int d, int n, int m);

  int d() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  int center_count() const noexcept { return d_ * n_; }
  int group_order() const noexcept { return n_; }
  /// Primitive root of unity exp(2πi/n).
  cplx rho() const;

  friend bool operator==(const QuotientSignature&, const QuotientSignature&) = default;

 private:
  int d_ = 1, n_ = 1, m_ = 0;
};

struct Center {
  double b = 0.0;
  cplx a{};
};

enum class ModeKind { ale, alf, akl };

struct Mode {
  ModeKind kind = ModeKind::ale;
  int akl_j_max = 0;

  static Mode ale() { return {ModeKind::ale, 0}; }
  static Mode alf() { return {ModeKind::alf, 0}; }
  static Mode akl(int j_max);
  /// "ale", "alf" or "akl:J".
  static Mode parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const Mode&, const Mode&) = default;
};

struct CenterConfiguration {
  std::vector<Center> centers;
  QuotientSignature signature{1, 1, 0};
  Mode mode;
  /// Polygon data the centers were generated from; empty for explicit lists.
  std::vector<cplx> radii;
  std::vector<double> heights;

  int k() const { return static_cast<int>(centers.size()); }
  bool from_polygons() const { return !radii.empty(); }
  /// Largest |x_i| over the centers in R^3.
  double extent() const;
};

/// d regular n-gons: a_{i,j} = -conj(c_i) ρ^{-j}, b_{i,j} = b_i, ordered by i
/// then j (j = 1..n). Each c_i is replaced by the principal n-th root of
/// c_i^n. Throws singular-fiber on repeated c_i^n (or c_i = 0 when n >= 2).
CenterConfiguration make_polygon_config(const QuotientSignature& signature,
                                        const std::vector<cplx>& radii,
                                        const std::vector<double>& heights,
                                        Mode mode = Mode::ale());

/// Truncated infinite-topology family: polygons j = 1..J_max inscribed in
/// circles of radius j^2, heights b_j (default 0).
CenterConfiguration make_akl_config(int n, int m, int j_max,
                                    std::vector<double> heights = {});

/// Arbitrary centers. Requires d n == centers.size() and pairwise distinct
/// points. Z_n symmetry is not enforced (see symmetry_residual).
CenterConfiguration make_explicit_config(std::vector<Center> centers,
                                         const QuotientSignature& signature,
                                         Mode mode = Mode::ale());

/// Copy with every center displaced by `eps` along a seeded random unit
/// direction in R^3. The result is an explicit configuration.
CenterConfiguration perturbed(const CenterConfiguration& config, double eps,
                              std::uint64_t seed);

/// Largest distance from a rotated center (b, ρ^{-m} a) to its nearest
/// original center; 0 for n = 1.
double symmetry_residual(const CenterConfiguration& config);

/// Smallest distance between two centers in R^3.
double min_center_separation(const CenterConfiguration& config);

/// Smallest |a_i - a_j| over pairs of centers.
double min_horizontal_separation(const CenterConfiguration& config);

struct DeformationPolynomial {
  /// e_1..e_k of x y = z^k + e_1 z^{k-1} + ... + e_k.
  std::vector<cplx> coefficients;
  int degree() const { return static_cast<int>(coefficients.size()); }
  /// Roots z = -conj(a_i) of the z-polynomial for the chart fiber u = 0.
  std::vector<cplx> roots;
};

/// Expands prod_i (z + conj(a_i)); for polygon data this is prod_i(z^n - c_i^n).
DeformationPolynomial defining_polynomial(const CenterConfiguration& config);

struct GroupElement {
  int exponent = 0;
  int n = 1;
  int m = 0;

  static GroupElement generator(const QuotientSignature& s) {
    return {1 % s.n(), s.n(), s.m()};
  }
  GroupElement compose(const GroupElement& other) const;
  GroupElement power(int times) const;
  bool is_identity() const { return exponent == 0; }
  /// ρ^exponent.
  cplx value() const;
};

/// (z, y) -> (ρ^{m ℓ} z, ρ^{-ℓ} y).
std::pair<cplx, cplx> apply_action_hitchin(const GroupElement& g, cplx z,
                                           cplx y);

struct GHCoordinates {
  double theta = 0.0;
  double b = 0.0;
  cplx a{};
};

/// (θ, b, a) -> (θ + 2πℓ/n mod 2π, b, ρ^{-m ℓ} a).
GHCoordinates apply_action_gh(const GroupElement& g, const GHCoordinates& p);

struct KahlerClassVector {
  std::vector<double> entries;
};

/// Sort by b descending, then arg(a) ascending in [0, 2π).
std::vector<Center> canonical_order(std::vector<Center> centers);

/// Entries 8π (b_i - b_{i+1}) after canonical ordering.
KahlerClassVector kahler_class(const CenterConfiguration& config);

}  // namespace rfk
