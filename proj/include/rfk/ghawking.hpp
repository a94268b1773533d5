#pragma once

// Gibbons-Hawking metrics g = V^{-1}(dθ + α)^2 + V(db^2 + da1^2 + da2^2) over
// R^3 with coordinates x = (b, a), a = a1 + i a2, θ of period 2π.
// V = ½ Σ 1/|x - x_i| (ALE and truncated AKL), 1 + that for ALF.
//
// Sign convention: α = ½ Σ (1 - (b - b_i)/Δ_i) dφ_i, so dα = -*dV for the
// orientation db∧da1∧da2. With this sign the complex structure
// J(V^{1/2}∂θ) = V^{-1/2}∂b, J(∂a1) = ∂a2 has the closed Kähler form
// ω_K = (dθ + α)∧db + V da1∧da2.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rfk/numerics.hpp"
#include "rfk/singularities.hpp"
#include "rfk/tensorcalc.hpp"

namespace rfk {

struct BasePoint {
  double b = 0.0;
  cplx a{};
};

struct GHPoint {
  double theta = 0.0;
  double b = 0.0;
  cplx a{};
};

struct PotentialValue {
  double V = 0.0;
  std::array<double, 3> grad{};  // (∂b, ∂a1, ∂a2)
};

struct ConnectionValue {
  std::array<double, 3> alpha{};  // components along (db, da1, da2); db is 0
};

/// Where the Dirac strings of α sit: the downward rays {b < b_i, a = a_i} or
/// the upward ones.
enum class StringGauge { below, above };

struct GHOptions {
  StringGauge gauge = StringGauge::below;
  /// Replaces V by V^2 in the metric. A non-harmonic potential, used only as
  /// a negative control for the Ricci scan.
  bool square_potential = false;
  double step_fraction = 1e-3;
};

class GibbonsHawking {
 public:
  explicit GibbonsHawking(CenterConfiguration config, GHOptions opts = {});

  const CenterConfiguration& config() const noexcept { return config_; }
  const GHOptions& options() const noexcept { return opts_; }

  PotentialValue potential_at(const BasePoint& x) const;
  ConnectionValue connection_at(const BasePoint& x) const;
  /// *dV as the 2-form components (da1∧da2, da2∧db, db∧da1).
  std::array<double, 3> star_dV(const BasePoint& x) const;

  MetricSample metric_at(const GHPoint& p) const;
  ComplexStructureSample complex_structure_at(const GHPoint& p) const;
  TwoFormSample kahler_form_at(const GHPoint& p) const;

  /// h_θ = fraction, h_b = h_a = fraction · min_i |a - a_i|.
  Vec4 steps_at(const GHPoint& p) const;

  MetricField metric_field() const;
  TwoFormField kahler_form_field() const;
  ComplexStructureField complex_structure_field() const;

  /// Integral of ω_K over the circle-fibered segment from center i to
  /// center j. Throws path if another center lies on the segment.
  double cycle_period(int i, int j) const;

  /// Sup of |Φ^T g(φ(p)) Φ - g(p)| / max|g| over Halton samples in the
  /// shell 0.5 s <= |x| <= 3 s, s = max(1, extent), for φ = apply_action_gh.
  double quotient_invariance_residual(const GroupElement& gel, int sample_count,
                                      std::uint64_t seed = 0) const;

  static GHPoint from_chart(const ChartPoint& p);
  static ChartPoint to_chart(const GHPoint& p);

 private:
  double potential_value(const BasePoint& x) const;
  void check_base(const BasePoint& x) const;

  CenterConfiguration config_;
  GHOptions opts_;
};

struct VolumeGrowth {
  FitResult fit;  // log Vol against log ρ
  std::vector<double> coordinate_radii;
  std::vector<double> geodesic_radii;
  std::vector<double> volumes;
};

/// Log-spaced coordinate radii, s = max(1, extent): [1e4 s, 2e6 s] for
/// ALE/AKL (ρ ~ sqrt(R) there, and the constant offset of ρ(R) from the core
/// region must be small against ρ), [1e3 s, 2e4 s] for ALF.
std::vector<double> default_volume_radii(const CenterConfiguration& config,
                                         int count = 8);

/// Vol(B_R) = 2π ∫_{|x|<R} V d^3x and ρ(R) = mean over fixed rays of
/// ∫_0^R sqrt(V) dr; fits log Vol against log ρ.
VolumeGrowth volume_growth_fit(const GibbonsHawking& gh,
                               std::span<const double> coordinate_radii);

struct AklConvergence {
  std::vector<double> partial;     // V_J for J = 1..J_max
  std::vector<double> increments;  // V_J - V_{J-1}, J >= 2
  std::vector<double> tail_bound;  // Σ_{j=J+1}^{J_max} n / (2 (j^2 - |a|))
  bool monotone_from_10 = true;
  bool tail_respected = true;
};

/// Truncated potentials V_J at the base point x for an AKL configuration
/// (polygon j inscribed in the circle of radius j^2, J = 1..J_max).
AklConvergence akl_convergence(const CenterConfiguration& akl_config, const BasePoint& x);

}  // namespace rfk
