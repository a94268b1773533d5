#pragma once

// Verification harness: deterministic sampling, per-property scans over the
// two metric constructions, cross-construction comparison, period and
// asymptotic fits, and the aggregated report.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rfk/ghawking.hpp"
#include "rfk/hitchin.hpp"

namespace rfk {

enum class MetricSource { hitchin, gh };

std::string_view source_name(MetricSource s);
MetricSource parse_source(const std::string& text);

struct SampleSpec {
  int count = 100;
  double r_min = 0.5;
  double r_max = 3.0;
  std::uint64_t seed = 1;
  /// Minimum distance to every center and to every vertical line through a
  /// center (Dirac strings, Hitchin chart poles).
  double exclusion_radius = 0.05;
};

struct Tolerances {
  double ricci = 5e-5;
  double closedness = 1e-6;
  double nijenhuis = 1e-6;
  double compatibility = 1e-10;
  double invariance = 1e-9;
  double cross_spread = 1e-3;
  double period = 1e-3;
  double decay_band = 0.5;   // around slope -12
  double volume_band = 0.1;  // around 4 (ALE) or 3 (ALF)
};

/// A base point (b, a) with a fiber phase: θ for GH, arg y for Hitchin.
struct BaseSample {
  double b = 0.0;
  cplx a{};
  double phase = 0.0;
};

/// One metric construction behind a uniform interface.
class MetricModel {
 public:
  static MetricModel hitchin(const CenterConfiguration& config, HitchinOptions opts = {});
  static MetricModel gh(const CenterConfiguration& config, GHOptions opts = {});

  MetricSource source() const noexcept { return source_; }
  const CenterConfiguration& config() const;
  const HitchinMetric* hitchin_metric() const noexcept { return hitchin_.get(); }
  const GibbonsHawking* gh_metric() const noexcept { return gh_.get(); }

  ChartPoint chart_point(const BaseSample& s) const;
  Vec4 steps(const ChartPoint& p) const;
  MetricField metric() const;
  TwoFormField kahler_form() const;
  ComplexStructureField complex_structure() const;
  /// Image of p under the group element and the real Jacobian of the map.
  std::pair<ChartPoint, Mat4> act(const GroupElement& g, const ChartPoint& p) const;

 private:
  MetricSource source_ = MetricSource::gh;
  std::shared_ptr<const HitchinMetric> hitchin_;
  std::shared_ptr<const GibbonsHawking> gh_;
};

/// Halton points in the shell r_min <= |x| <= r_max with uniform volume
/// density, filtered by the exclusion rules of the source (for Hitchin also
/// |y| > 1e-3). Deterministic in spec.seed.
std::vector<BaseSample> sample_points(const CenterConfiguration& config,
                                      const SampleSpec& spec, MetricSource source);

struct CheckRecord {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;
  int samples = 0;
  int failures = 0;
  std::string note;
};

struct SampleRow {
  std::string check;
  MetricSource source = MetricSource::gh;
  Vec4 coords{};
  double residual = 0.0;
  double riem_sq = 0.0;
  double ricci_norm = 0.0;
  std::string flag;  // empty, or the error code name of a failed evaluation
};

struct ScanOutput {
  std::vector<CheckRecord> records;
  std::vector<SampleRow> rows;
};

/// max |Ric| / max(|Rm|, 1).
ScanOutput ricci_scan(const MetricModel& model, const SampleSpec& spec,
                      const Tolerances& tol = {});

/// Three records: closedness of ω, Nijenhuis tensor, ω = g(J·,·).
ScanOutput kahler_scan(const MetricModel& model, const SampleSpec& spec,
                       const Tolerances& tol = {});

/// Pullback residual of g under the generator of Z_n. Throws
/// invalid-argument for n = 1.
ScanOutput invariance_scan(const MetricModel& model, const GroupElement& generator,
                           const SampleSpec& spec, const Tolerances& tol = {});

struct CrossValidation {
  CheckRecord record;
  double mean_ratio = 0.0;  // |Rm|^2_hitchin / |Rm|^2_gh
  double spread = 0.0;      // (max - min) / mean
  /// λ with g_hitchin ≈ λ g_gh, from |Rm|^2 ∝ λ^{-2}.
  double homothety = 0.0;
  int usable = 0;
  std::vector<SampleRow> rows;
};

CrossValidation cross_validate(const CenterConfiguration& config, const SampleSpec& spec,
                               const Tolerances& tol = {});

struct PeriodFit {
  CheckRecord record;
  double constant = 0.0;  // C in period = C (b_j - b_i)
  struct Pair {
    int i, j;
    double db, period;
  };
  std::vector<Pair> pairs;
};

PeriodFit period_check(const CenterConfiguration& config, const Tolerances& tol = {});

struct AsymptoticFits {
  std::vector<CheckRecord> records;
  std::optional<DecayResult> decay;
  std::optional<VolumeGrowth> volume;
};

/// Curvature decay (ALE, Hitchin) over ALE radii [ρ0, 10 ρ0] with
/// ρ0 = 10 sqrt(s), s = max(1, extent), and GH volume growth (ALE, ALF).
/// Much beyond ρ ~ 100 s^{1/2} the finite-difference |Rm|^2 reaches its
/// roundoff floor.
AsymptoticFits decay_and_volume(const CenterConfiguration& config,
                                const Tolerances& tol = {});

struct AklCheck {
  CheckRecord record;
  AklConvergence data;
};

/// Convergence of V_J at (b, a) = (0, 0.1) for the configuration's AKL mode.
AklCheck akl_check(const CenterConfiguration& config);

/// Check families accepted by full_report.
const std::vector<std::string>& check_names();

struct ReportRequest {
  CenterConfiguration config;
  std::vector<std::string> checks;  // empty: all applicable
  SampleSpec sample;
  Tolerances tolerances;
  /// JSON text echoed verbatim under "config".
  std::string config_echo = "{}";
};

struct VerificationReport {
  std::string json;  // includes "timing"
  std::vector<SampleRow> rows;
  bool pass = false;
};

VerificationReport full_report(const ReportRequest& request);

/// Removes "timing" from a report, for byte comparison of runs.
std::string report_payload(const std::string& report_json);

std::string rows_to_csv(const std::vector<SampleRow>& rows);

struct PointEvaluation {
  MetricSource source = MetricSource::gh;
  Vec4 coords{};
  Mat4 g{};
  double riem_sq = 0.0;
  double ricci_norm = 0.0;
  std::string flag;
};

/// Metric and curvature at a chart point; evaluation errors become the flag.
PointEvaluation evaluate_point(const MetricModel& model, const ChartPoint& p);

std::string evaluations_to_csv(const std::vector<PointEvaluation>& rows);

}  // namespace rfk
