#include "rfk/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rfk/errors.hpp"
#include "rfk/numerics.hpp"

namespace rfk {

using json = nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat4 rotation_block(Mat4 m, int offset, cplx c) {
  m[offset][offset] = c.real();
  m[offset][offset + 1] = -c.imag();
  m[offset + 1][offset] = c.imag();
  m[offset + 1][offset + 1] = c.real();
  return m;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CheckRecord failed_record(const std::string& name, const std::string& why) {
  CheckRecord r;
  r.name = name;
  r.pass = false;
  r.note = why;
  return r;
}

CheckRecord skipped_record(const std::string& name, const std::string& why) {
  CheckRecord r;
  r.name = name;
  r.pass = true;
  r.skipped = true;
  r.note = why;
  return r;
}

// Per-sample outcome of a scan, several residuals at once.
struct SampleEval {
  Vec4 coords{};
  std::vector<double> residuals;
  double riem_sq = 0.0, ricci_norm = 0.0;
  std::string flag;
};

template <class F>
std::vector<SampleEval> evaluate_samples(const MetricModel& model,
                                         const std::vector<BaseSample>& samples, F&& fn) {
  std::function<SampleEval(std::size_t)> task = [&](std::size_t i) {
    SampleEval e;
    try {
      const ChartPoint p = model.chart_point(samples[i]);
      e.coords = p.coords;
      fn(p, e);
    } catch (const Error& err) {
      e.flag = std::string(error_code_name(err.code()));
      e.residuals.clear();
    }
    return e;
  };
  return parallel_map<SampleEval>(samples.size(), task);
}

// Aggregates residual slot `slot` over the successful samples.
CheckRecord aggregate(const std::string& name, const std::vector<SampleEval>& evals,
                      int slot, double tolerance) {
  CheckRecord r;
  r.name = name;
  r.tolerance = tolerance;
  for (const auto& e : evals) {
    if (!e.flag.empty()) {
      ++r.failures;
      continue;
    }
    ++r.samples;
    r.max_residual = std::max(r.max_residual, e.residuals[slot]);
  }
  if (r.samples == 0) {
    fail(ErrorCode::scan, name + ": every sample evaluation failed");
  }
  r.pass = r.failures == 0 && r.max_residual < tolerance;
  if (r.failures > 0) r.note = std::to_string(r.failures) + " sample evaluations failed";
  return r;
}

void append_rows(std::vector<SampleRow>& rows, const std::string& check, MetricSource src,
                 const std::vector<SampleEval>& evals, int slot) {
  for (const auto& e : evals) {
    SampleRow row;
    row.check = check;
    row.source = src;
    row.coords = e.coords;
    row.residual = e.flag.empty() ? e.residuals[slot] : NAN;
    row.riem_sq = e.riem_sq;
    row.ricci_norm = e.ricci_norm;
    row.flag = e.flag;
    rows.push_back(row);
  }
}

std::string suffixed(const std::string& base, MetricSource s) {
  return base + "." + std::string(source_name(s));
}

std::vector<BaseSample> checked_samples(const MetricModel& model, const SampleSpec& spec) {
  auto samples = sample_points(model.config(), spec, model.source());
  if (samples.empty()) fail(ErrorCode::scan, "no admissible sample points in the region");
  return samples;
}

}  // namespace

std::string_view source_name(MetricSource s) {
  return s == MetricSource::hitchin ? "hitchin" : "gh";
}

MetricSource parse_source(const std::string& text) {
  if (text == "hitchin") return MetricSource::hitchin;
  if (text == "gh") return MetricSource::gh;
  fail(ErrorCode::parse, "source must be 'gh' or 'hitchin' (got '" + text + "')");
}

MetricModel MetricModel::hitchin(const CenterConfiguration& config, HitchinOptions opts) {
  MetricModel m;
  m.source_ = MetricSource::hitchin;
  m.hitchin_ = std::make_shared<const HitchinMetric>(config, opts);
  return m;
}

MetricModel MetricModel::gh(const CenterConfiguration& config, GHOptions opts) {
  MetricModel m;
  m.source_ = MetricSource::gh;
  m.gh_ = std::make_shared<const GibbonsHawking>(config, opts);
  return m;
}

const CenterConfiguration& MetricModel::config() const {
  return hitchin_ ? hitchin_->config() : gh_->config();
}

ChartPoint MetricModel::chart_point(const BaseSample& s) const {
  if (hitchin_) return HitchinMetric::to_chart(hitchin_->point_over(s.b, s.a, s.phase));
  return GibbonsHawking::to_chart({s.phase, s.b, s.a});
}

Vec4 MetricModel::steps(const ChartPoint& p) const {
  if (hitchin_) return hitchin_->steps_at(HitchinMetric::from_chart(p));
  return gh_->steps_at(GibbonsHawking::from_chart(p));
}

MetricField MetricModel::metric() const {
  return hitchin_ ? hitchin_->metric_field() : gh_->metric_field();
}

TwoFormField MetricModel::kahler_form() const {
  return hitchin_ ? hitchin_->kahler_form_field() : gh_->kahler_form_field();
}

ComplexStructureField MetricModel::complex_structure() const {
  return hitchin_ ? hitchin_->complex_structure_field() : gh_->complex_structure_field();
}

std::pair<ChartPoint, Mat4> MetricModel::act(const GroupElement& g, const ChartPoint& p) const {
  if (hitchin_) {
    const HitchinPoint hp = HitchinMetric::from_chart(p);
    const auto [z, y] = apply_action_hitchin(g, hp.z, hp.y);
    const auto [cz, cy] = apply_action_hitchin(g, 1.0, 1.0);
    const Mat4 phi = rotation_block(rotation_block(Mat4{}, 0, cz), 2, cy);
    return {HitchinMetric::to_chart({z, y}), phi};
  }
  const GHPoint gp = GibbonsHawking::from_chart(p);
  const GHCoordinates img = apply_action_gh(g, {gp.theta, gp.b, gp.a});
  const cplx ca = apply_action_gh(g, {0.0, 0.0, 1.0}).a;
  Mat4 phi = rotation_block(Mat4{}, 2, ca);
  phi[0][0] = phi[1][1] = 1.0;
  return {GibbonsHawking::to_chart({img.theta, img.b, img.a}), phi};
}

std::vector<BaseSample> sample_points(const CenterConfiguration& config,
                                      const SampleSpec& spec, MetricSource source) {
  if (spec.count < 1 || !(spec.r_min >= 0) || !(spec.r_max > spec.r_min) ||
      !(spec.exclusion_radius >= 0)) {
    fail(ErrorCode::invalid_argument, "sampling: need count >= 1, 0 <= r_min < r_max");
  }
  std::optional<HitchinMetric> hitchin;
  if (source == MetricSource::hitchin) hitchin.emplace(config);
  HaltonStream stream(4, spec.seed);
  const double r0 = spec.r_min, r1 = spec.r_max;
  std::vector<BaseSample> out;
  for (long attempt = 0; static_cast<int>(out.size()) < spec.count &&
                         attempt < 1000L * spec.count;
       ++attempt) {
    const auto u = stream.next();
    const double r = std::cbrt(r0 * r0 * r0 + u[0] * (r1 * r1 * r1 - r0 * r0 * r0));
    const double ct = 2.0 * u[1] - 1.0, st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double ph = kTwoPi * u[2];
    const BaseSample s{r * ct, r * st * cplx{std::cos(ph), std::sin(ph)}, kTwoPi * u[3]};
    bool ok = true;
    for (const auto& c : config.centers) {
      const double horizontal = std::abs(s.a - c.a);
      if (horizontal < spec.exclusion_radius ||
          std::hypot(s.b - c.b, horizontal) < spec.exclusion_radius) {
        ok = false;
        break;
      }
    }
    if (ok && hitchin) {
      ok = 0.5 * hitchin->log_height_product(-std::conj(s.a), s.b) > std::log(1e-3);
    }
    if (ok) out.push_back(s);
  }
  return out;
}

ScanOutput ricci_scan(const MetricModel& model, const SampleSpec& spec,
                      const Tolerances& tol) {
  const auto samples = checked_samples(model, spec);
  const MetricField field = model.metric();
  const auto evals = evaluate_samples(model, samples, [&](const ChartPoint& p, SampleEval& e) {
    const CurvatureBundle c = curvature_at(field, p, model.steps(p));
    e.riem_sq = c.riem_norm_sq;
    e.ricci_norm = c.ricci_norm;
    e.residuals = {c.ricci_norm / std::max(std::sqrt(c.riem_norm_sq), 1.0)};
  });
  ScanOutput out;
  const std::string name = suffixed("ricci", model.source());
  out.records.push_back(aggregate(name, evals, 0, tol.ricci));
  append_rows(out.rows, name, model.source(), evals, 0);
  return out;
}

ScanOutput kahler_scan(const MetricModel& model, const SampleSpec& spec,
                       const Tolerances& tol) {
  const auto samples = checked_samples(model, spec);
  const MetricField gfield = model.metric();
  const TwoFormField wfield = model.kahler_form();
  const ComplexStructureField jfield = model.complex_structure();
  const auto evals = evaluate_samples(model, samples, [&](const ChartPoint& p, SampleEval& e) {
    const Vec4 h = model.steps(p);
    const ThreeFormSample dw = exterior_derivative(wfield, p, h);
    double dmax = 0;
    for (double v : dw.components) dmax = std::max(dmax, std::abs(v));
    const NijenhuisSample nj = nijenhuis_at(jfield, p, h);
    double nmax = 0;
    for (const auto& m : nj.n)
      for (const auto& row : m)
        for (double v : row) nmax = std::max(nmax, std::abs(v));
    const double closed = dw.term_scale > 0 ? dmax / dw.term_scale : dmax;
    const double integrable = nj.term_scale > 0 ? nmax / nj.term_scale : nmax;
    const double compat =
        compatibility_residual(gfield(p).g, jfield(p).J, wfield(p).omega);
    e.residuals = {closed, integrable, compat};
  });
  ScanOutput out;
  const char* names[] = {"kahler.closed", "kahler.nijenhuis", "kahler.compatible"};
  const double tols[] = {tol.closedness, tol.nijenhuis, tol.compatibility};
  for (int slot = 0; slot < 3; ++slot) {
    const std::string name = suffixed(names[slot], model.source());
    out.records.push_back(aggregate(name, evals, slot, tols[slot]));
    append_rows(out.rows, name, model.source(), evals, slot);
  }
  return out;
}

ScanOutput invariance_scan(const MetricModel& model, const GroupElement& generator,
                           const SampleSpec& spec, const Tolerances& tol) {
  if (generator.n < 2) {
    fail(ErrorCode::invalid_argument, "invariance: the group is trivial for n = 1");
  }
  const auto samples = checked_samples(model, spec);
  const MetricField field = model.metric();
  const auto evals = evaluate_samples(model, samples, [&](const ChartPoint& p, SampleEval& e) {
    const auto [q, phi] = model.act(generator, p);
    const Mat4 g = field(p).g;
    const Mat4 pulled = multiply(multiply(transpose(phi), field(q).g), phi);
    e.residuals = {max_abs_diff(pulled, g) / max_abs(g)};
  });
  ScanOutput out;
  const std::string name = suffixed("invariance", model.source());
  out.records.push_back(aggregate(name, evals, 0, tol.invariance));
  append_rows(out.rows, name, model.source(), evals, 0);
  return out;
}

CrossValidation cross_validate(const CenterConfiguration& config, const SampleSpec& spec,
                               const Tolerances& tol) {
  if (config.mode.kind != ModeKind::ale) {
    fail(ErrorCode::not_applicable, "cross validation compares the two ALE constructions");
  }
  const MetricModel hm = MetricModel::hitchin(config);
  const MetricModel gm = MetricModel::gh(config);
  const auto samples = checked_samples(hm, spec);
  constexpr double kFloor = 1e-10;

  struct Pair {
    SampleRow h, g;
    bool ok = false;
  };
  std::function<Pair(std::size_t)> task = [&](std::size_t i) {
    Pair out;
    const BaseSample& s = samples[i];
    out.h.check = out.g.check = "cross_validation";
    out.h.source = MetricSource::hitchin;
    out.g.source = MetricSource::gh;
    try {
      const ChartPoint hp = hm.chart_point(s);
      out.h.coords = hp.coords;
      const ChartPoint gp = gm.chart_point(s);
      out.g.coords = gp.coords;
      const CurvatureBundle ch = curvature_at(hm.metric(), hp, hm.steps(hp));
      const CurvatureBundle cg = curvature_at(gm.metric(), gp, gm.steps(gp));
      out.h.riem_sq = ch.riem_norm_sq;
      out.h.ricci_norm = ch.ricci_norm;
      out.g.riem_sq = cg.riem_norm_sq;
      out.g.ricci_norm = cg.ricci_norm;
      out.ok = true;
    } catch (const Error& err) {
      out.h.flag = out.g.flag = std::string(error_code_name(err.code()));
    }
    return out;
  };
  const auto pairs = parallel_map<Pair>(samples.size(), task);

  CrossValidation cv;
  cv.record.name = "cross_validation";
  cv.record.tolerance = tol.cross_spread;
  std::vector<double> ratios;
  int below = 0;
  for (const auto& p : pairs) {
    SampleRow h = p.h, g = p.g;
    if (!p.ok) {
      ++cv.record.failures;
    } else if (p.g.riem_sq < kFloor) {
      ++below;
      h.flag = g.flag = "below-floor";
      h.residual = g.residual = NAN;
    } else {
      const double r = p.h.riem_sq / p.g.riem_sq;
      ratios.push_back(r);
      h.residual = g.residual = r;
    }
    cv.rows.push_back(h);
    cv.rows.push_back(g);
  }
  cv.usable = static_cast<int>(ratios.size());
  cv.record.samples = cv.usable;
  if (cv.usable == 0 && below > 0) {
    cv.record.pass = true;
    cv.record.skipped = true;
    cv.record.note = "flat: curvature below the noise floor at every sample";
    return cv;
  }
  if (cv.usable < 8) {
    fail(ErrorCode::scan, "cross validation: fewer than 8 usable samples");
  }
  const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  cv.mean_ratio = pairwise_sum(ratios) / cv.usable;
  cv.spread = (*mx - *mn) / cv.mean_ratio;
  cv.homothety = 1.0 / std::sqrt(cv.mean_ratio);
  cv.record.max_residual = cv.spread;
  cv.record.pass = cv.record.failures == 0 && cv.spread < tol.cross_spread;
  std::ostringstream os;
  os << "homothety g_hitchin = " << cv.homothety << " g_gh";
  if (below > 0) os << "; " << below << " samples below the curvature floor";
  if (cv.record.failures > 0) os << "; " << cv.record.failures << " evaluations failed";
  cv.record.note = os.str();
  return cv;
}

PeriodFit period_check(const CenterConfiguration& config, const Tolerances& tol) {
  const GibbonsHawking gh(config);
  PeriodFit out;
  out.record.name = "periods";
  out.record.tolerance = tol.period;
  const double level_tol = 1e-12 * std::max(1.0, config.extent());
  int blocked = 0;
  for (int i = 0; i < config.k(); ++i)
    for (int j = i + 1; j < config.k(); ++j) {
      try {
        out.pairs.push_back(
            {i, j, config.centers[j].b - config.centers[i].b, gh.cycle_period(i, j)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::path) throw;
        ++blocked;
      }
    }
  out.record.samples = static_cast<int>(out.pairs.size());
  double sxy = 0, sxx = 0, pmax = 0;
  for (const auto& p : out.pairs) {
    sxy += p.db * p.period;
    sxx += p.db * p.db;
    pmax = std::max(pmax, std::abs(p.period));
  }
  std::ostringstream os;
  if (!(sxx > level_tol * level_tol)) {
    out.record.max_residual = pmax;
    out.record.pass = pmax < tol.period;
    os << "vacuous: all centers at one height";
  } else {
    out.constant = sxy / sxx;
    double worst = 0;
    for (const auto& p : out.pairs) {
      worst = std::max(worst, std::abs(p.period - out.constant * p.db));
    }
    out.record.max_residual = worst / pmax;
    out.record.pass = out.record.max_residual < tol.period;
    os << "period = C (b_j - b_i) with C = " << out.constant;
  }
  if (blocked > 0) os << "; " << blocked << " pairs skipped (segment through a center)";
  out.record.note = os.str();
  return out;
}

AsymptoticFits decay_and_volume(const CenterConfiguration& config, const Tolerances& tol) {
  AsymptoticFits out;
  const ModeKind kind = config.mode.kind;
  if (kind == ModeKind::ale) {
    const HitchinMetric h(config);
    const double s = std::max(1.0, config.extent());
    const double rho0 = 10.0 * std::sqrt(s);
    std::vector<double> radii(6);
    for (int i = 0; i < 6; ++i) radii[i] = rho0 * std::pow(10.0, i / 5.0);
    out.decay = ale_curvature_decay(h, radii);
    CheckRecord r;
    r.name = "decay.curvature";
    r.tolerance = tol.decay_band;
    r.samples = static_cast<int>(radii.size());
    if (out.decay->flat) {
      r.pass = true;
      r.note = "flat: |Rm|^2 below the noise floor at every radius";
    } else {
      r.max_residual = std::abs(out.decay->fit.slope + 12.0);
      r.pass = r.max_residual <= tol.decay_band;
      r.note = "slope " + brief(out.decay->fit.slope) + " (band -12 +/- " + brief(tol.decay_band) + ")";
    }
    out.records.push_back(r);
  } else {
    out.records.push_back(skipped_record("decay.curvature", "only defined for ale mode"));
  }
  if (kind == ModeKind::ale || kind == ModeKind::alf) {
    const GibbonsHawking gh(config);
    out.volume = volume_growth_fit(gh, default_volume_radii(config));
    const double expected = kind == ModeKind::ale ? 4.0 : 3.0;
    CheckRecord r;
    r.name = "volume.growth";
    r.tolerance = tol.volume_band;
    r.samples = out.volume->fit.point_count;
    r.max_residual = std::abs(out.volume->fit.slope - expected);
    r.pass = r.max_residual <= tol.volume_band;
    r.note = "slope " + brief(out.volume->fit.slope) + " (band " + brief(expected) + " +/- " +
             brief(tol.volume_band) + ")";
    out.records.push_back(r);
  } else {
    out.records.push_back(skipped_record("volume.growth", "truncated akl data has no fixed end"));
  }
  return out;
}

AklCheck akl_check(const CenterConfiguration& config) {
  AklCheck out;
  out.data = akl_convergence(config, {0.0, {0.1, 0.0}});
  CheckRecord& r = out.record;
  r.name = "akl.convergence";
  r.tolerance = 1.0;
  r.samples = static_cast<int>(out.data.partial.size());
  const double last = out.data.partial.back();
  for (std::size_t J = 0; J + 1 < out.data.partial.size(); ++J) {
    const double bound = out.data.tail_bound[J];
    if (bound > 0) r.max_residual = std::max(r.max_residual, (last - out.data.partial[J]) / bound);
  }
  r.pass = out.data.tail_respected && out.data.monotone_from_10;
  r.note = "max |V_Jmax - V_J| / tail bound; increments monotone from J = 10: " +
           std::string(out.data.monotone_from_10 ? "yes" : "no");
  return out;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"ricci",   "kahler", "invariance", "cross",
                                              "periods", "decay",  "volume",     "akl"};
  return names;
}

namespace {

json record_json(const CheckRecord& r) {
  return {{"name", r.name},         {"max_residual", r.max_residual},
          {"tolerance", r.tolerance}, {"pass", r.pass},
          {"skipped", r.skipped},   {"samples", r.samples},
          {"failures", r.failures}, {"note", r.note}};
}

json fit_json(const FitResult& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"rms_residual", f.rms_residual},
          {"point_count", f.point_count}};
}

}  // namespace

VerificationReport full_report(const ReportRequest& req) {
  const auto start = std::chrono::steady_clock::now();
  const CenterConfiguration& cfg = req.config;
  const bool ale = cfg.mode.kind == ModeKind::ale;
  const bool akl = cfg.mode.kind == ModeKind::akl;

  std::vector<std::string> checks = req.checks;
  for (const auto& c : checks) {
    if (std::find(check_names().begin(), check_names().end(), c) == check_names().end()) {
      fail(ErrorCode::invalid_argument, "unknown check '" + c + "'");
    }
  }
  if (checks.empty()) {
    checks = {"ricci", "kahler"};
    if (cfg.signature.n() >= 2) checks.push_back("invariance");
    if (ale) checks.push_back("cross");
    checks.push_back("periods");
    if (!akl) checks.insert(checks.end(), {"decay", "volume"});
    if (akl) checks.push_back("akl");
  }
  auto wants = [&](const char* name) {
    return std::find(checks.begin(), checks.end(), name) != checks.end();
  };

  std::vector<MetricSource> sources{MetricSource::gh};
  if (ale) sources.push_back(MetricSource::hitchin);

  std::vector<CheckRecord> records;
  VerificationReport report;
  json doc;
  doc["schema"] = "rfk-report/1";
  doc["config"] = json::parse(req.config_echo);

  auto guarded = [&](const std::string& name, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      records.push_back(
          failed_record(name, std::string(error_code_name(e.code())) + ": " + e.what()));
    }
  };
  auto take = [&](ScanOutput&& s) {
    records.insert(records.end(), s.records.begin(), s.records.end());
    report.rows.insert(report.rows.end(), s.rows.begin(), s.rows.end());
  };

  for (MetricSource src : sources) {
    auto model = [&] {
      return src == MetricSource::gh ? MetricModel::gh(cfg) : MetricModel::hitchin(cfg);
    };
    if (wants("ricci")) {
      guarded(suffixed("ricci", src), [&] { take(ricci_scan(model(), req.sample, req.tolerances)); });
    }
    if (wants("kahler")) {
      guarded(suffixed("kahler", src), [&] { take(kahler_scan(model(), req.sample, req.tolerances)); });
    }
    if (wants("invariance")) {
      if (cfg.signature.n() < 2) {
        if (src == MetricSource::gh) {
          records.push_back(skipped_record("invariance", "trivial group (n = 1)"));
        }
      } else {
        guarded(suffixed("invariance", src), [&] {
          take(invariance_scan(model(), GroupElement::generator(cfg.signature), req.sample,
                               req.tolerances));
        });
      }
    }
  }
  if (!ale && wants("ricci")) {
    records.push_back(skipped_record("ricci.hitchin", "hitchin chart only in ale mode"));
  }
  if (wants("cross")) {
    if (!ale) {
      records.push_back(skipped_record("cross_validation", "only defined for ale mode"));
    } else {
      guarded("cross_validation", [&] {
        const CrossValidation cv = cross_validate(cfg, req.sample, req.tolerances);
        records.push_back(cv.record);
        report.rows.insert(report.rows.end(), cv.rows.begin(), cv.rows.end());
        doc["cross_validation"] = {{"mean_ratio", cv.mean_ratio},
                                   {"spread", cv.spread},
                                   {"homothety", cv.homothety},
                                   {"usable", cv.usable}};
      });
    }
  }
  if (wants("periods")) {
    guarded("periods", [&] {
      const PeriodFit pf = period_check(cfg, req.tolerances);
      records.push_back(pf.record);
      json pairs = json::array();
      for (const auto& p : pf.pairs) {
        pairs.push_back({{"i", p.i}, {"j", p.j}, {"db", p.db}, {"period", p.period}});
      }
      doc["periods"] = {{"constant", pf.constant}, {"pairs", pairs}};
    });
  }
  if (wants("decay") || wants("volume")) {
    guarded("asymptotics", [&] {
      const AsymptoticFits fits = decay_and_volume(cfg, req.tolerances);
      for (const auto& r : fits.records) {
        const bool is_decay = r.name == "decay.curvature";
        if ((is_decay && wants("decay")) || (!is_decay && wants("volume"))) {
          records.push_back(r);
        }
      }
      json f = json::object();
      if (fits.decay && wants("decay")) {
        json d = fit_json(fits.decay->fit);
        d["flat"] = fits.decay->flat;
        d["ale_radii"] = fits.decay->ale_radii;
        d["mean_riem_sq"] = fits.decay->mean_riem_sq;
        f["curvature_decay"] = d;
      }
      if (fits.volume && wants("volume")) {
        json v = fit_json(fits.volume->fit);
        v["coordinate_radii"] = fits.volume->coordinate_radii;
        v["geodesic_radii"] = fits.volume->geodesic_radii;
        v["volumes"] = fits.volume->volumes;
        f["volume_growth"] = v;
      }
      doc["fits"] = f;
    });
  }
  if (wants("akl")) {
    if (!akl) {
      records.push_back(skipped_record("akl.convergence", "only defined for akl mode"));
    } else {
      guarded("akl.convergence", [&] {
        const AklCheck a = akl_check(cfg);
        records.push_back(a.record);
        doc["akl"] = {{"partial", a.data.partial}, {"tail_bound", a.data.tail_bound}};
      });
    }
  }

  json recs = json::array();
  report.pass = !records.empty();
  for (const auto& r : records) {
    recs.push_back(record_json(r));
    report.pass = report.pass && r.pass;
  }
  doc["checks"] = recs;
  doc["pass"] = report.pass;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  doc["timing"] = {{"seconds", seconds}};
  report.json = doc.dump(2);
  return report;
}

std::string report_payload(const std::string& report_json) {
  json doc = json::parse(report_json);
  doc.erase("timing");
  return doc.dump(2);
}

std::string rows_to_csv(const std::vector<SampleRow>& rows) {
  std::ostringstream os;
  os << "check,source,c0,c1,c2,c3,residual,riem_sq,ricci_norm,flag\n";
  for (const auto& r : rows) {
    os << r.check << ',' << source_name(r.source);
    for (double c : r.coords) os << ',' << fmt(c);
    os << ',' << fmt(r.residual) << ',' << fmt(r.riem_sq) << ',' << fmt(r.ricci_norm) << ','
       << r.flag << '\n';
  }
  return os.str();
}

PointEvaluation evaluate_point(const MetricModel& model, const ChartPoint& p) {
  PointEvaluation e;
  e.source = model.source();
  e.coords = p.coords;
  try {
    const MetricField field = model.metric();
    e.g = field(p).g;
    const CurvatureBundle c = curvature_at(field, p, model.steps(p));
    e.riem_sq = c.riem_norm_sq;
    e.ricci_norm = c.ricci_norm;
  } catch (const Error& err) {
    e.flag = std::string(error_code_name(err.code()));
    for (auto& row : e.g) row.fill(NAN);
    e.riem_sq = e.ricci_norm = NAN;
  }
  return e;
}

std::string evaluations_to_csv(const std::vector<PointEvaluation>& rows) {
  std::ostringstream os;
  os << "source,c0,c1,c2,c3";
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) os << ",g" << i << j;
  os << ",riem_sq,ricci_norm,flag\n";
  for (const auto& r : rows) {
    os << source_name(r.source);
    for (double c : r.coords) os << ',' << fmt(c);
    for (const auto& row : r.g)
      for (double v : row) os << ',' << fmt(v);
    os << ',' << fmt(r.riem_sq) << ',' << fmt(r.ricci_norm) << ',' << r.flag << '\n';
  }
  return os.str();
}

}  // namespace rfk
