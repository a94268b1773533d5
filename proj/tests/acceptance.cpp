// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfk/errors.hpp"
#include "rfk/run_config.hpp"
#include "rfk/verify.hpp"

using namespace rfk;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SampleSpec samples(int count, const CenterConfiguration& cfg) {
  SampleSpec s;
  s.count = count;
  const double scale = std::max(1.0, cfg.extent());
  s.r_min = 0.5 * scale;
  s.r_max = 3.0 * scale;
  return s;
}

CenterConfiguration single_center(Mode mode = Mode::ale()) {
  return make_explicit_config({{0, {0, 0}}}, QuotientSignature(1, 1, 0), mode);
}

CenterConfiguration symmetric_pair() {
  return make_polygon_config(QuotientSignature(2, 1, 0), {{1, 0}, {-1, 0}}, {0, 0});
}

CenterConfiguration a1() {
  return make_polygon_config(QuotientSignature(1, 2, 1), {{0.7, 0.4}}, {0});
}

CenterConfiguration hexagons() {
  return make_polygon_config(QuotientSignature(2, 3, 2), {{1, 0}, {0, 1.5}}, {0, 0.8});
}

CenterConfiguration two_level_square() {
  return make_polygon_config(QuotientSignature(2, 2, 1), {{1, 0}, {0.5, 1.2}}, {0, 1});
}

struct NamedConfig {
  const char* name;
  CenterConfiguration cfg;
};

std::vector<NamedConfig> ricci_cases() {
  return {{"k=2", symmetric_pair()},
          {"(1,2,1)", a1()},
          {"(2,3,2)", hexagons()},
          {"taub-nut", single_center(Mode::alf())}};
}

std::vector<MetricModel> models_for(const CenterConfiguration& cfg) {
  std::vector<MetricModel> out{MetricModel::gh(cfg)};
  if (cfg.mode.kind == ModeKind::ale) out.push_back(MetricModel::hitchin(cfg));
  return out;
}

double max_riem_sq(const MetricModel& model, const SampleSpec& spec) {
  const auto out = ricci_scan(model, spec);
  double worst = 0;
  for (const auto& row : out.rows) {
    if (!row.flag.empty()) return INFINITY;
    worst = std::max(worst, row.riem_sq);
  }
  return worst;
}

void c1_flat(Outcome& o) {
  for (const auto& model : {MetricModel::gh(single_center()), MetricModel::hitchin(single_center())}) {
    const auto t0 = std::chrono::steady_clock::now();
    const double worst = max_riem_sq(model, samples(20, single_center()));
    const double dt = seconds_since(t0);
    o.detail << ' ' << source_name(model.source()) << " max|Rm|^2=" << worst << " (" << dt << " s)";
    o.require(worst < 1e-8, "max |Rm|^2 < 1e-8");
    o.require(dt < 10, "runtime < 10 s");
  }
}

void c2_ricci(Outcome& o) {
  for (const auto& [name, cfg] : ricci_cases()) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& model : models_for(cfg)) {
      const CheckRecord r = ricci_scan(model, samples(100, cfg)).records[0];
      o.detail << ' ' << name << '/' << source_name(model.source()) << '=' << r.max_residual;
      o.require(r.samples == 100 && r.failures == 0, "100 evaluated samples");
      o.require(r.max_residual < 5e-5, r.name + " < 5e-5");
    }
    o.require(seconds_since(t0) < 300, std::string(name) + " runtime < 5 min");
  }
}

void c3_kahler(Outcome& o) {
  const double limits[] = {1e-6, 1e-6, 1e-10};
  double worst[3] = {0, 0, 0};
  for (const auto& [name, cfg] : ricci_cases()) {
    for (const auto& model : models_for(cfg)) {
      const auto out = kahler_scan(model, samples(100, cfg));
      for (int i = 0; i < 3; ++i) {
        const CheckRecord& r = out.records[i];
        worst[i] = std::max(worst[i], r.max_residual);
        o.require(r.failures == 0 && r.max_residual < limits[i], std::string(name) + ' ' + r.name);
      }
    }
  }
  o.detail << " closed=" << worst[0] << " nijenhuis=" << worst[1] << " compatible=" << worst[2];
}

void c4_invariance(Outcome& o) {
  for (const auto& [name, cfg] : {NamedConfig{"(1,2,1)", a1()}, NamedConfig{"(2,3,2)", hexagons()}}) {
    const GroupElement g = GroupElement::generator(cfg.signature);
    for (const auto& model : models_for(cfg)) {
      const CheckRecord r = invariance_scan(model, g, samples(100, cfg)).records[0];
      o.detail << ' ' << name << '/' << source_name(model.source()) << '=' << r.max_residual;
      o.require(r.failures == 0 && r.max_residual < 1e-9, r.name + " < 1e-9");
    }
    const CenterConfiguration moved = perturbed(cfg, 0.01, 1);
    for (const auto& model : models_for(moved)) {
      const CheckRecord r = invariance_scan(model, g, samples(100, moved)).records[0];
      o.detail << ' ' << name << "+0.01/" << source_name(model.source()) << '=' << r.max_residual;
      o.require(r.max_residual > 1e-3, "perturbed residual > 1e-3");
    }
  }
}

void c5_decay(Outcome& o) {
  std::vector<double> radii;
  for (int i = 0; i < 6; ++i) radii.push_back(10.0 * std::pow(10.0, i / 5.0));
  const DecayResult d = ale_curvature_decay(HitchinMetric(symmetric_pair()), radii);
  o.detail << " slope=" << d.fit.slope << " over r in [10, 100], rms=" << d.fit.rms_residual;
  o.require(!d.flat, "curvature above the noise floor");
  o.require(d.fit.slope >= -12.5 && d.fit.slope <= -11.5, "slope in [-12.5, -11.5]");
}

void c6_volume(Outcome& o) {
  struct Case {
    const char* name;
    CenterConfiguration cfg;
    double expected;
  };
  for (const auto& [name, cfg, expected] : {Case{"ale k=2", symmetric_pair(), 4.0},
                                            Case{"alf k=1", single_center(Mode::alf()), 3.0}}) {
    const VolumeGrowth v = volume_growth_fit(GibbonsHawking(cfg), default_volume_radii(cfg));
    const double span = v.geodesic_radii.back() / v.geodesic_radii.front();
    o.detail << ' ' << name << " slope=" << v.fit.slope << " (rho span " << span << ")";
    o.require(std::abs(v.fit.slope - expected) <= 0.1, std::string(name) + " exponent");
    o.require(span >= 10.0 * (1 - 1e-12), "geodesic radii span a decade");
  }
}

void c7_cross(Outcome& o) {
  for (const auto& [name, cfg] :
       {NamedConfig{"k=2", symmetric_pair()}, NamedConfig{"k=4", two_level_square()}}) {
    const CrossValidation cv = cross_validate(cfg, samples(20, cfg));
    o.detail << ' ' << name << " spread=" << cv.spread << " usable=" << cv.usable
             << " homothety=" << cv.homothety;
    o.require(cv.usable >= 10, "at least 10 matched points");
    o.require(cv.record.failures == 0 && cv.spread < 1e-3, "spread < 1e-3");
  }
}

void c8_periods(Outcome& o) {
  const PeriodFit p = period_check(two_level_square());
  o.detail << " C=" << p.constant << " residual=" << p.record.max_residual << " pairs="
           << p.pairs.size();
  o.require(p.record.max_residual < 1e-3, "fit residual < 1e-3");
  o.require(p.pairs.size() >= 4, "vertically separated pairs present");
}

void c9_solver(Outcome& o) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1, 1), logs(-6, 6);
  std::uniform_int_distribution<int> pick_d(1, 3), pick_n(1, 4);
  double worst = 0;
  int solved = 0;
  while (solved < 10000) {
    const int d = pick_d(gen), n = pick_n(gen);
    const int m = n == 1 ? 0 : (n == 4 ? 3 : 1);
    std::vector<cplx> radii;
    std::vector<double> heights;
    for (int i = 0; i < d; ++i) {
      radii.push_back({0.2 + 2.0 * std::abs(u(gen)) + i, 0.5 * u(gen)});
      heights.push_back(2.0 * u(gen));
    }
    const HitchinMetric h(make_polygon_config(QuotientSignature(d, n, m), radii, heights));
    for (int rep = 0; rep < 20; ++rep, ++solved) {
      const cplx z{4.0 * u(gen), 4.0 * u(gen)};
      const ImplicitSolution s = h.solve_b(z, std::exp(logs(gen)));
      worst = std::max(worst, s.residual);
    }
  }
  o.detail << " max residual=" << worst << " over " << solved << " inputs";
  o.require(worst < 1e-12, "back-substitution residual < 1e-12");

  const HitchinMetric one(single_center());
  const HitchinMetric two(symmetric_pair());
  const double e1 = std::abs(one.solve_b({0, 0}, 1.0).b - 0.5);
  const double e2 = std::abs(one.solve_b({1, 0}, 1.0).b);
  const double e3 = std::abs(two.solve_b({0, 0}, 1.0).b);
  o.detail << "; closed forms |err|=" << e1 << ',' << e2 << ',' << e3;
  o.require(e1 == 0 && e2 == 0 && e3 == 0, "closed-form cases match exactly");
}

void c10_akl(Outcome& o) {
  const AklCheck a = akl_check(make_akl_config(2, 1, 200));
  o.detail << " V_200=" << a.data.partial.back() << " max tail/bound=" << a.record.max_residual;
  o.require(a.data.tail_respected, "tail bounded by the comparison series");
  o.require(a.data.monotone_from_10, "increments decrease from J = 10");
}

void c11_determinism(Outcome& o) {
  RunConfig rc = parse_run_config(
      R"({"schema":"1","d":2,"n":2,"m":1,"radii":[[1,0],[0.5,1.2]],"heights":[0,1],"seed":5})");
  rc.sample.count = 40;
  const std::string p1 = report_payload(full_report(to_request(rc)).json);
  const std::string p2 = report_payload(full_report(to_request(rc)).json);
  o.detail << " payload " << p1.size() << " bytes";
  o.require(p1 == p2, "byte-identical payloads");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "flat-case anchors", c1_flat},
      {2, "Ricci-flatness", c2_ricci},
      {3, "Kahler verification", c3_kahler},
      {4, "Z_n invariance", c4_invariance},
      {5, "curvature decay", c5_decay},
      {6, "volume growth", c6_volume},
      {7, "cross-construction consistency", c7_cross},
      {8, "Kahler-class periods", c8_periods},
      {9, "implicit solver", c9_solver},
      {10, "AKL convergence", c10_akl},
      {11, "determinism", c11_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    o.detail.precision(4);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const Error& e) {
      o.pass = false;
      o.detail << " [error " << error_code_name(e.code()) << ": " << e.what() << "]";
    }
    std::printf("[%s] %2d %-32s%s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
