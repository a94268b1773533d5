#include <doctest.h>

#include <cmath>
#include <random>

#include "rfk/errors.hpp"
#include "rfk/ghawking.hpp"

using namespace rfk;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

CenterConfiguration origin(Mode mode = Mode::ale()) {
  return make_explicit_config({{0, {0, 0}}}, QuotientSignature(1, 1, 0), mode);
}

CenterConfiguration three_gon(Mode mode = Mode::ale()) {
  return make_polygon_config(QuotientSignature(1, 3, 1), {{1, 0.2}}, {0.1}, mode);
}

// Random point with |a - a_i| > 0.2 for every center (off strings).
GHPoint random_point(std::mt19937_64& gen, const CenterConfiguration& cfg, double r = 2.0) {
  std::uniform_real_distribution<double> u(-r, r), th(0, 6.28);
  for (;;) {
    const GHPoint p{th(gen), u(gen), {u(gen), u(gen)}};
    bool ok = true;
    for (const auto& c : cfg.centers) ok = ok && std::abs(p.a - c.a) > 0.2;
    if (ok) return p;
  }
}

ChartPoint base_chart(const BasePoint& x) { return {{0, x.b, x.a.real(), x.a.imag()}}; }
BasePoint base_of(const ChartPoint& p) { return {p.coords[1], {p.coords[2], p.coords[3]}}; }

double max_abs3(const Tensor3& t) {
  double m = 0;
  for (const auto& a : t) m = std::max(m, max_abs(a));
  return m;
}

}  // namespace

TEST_SUITE("ghawking") {

TEST_CASE("potential values") {
  const GibbonsHawking ale(origin()), alf(origin(Mode::alf()));
  CHECK(ale.potential_at({1, {0, 0}}).V == doctest::Approx(0.5));
  CHECK(ale.potential_at({0, {0, 1}}).V == doctest::Approx(0.5));
  CHECK(alf.potential_at({1, {0, 0}}).V == doctest::Approx(1.5));
  CHECK(code_of([&] { ale.potential_at({0, {0, 0}}); }) == ErrorCode::pole);
  CHECK(ale.potential_at({1e6, {0, 0}}).V < 1e-6);
  CHECK(alf.potential_at({1e6, {0, 0}}).V == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("potential gradient matches finite differences") {
  const auto cfg = three_gon();
  const GibbonsHawking gh(cfg);
  std::mt19937_64 gen(4);
  for (int i = 0; i < 10; ++i) {
    const GHPoint p = random_point(gen, cfg);
    const BasePoint x{p.b, p.a};
    auto V = [&](const ChartPoint& q) { return gh.potential_at(base_of(q)).V; };
    const auto grad = gh.potential_at(x).grad;
    for (int k = 0; k < 3; ++k) {
      MultiIndex mi{};
      mi[k + 1] = 1;
      CHECK(differentiate_field(V, base_chart(x), mi, 1e-4) ==
            doctest::Approx(grad[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("V is harmonic off the centers in every mode") {
  for (Mode mode : {Mode::ale(), Mode::alf()}) {
    const auto cfg = three_gon(mode);
    const GibbonsHawking gh(cfg);
    std::mt19937_64 gen(6);
    for (int i = 0; i < 10; ++i) {
      const GHPoint p = random_point(gen, cfg);
      auto V = [&](const ChartPoint& q) { return gh.potential_at(base_of(q)).V; };
      double lap = 0;
      for (int k = 1; k < 4; ++k) {
        MultiIndex mi{};
        mi[k] = 2;
        lap += differentiate_field(V, base_chart({p.b, p.a}), mi, 1e-3);
      }
      CHECK(std::abs(lap) < 1e-7 * gh.potential_at({p.b, p.a}).V);
    }
  }
}

TEST_CASE("connection: boundedness above the string and error cases") {
  const GibbonsHawking gh(origin());
  const auto al = gh.connection_at({1.0, {1e-10, 0}}).alpha;
  CHECK(std::abs(al[1]) < 1.0);
  CHECK(std::abs(al[2]) < 1.0);
  CHECK(code_of([&] { gh.connection_at({-1.0, {0, 0}}); }) == ErrorCode::dirac_string);
  CHECK(code_of([&] { gh.connection_at({0.0, {0, 0}}); }) == ErrorCode::pole);
  GHOptions up;
  up.gauge = StringGauge::above;
  const GibbonsHawking above(origin(), up);
  CHECK_NOTHROW(above.connection_at({-1.0, {0, 0}}));
  CHECK(code_of([&] { above.connection_at({1.0, {0, 0}}); }) == ErrorCode::dirac_string);
}

TEST_CASE("d alpha = -*dV with the implemented sign, in both gauges") {
  const auto cfg = make_polygon_config(QuotientSignature(1, 3, 2), {{0.9, -0.3}}, {0.4});
  for (StringGauge gauge : {StringGauge::below, StringGauge::above}) {
    GHOptions o;
    o.gauge = gauge;
    const GibbonsHawking gh(cfg, o);
    std::mt19937_64 gen(13);
    for (int i = 0; i < 50; ++i) {
      const GHPoint p = random_point(gen, cfg);
      auto alpha = [&](const ChartPoint& q) { return gh.connection_at(base_of(q)).alpha; };
      const ChartPoint c = base_chart({p.b, p.a});
      const auto db = differentiate_field(alpha, c, {0, 1, 0, 0}, 1e-4);
      const auto da1 = differentiate_field(alpha, c, {0, 0, 1, 0}, 1e-4);
      const auto da2 = differentiate_field(alpha, c, {0, 0, 0, 1}, 1e-4);
      // components along (da1∧da2, da2∧db, db∧da1)
      const std::array<double, 3> dalpha{da1[2] - da2[1], -db[2], db[1]};
      const auto star = gh.star_dV({p.b, p.a});
      for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(dalpha[k] + star[k]) < 1e-7 * std::max(1.0, std::abs(star[k])));
      }
    }
  }
}

TEST_CASE("adding a closed term (1/2) d phi changes alpha but not d alpha") {
  const cplx ai{0.7, -0.4};
  auto dphi = [&](const ChartPoint& q) {
    const cplx w = cplx{q.coords[2], q.coords[3]} - ai;
    const double r2 = std::norm(w);
    return std::array<double, 2>{-0.5 * w.imag() / r2, 0.5 * w.real() / r2};
  };
  const ChartPoint c{{0, 0.3, 1.4, 0.6}};
  const auto d1 = differentiate_field(dphi, c, {0, 0, 1, 0}, 1e-4);
  const auto d2 = differentiate_field(dphi, c, {0, 0, 0, 1}, 1e-4);
  CHECK(std::abs(d1[1] - d2[0]) < 1e-9);
}

TEST_CASE("metric determinant is V^2") {
  const auto cfg = three_gon();
  const GibbonsHawking gh(cfg);
  std::mt19937_64 gen(8);
  for (int i = 0; i < 20; ++i) {
    const GHPoint p = random_point(gen, cfg);
    const double V = gh.potential_at({p.b, p.a}).V;
    CHECK(determinant(gh.metric_at(p).g) == doctest::Approx(V * V).epsilon(1e-13));
  }
}

TEST_CASE("single center: flat in ALE, curved and Ricci-flat in ALF") {
  const auto flat_cfg = origin();
  const GibbonsHawking flat(flat_cfg);
  std::mt19937_64 gen(3);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const GHPoint p = random_point(gen, flat_cfg);
    worst = std::max(worst, curvature_at(flat.metric_field(), GibbonsHawking::to_chart(p),
                                         flat.steps_at(p))
                                .riem_norm_sq);
  }
  CHECK(worst < 1e-8);

  const GibbonsHawking tn(origin(Mode::alf()));
  const GHPoint p{0.4, 0.6, {0.8, 0.0}};  // |x| = 1
  const CurvatureBundle c = curvature_at(tn.metric_field(), GibbonsHawking::to_chart(p), tn.steps_at(p));
  CHECK(c.riem_norm_sq > 1e-3);
  CHECK(c.ricci_norm / std::max(std::sqrt(c.riem_norm_sq), 1.0) < 5e-5);
}

TEST_CASE("complex structure, Kahler form and integrability") {
  const std::vector<CenterConfiguration> cases{
      make_explicit_config({{0, {1, 0}}, {0, {-1, 0}}}, QuotientSignature(2, 1, 0)),
      make_explicit_config({{0, {1, 0}}, {0, {-1, 0}}}, QuotientSignature(2, 1, 0), Mode::alf()),
      three_gon(), three_gon(Mode::alf())};
  Mat4 minus_id = identity4();
  for (auto& r : minus_id)
    for (double& v : r) v = -v;
  for (const auto& cfg : cases) {
    const GibbonsHawking gh(cfg);
    std::mt19937_64 gen(17);
    for (int i = 0; i < 8; ++i) {
      const GHPoint p = random_point(gen, cfg);
      const Mat4 g = gh.metric_at(p).g, J = gh.complex_structure_at(p).J;
      const Mat4 w = gh.kahler_form_at(p).omega;
      CHECK(max_abs_diff(multiply(J, J), minus_id) < 1e-12);
      CHECK(hermitian_residual(g, J) < 1e-12);
      CHECK(compatibility_residual(g, J, w) < 1e-12);
      // ω∧ω = 2 Pf(ω) d^4x and the volume form is V d^4x.
      const double pf = w[0][1] * w[2][3] - w[0][2] * w[1][3] + w[0][3] * w[1][2];
      CHECK(pf == doctest::Approx(gh.potential_at({p.b, p.a}).V).epsilon(1e-10));
      const ChartPoint c = GibbonsHawking::to_chart(p);
      const NijenhuisSample n = nijenhuis_at(gh.complex_structure_field(), c, gh.steps_at(p));
      CHECK(max_abs3(n.n) < 1e-6 * std::max(1.0, n.term_scale));
      const ThreeFormSample d = exterior_derivative(gh.kahler_form_field(), c, gh.steps_at(p));
      for (double v : d.components) CHECK(std::abs(v) < 1e-7 * std::max(1.0, d.term_scale));
    }
  }
}

TEST_CASE("curvature scalars do not depend on the string gauge") {
  const auto cfg = make_polygon_config(QuotientSignature(2, 2, 1), {{1, 0}, {0.5, 1.2}}, {0, 1});
  GHOptions up;
  up.gauge = StringGauge::above;
  const GibbonsHawking below(cfg), above(cfg, up);
  std::mt19937_64 gen(19);
  for (int i = 0; i < 10; ++i) {
    const GHPoint p = random_point(gen, cfg);
    const ChartPoint c = GibbonsHawking::to_chart(p);
    const auto cb = curvature_at(below.metric_field(), c, below.steps_at(p));
    const auto ca = curvature_at(above.metric_field(), c, above.steps_at(p));
    CHECK(ca.riem_norm_sq == doctest::Approx(cb.riem_norm_sq).epsilon(1e-7));
    CHECK(std::abs(ca.ricci_norm - cb.ricci_norm) < 1e-6 * std::max(1.0, std::sqrt(cb.riem_norm_sq)));
  }
  CHECK(above.cycle_period(0, 2) == doctest::Approx(below.cycle_period(0, 2)).epsilon(1e-9));
}

TEST_CASE("square potential breaks Ricci-flatness") {
  const auto cfg = make_explicit_config({{0, {1, 0}}, {0, {-1, 0}}}, QuotientSignature(2, 1, 0));
  GHOptions o;
  o.square_potential = true;
  const GibbonsHawking bad(cfg, o);
  const GHPoint p{0.2, 0.4, {0.3, 0.9}};
  const auto c = curvature_at(bad.metric_field(), GibbonsHawking::to_chart(p), bad.steps_at(p));
  CHECK(c.ricci_norm / std::max(std::sqrt(c.riem_norm_sq), 1.0) > 1e-2);
}

TEST_CASE("quotient invariance and its negative control") {
  const auto a1 = make_polygon_config(QuotientSignature(1, 2, 1), {{0.7, 0.4}}, {0});
  CHECK(GibbonsHawking(a1).quotient_invariance_residual(GroupElement::generator(a1.signature), 100) < 1e-10);
  const auto c6 = make_polygon_config(QuotientSignature(2, 3, 2), {{1, 0}, {0, 1.5}}, {0, 0.8});
  const GroupElement g6 = GroupElement::generator(c6.signature);
  CHECK(GibbonsHawking(c6).quotient_invariance_residual(g6, 100) < 1e-10);
  CHECK(GibbonsHawking(perturbed(c6, 0.01, 7)).quotient_invariance_residual(g6, 100) > 1e-3);
  CHECK(code_of([] {
          GibbonsHawking(origin()).quotient_invariance_residual(GroupElement{0, 1, 0}, 10);
        }) == ErrorCode::invalid_argument);
}

TEST_CASE("cycle periods") {
  const GibbonsHawking plane(three_gon());
  CHECK(std::abs(plane.cycle_period(0, 1)) < 1e-8);
  const auto stacked = make_explicit_config({{0, {0.3, 0}}, {1, {0.3, 0}}, {3, {0.3, 0}}},
                                            QuotientSignature(3, 1, 0));
  const GibbonsHawking gh(stacked);
  const double c01 = gh.cycle_period(0, 1) / 1.0;
  const double c12 = gh.cycle_period(1, 2) / 2.0;
  CHECK(std::abs(c01 - c12) < 1e-3 * std::abs(c01));
  CHECK(gh.cycle_period(1, 0) == doctest::Approx(-gh.cycle_period(0, 1)));
  CHECK(code_of([&] { gh.cycle_period(0, 2); }) == ErrorCode::path);
  CHECK(code_of([&] { gh.cycle_period(0, 0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("volume growth exponents") {
  const auto k2 = make_explicit_config({{0, {1, 0}}, {0, {-1, 0}}}, QuotientSignature(2, 1, 0));
  const VolumeGrowth ale = volume_growth_fit(GibbonsHawking(k2), default_volume_radii(k2));
  CHECK(ale.fit.slope > 3.9);
  CHECK(ale.fit.slope < 4.1);
  const auto tn = origin(Mode::alf());
  const VolumeGrowth alf = volume_growth_fit(GibbonsHawking(tn), default_volume_radii(tn));
  CHECK(alf.fit.slope > 2.9);
  CHECK(alf.fit.slope < 3.1);
  const auto one = origin();
  const VolumeGrowth flat = volume_growth_fit(GibbonsHawking(one), default_volume_radii(one));
  CHECK(std::abs(flat.fit.slope - 4.0) < 0.05);
  // Flat R^4: Vol = 2π ∫ V d^3x = 2π^2 R^2 and ρ = sqrt(2R), so Vol = π^2 ρ^4 / 2.
  const double rho = flat.geodesic_radii.back();
  CHECK(flat.volumes.back() == doctest::Approx(std::pow(M_PI, 2) * std::pow(rho, 4) / 2).epsilon(1e-6));
  const std::vector<double> narrow{100, 120, 140, 160};
  CHECK(code_of([&] { volume_growth_fit(GibbonsHawking(k2), narrow); }) == ErrorCode::fit_domain);
}

TEST_CASE("AKL truncations converge under the comparison bound") {
  const auto cfg = make_akl_config(2, 1, 200);
  const AklConvergence a = akl_convergence(cfg, {0.0, {0.1, 0.0}});
  REQUIRE(a.partial.size() == 200);
  CHECK(a.monotone_from_10);
  CHECK(a.tail_respected);
  for (std::size_t J = 0; J + 1 < a.partial.size(); ++J) {
    CHECK(a.partial.back() - a.partial[J] <= a.tail_bound[J] * (1 + 1e-12));
    CHECK(a.partial[J + 1] >= a.partial[J]);
  }
  // Independent recomputation of V_J at J = 5 from the polygon vertices.
  double v5 = 0;
  for (int j = 1; j <= 5; ++j)
    for (int v = 1; v <= 2; ++v) {
      const cplx c = -static_cast<double>(j * j) * std::pow(cplx{-1, 0}, -v);
      v5 += 0.5 / std::abs(cplx{0.1, 0} - c);
    }
  CHECK(a.partial[4] == doctest::Approx(v5).epsilon(1e-13));
  CHECK(code_of([] { akl_convergence(origin(), {0.0, {0.1, 0}}); }) == ErrorCode::not_applicable);
}

}  // TEST_SUITE
