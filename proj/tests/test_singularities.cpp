#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>

#include "rfk/errors.hpp"
#include "rfk/singularities.hpp"

using namespace rfk;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

// Brute-force expansion of prod (z - r) for the polynomial oracle.
std::vector<cplx> expand(const std::vector<cplx>& roots) {
  std::vector<cplx> p{1.0};
  for (const cplx& r : roots) {
    std::vector<cplx> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] -= r * p[i];
    }
    p = q;
  }
  return p;
}

}  // namespace

TEST_SUITE("singularities") {

TEST_CASE("signature validation") {
  CHECK_NOTHROW(QuotientSignature(1, 2, 1));
  CHECK_NOTHROW(QuotientSignature(3, 1, 0));
  CHECK(code_of([] { QuotientSignature(1, 4, 2); }) == ErrorCode::invalid_signature);
  CHECK(code_of([] { QuotientSignature(0, 2, 1); }) == ErrorCode::invalid_signature);
  CHECK(code_of([] { QuotientSignature(1, 3, 3); }) == ErrorCode::invalid_signature);
  CHECK(code_of([] { QuotientSignature(1, 1, 1); }) == ErrorCode::invalid_signature);
  CHECK(QuotientSignature(2, 3, 2).center_count() == 6);
}

TEST_CASE("polygon (1,2,1) with c = 1 gives centers at a = +-1") {
  const auto cfg = make_polygon_config(QuotientSignature(1, 2, 1), {{1, 0}}, {0});
  REQUIRE(cfg.k() == 2);
  // j = 1: -conj(1) * (-1)^{-1} = 1; j = 2: -1.
  CHECK(std::abs(cfg.centers[0].a - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(cfg.centers[1].a - cplx(-1, 0)) < 1e-15);
}

TEST_CASE("polygon (1,3,1) with c = 1") {
  const auto cfg = make_polygon_config(QuotientSignature(1, 3, 1), {{1, 0}}, {0});
  const cplx rho = std::polar(1.0, 2 * kPi / 3);
  CHECK(std::abs(cfg.centers[0].a + 1.0 / rho) < 1e-14);
  CHECK(std::abs(cfg.centers[1].a + 1.0 / (rho * rho)) < 1e-14);
  CHECK(std::abs(cfg.centers[2].a + 1.0) < 1e-14);
}

TEST_CASE("polygon configurations are Z_n set invariant") {
  const auto c4 = make_polygon_config(QuotientSignature(2, 2, 1), {{1, 0}, {0, 2}}, {0, 1});
  CHECK(c4.k() == 4);
  CHECK(symmetry_residual(c4) < 1e-14);
  for (int n : {2, 3, 5, 7}) {
    for (int m = 1; m < n; ++m) {
      if (std::gcd(m, n) != 1) continue;
      const auto cfg = make_polygon_config(QuotientSignature(2, n, m), {{0.8, 0.3}, {-1.1, 0.6}},
                                           {0.2, -0.4});
      CHECK(symmetry_residual(cfg) < 1e-14);
    }
  }
  const auto moved = perturbed(c4, 0.01, 3);
  CHECK(symmetry_residual(moved) > 1e-3);
}

TEST_CASE("principal root branch") {
  const auto cfg = make_polygon_config(QuotientSignature(1, 4, 1), {std::polar(2.0, 3.0)}, {0});
  const double t = std::arg(cfg.radii[0]);
  CHECK(t >= 0);
  CHECK(t < 2 * kPi / 4);
  CHECK(std::abs(std::pow(cfg.radii[0], 4) - std::pow(std::polar(2.0, 3.0), 4)) < 1e-12);
}

TEST_CASE("configuration errors") {
  CHECK(code_of([] {
          make_polygon_config(QuotientSignature(2, 2, 1), {{1, 0}, {-1, 0}}, {0, 1});
        }) == ErrorCode::singular_fiber);
  CHECK(code_of([] { make_polygon_config(QuotientSignature(1, 2, 1), {{0, 0}}, {0}); }) ==
        ErrorCode::singular_fiber);
  CHECK(code_of([] {
          make_explicit_config({{0, {1, 0}}, {0, {1, 0}}}, QuotientSignature(2, 1, 0));
        }) == ErrorCode::singular_fiber);
  CHECK(code_of([] { make_explicit_config({{0, {1, 0}}}, QuotientSignature(2, 1, 0)); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("defining polynomial") {
  const auto p1 = defining_polynomial(make_polygon_config(QuotientSignature(1, 2, 1), {{1, 0}}, {0}));
  REQUIRE(p1.coefficients.size() == 2);
  CHECK(std::abs(p1.coefficients[0]) < 1e-14);
  CHECK(std::abs(p1.coefficients[1] - cplx(-1, 0)) < 1e-14);

  const auto p3 = defining_polynomial(make_polygon_config(QuotientSignature(1, 3, 1), {{1, 0}}, {0}));
  CHECK(std::abs(p3.coefficients[0]) < 1e-14);
  CHECK(std::abs(p3.coefficients[1]) < 1e-14);
  CHECK(std::abs(p3.coefficients[2] - cplx(-1, 0)) < 1e-14);

  // (z^2 - 1)(z^2 + 4) = z^4 + 3 z^2 - 4
  const auto p4 = defining_polynomial(
      make_polygon_config(QuotientSignature(2, 2, 1), {{1, 0}, {0, 2}}, {0, 1}));
  REQUIRE(p4.coefficients.size() == 4);
  CHECK(std::abs(p4.coefficients[0]) < 1e-12);
  CHECK(std::abs(p4.coefficients[1] - cplx(3, 0)) < 1e-12);
  CHECK(std::abs(p4.coefficients[2]) < 1e-12);
  CHECK(std::abs(p4.coefficients[3] - cplx(-4, 0)) < 1e-12);
}

TEST_CASE("invariant families only have coefficients at multiples of n") {
  const auto cfg = make_polygon_config(QuotientSignature(3, 3, 2),
                                       {{1, 0.2}, {0.4, -1.3}, {-0.9, 0.9}}, {0, 1, 2});
  const auto poly = defining_polynomial(cfg);
  const auto oracle = expand(poly.roots);
  for (std::size_t j = 1; j <= poly.coefficients.size(); ++j) {
    CHECK(std::abs(poly.coefficients[j - 1] - oracle[j]) < 1e-10);
    if (j % 3 != 0) CHECK(std::abs(poly.coefficients[j - 1]) < 1e-12 * 30);
  }
}

TEST_CASE("Hitchin chart action") {
  const GroupElement id{0, 2, 1};
  auto [z0, y0] = apply_action_hitchin(id, {0.3, 0.1}, {2, -1});
  CHECK(z0 == cplx(0.3, 0.1));
  CHECK(y0 == cplx(2, -1));
  const GroupElement g{1, 2, 1};
  auto [z1, y1] = apply_action_hitchin(g, 1.0, 1.0);
  CHECK(std::abs(z1 + 1.0) < 1e-15);
  CHECK(std::abs(y1 + 1.0) < 1e-15);
  const GroupElement g5 = GroupElement::generator(QuotientSignature(1, 5, 2));
  cplx z{0.4, 0.7}, y{-0.2, 1.1};
  for (int i = 0; i < 5; ++i) std::tie(z, y) = apply_action_hitchin(g5, z, y);
  CHECK(std::abs(z - cplx(0.4, 0.7)) < 1e-14);
  CHECK(std::abs(y - cplx(-0.2, 1.1)) < 1e-14);
}

TEST_CASE("Gibbons-Hawking action") {
  const GroupElement g{1, 4, 1};
  const GHCoordinates p = apply_action_gh(g, {0, 0, {1, 0}});
  CHECK(p.theta == doctest::Approx(kPi / 2));
  CHECK(std::abs(p.a - cplx(0, -1)) < 1e-15);
  const GroupElement id{0, 4, 1};
  const GHCoordinates q = apply_action_gh(id, {0.5, 1, {0.2, 0.3}});
  CHECK(q.theta == 0.5);
  CHECK(q.a == cplx(0.2, 0.3));
}

TEST_CASE("orbits off the centers have exactly n points") {
  for (auto [n, m] : {std::pair{3, 1}, {4, 3}, {5, 2}}) {
    const GroupElement g = GroupElement::generator(QuotientSignature(1, n, m));
    GHCoordinates p{0.3, 0.7, {0.4, -0.9}};
    std::set<std::pair<long long, long long>> seen;
    for (int i = 0; i < n; ++i) {
      seen.insert({std::llround(p.theta * 1e9), std::llround(p.a.real() * 1e9)});
      p = apply_action_gh(g, p);
    }
    CHECK(static_cast<int>(seen.size()) == n);
    CHECK(p.theta == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("group law") {
  const GroupElement g{2, 5, 2}, h{4, 5, 2};
  CHECK(g.compose(h).exponent == 1);
  CHECK(g.power(5).is_identity());
  CHECK(g.power(-1).exponent == 3);
  CHECK_THROWS_AS(g.compose(GroupElement{1, 3, 1}), Error);
}

TEST_CASE("Kahler class vectors") {
  const auto flat = make_polygon_config(QuotientSignature(1, 3, 1), {{1, 0}}, {0});
  for (double v : kahler_class(flat).entries) CHECK(v == 0.0);
  const auto two = make_explicit_config({{0, {0, 0}}, {1, {0, 0.5}}}, QuotientSignature(2, 1, 0));
  REQUIRE(kahler_class(two).entries.size() == 1);
  CHECK(kahler_class(two).entries[0] == doctest::Approx(8 * kPi));
  const auto three = make_explicit_config({{0, {0, 0}}, {2, {1, 0}}, {1, {0, 1}}},
                                          QuotientSignature(3, 1, 0));
  const auto e = kahler_class(three).entries;
  CHECK(e[0] == doctest::Approx(8 * kPi));
  CHECK(e[1] == doctest::Approx(8 * kPi));
}

TEST_CASE("Kahler class ignores relabeling within polygon orbits") {
  auto cfg = make_polygon_config(QuotientSignature(2, 3, 1), {{1, 0}, {0.5, 1}}, {0, 1.5});
  const auto base = kahler_class(cfg).entries;
  std::swap(cfg.centers[0], cfg.centers[2]);
  std::swap(cfg.centers[3], cfg.centers[4]);
  CHECK(kahler_class(cfg).entries == base);
}

TEST_CASE("mode parsing") {
  CHECK(Mode::parse("ale") == Mode::ale());
  CHECK(Mode::parse("alf") == Mode::alf());
  CHECK(Mode::parse("akl:12") == Mode::akl(12));
  CHECK(Mode::akl(3).to_string() == "akl:3");
  CHECK(code_of([] { Mode::parse("akl:x"); }) == ErrorCode::parse);
  CHECK(code_of([] { Mode::parse("flat"); }) == ErrorCode::parse);
  CHECK(code_of([] { Mode::parse("akl:0"); }) == ErrorCode::invalid_argument);
}

}  // TEST_SUITE
