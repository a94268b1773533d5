#include "rfk/ghawking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rfk/errors.hpp"

namespace rfk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = std::numbers::pi * 0.7639320225002102;  // π (3 - √5)

bool finite(const BasePoint& x) {
  return std::isfinite(x.b) && std::isfinite(x.a.real()) && std::isfinite(x.a.imag());
}

double distance_to_segment(const Center& p, const Center& q, const Center& c) {
  const double db = q.b - p.b;
  const cplx da = q.a - p.a;
  const double len2 = db * db + std::norm(da);
  double t = ((c.b - p.b) * db + std::real((c.a - p.a) * std::conj(da))) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(c.b - (p.b + t * db), std::abs(c.a - (p.a + t * da)));
}

}  // namespace

GibbonsHawking::GibbonsHawking(CenterConfiguration config, GHOptions opts)
    : config_(std::move(config)), opts_(opts) {
  if (config_.k() < 1) fail(ErrorCode::invalid_argument, "gibbons-hawking: no centers");
  if (config_.k() >= 2 &&
      min_center_separation(config_) <= 1e-12 * std::max(1.0, config_.extent())) {
    fail(ErrorCode::singular_fiber, "gibbons-hawking: coincident centers");
  }
  if (!(opts_.step_fraction > 0)) {
    fail(ErrorCode::invalid_argument, "gibbons-hawking: step fraction must be positive");
  }
}

void GibbonsHawking::check_base(const BasePoint& x) const {
  if (!finite(x)) fail(ErrorCode::invalid_argument, "gibbons-hawking: non-finite point");
}

double GibbonsHawking::potential_value(const BasePoint& x) const {
  double s = 0;
  for (const auto& c : config_.centers) {
    const double d = std::hypot(x.b - c.b, std::abs(x.a - c.a));
    if (d == 0) fail(ErrorCode::pole, "potential: evaluated at a center");
    s += 1.0 / d;
  }
  return 0.5 * s + (config_.mode.kind == ModeKind::alf ? 1.0 : 0.0);
}

PotentialValue GibbonsHawking::potential_at(const BasePoint& x) const {
  check_base(x);
  PotentialValue out;
  out.V = potential_value(x);
  for (const auto& c : config_.centers) {
    const double t = x.b - c.b;
    const cplx w = x.a - c.a;
    const double d = std::hypot(t, std::abs(w));
    const double d3 = d * d * d;
    out.grad[0] -= 0.5 * t / d3;
    out.grad[1] -= 0.5 * w.real() / d3;
    out.grad[2] -= 0.5 * w.imag() / d3;
  }
  return out;
}

std::array<double, 3> GibbonsHawking::star_dV(const BasePoint& x) const {
  return potential_at(x).grad;
}

ConnectionValue GibbonsHawking::connection_at(const BasePoint& x) const {
  check_base(x);
  ConnectionValue out;
  for (const auto& c : config_.centers) {
    const double t = x.b - c.b;
    const cplx w = x.a - c.a;
    const double r = std::abs(w);
    const double d = std::hypot(t, r);
    if (d == 0) fail(ErrorCode::pole, "connection: evaluated at a center");
    // coefficient of (Re w da2 - Im w da1) in the i-th term
    double coef;
    const bool regular_side = opts_.gauge == StringGauge::below ? t > 0 : t < 0;
    if (regular_side) {
      coef = opts_.gauge == StringGauge::below ? 0.5 / (d * (d + t)) : -0.5 / (d * (d - t));
    } else {
      if (r <= 1e-14 * (1.0 + std::abs(x.a) + std::abs(c.a))) {
        fail(ErrorCode::dirac_string, "connection: evaluated on a Dirac string");
      }
      coef = opts_.gauge == StringGauge::below ? 0.5 * (d - t) / (d * r * r)
                                               : -0.5 * (d + t) / (d * r * r);
    }
    out.alpha[1] -= coef * w.imag();
    out.alpha[2] += coef * w.real();
  }
  return out;
}

MetricSample GibbonsHawking::metric_at(const GHPoint& p) const {
  const BasePoint x{p.b, p.a};
  double V = potential_at(x).V;
  if (opts_.square_potential) V *= V;
  const auto al = connection_at(x).alpha;
  const Vec4 eta{1.0, 0.0, al[1], al[2]};
  MetricSample out;
  out.point = to_chart(p);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      double v = eta[i] * eta[j] / V;
      if (i == j && i > 0) v += V;
      out.g[i][j] = out.g[j][i] = v;
    }
  return out;
}

ComplexStructureSample GibbonsHawking::complex_structure_at(const GHPoint& p) const {
  const BasePoint x{p.b, p.a};
  double V = potential_at(x).V;
  if (opts_.square_potential) V *= V;
  const auto al = connection_at(x).alpha;
  const double sv = std::sqrt(V);
  // Columns of E are the orthonormal frame vectors, rows of Einv the coframe.
  Mat4 E{}, Einv{};
  E[0][0] = sv;
  E[1][1] = 1.0 / sv;
  E[2][2] = 1.0 / sv;
  E[0][2] = -al[1] / sv;
  E[3][3] = 1.0 / sv;
  E[0][3] = -al[2] / sv;
  Einv[0] = {1.0 / sv, 0.0, al[1] / sv, al[2] / sv};
  Einv[1][1] = Einv[2][2] = Einv[3][3] = sv;
  Mat4 Jf{};
  Jf[1][0] = 1.0;
  Jf[0][1] = -1.0;
  Jf[3][2] = 1.0;
  Jf[2][3] = -1.0;
  ComplexStructureSample out;
  out.point = to_chart(p);
  out.J = multiply(multiply(E, Jf), Einv);
  return out;
}

TwoFormSample GibbonsHawking::kahler_form_at(const GHPoint& p) const {
  const BasePoint x{p.b, p.a};
  double V = potential_at(x).V;
  if (opts_.square_potential) V *= V;
  const auto al = connection_at(x).alpha;
  TwoFormSample out;
  out.point = to_chart(p);
  auto set = [&](int i, int j, double v) {
    out.omega[i][j] = v;
    out.omega[j][i] = -v;
  };
  set(0, 1, 1.0);
  set(2, 1, al[1]);
  set(3, 1, al[2]);
  set(2, 3, V);
  return out;
}

Vec4 GibbonsHawking::steps_at(const GHPoint& p) const {
  double l = INFINITY;
  for (const auto& c : config_.centers) {
    const double r = std::abs(p.a - c.a);
    l = std::min(l, r > 0 ? r : std::hypot(p.b - c.b, r));
  }
  if (!(l > 0)) fail(ErrorCode::pole, "gibbons-hawking: point at a center");
  const double h = opts_.step_fraction * l;
  return {opts_.step_fraction, h, h, h};
}

GHPoint GibbonsHawking::from_chart(const ChartPoint& p) {
  return {p.coords[0], p.coords[1], {p.coords[2], p.coords[3]}};
}

ChartPoint GibbonsHawking::to_chart(const GHPoint& p) {
  return {{p.theta, p.b, p.a.real(), p.a.imag()}, ChartId::gh_theta_b_a};
}

MetricField GibbonsHawking::metric_field() const {
  return [this](const ChartPoint& q) { return metric_at(from_chart(q)); };
}

TwoFormField GibbonsHawking::kahler_form_field() const {
  return [this](const ChartPoint& q) { return kahler_form_at(from_chart(q)); };
}

ComplexStructureField GibbonsHawking::complex_structure_field() const {
  return [this](const ChartPoint& q) { return complex_structure_at(from_chart(q)); };
}

double GibbonsHawking::cycle_period(int i, int j) const {
  const int k = config_.k();
  if (i < 0 || j < 0 || i >= k || j >= k || i == j) {
    fail(ErrorCode::invalid_argument, "cycle_period: need two distinct center indices");
  }
  const Center& p = config_.centers[i];
  const Center& q = config_.centers[j];
  const double len = std::hypot(q.b - p.b, std::abs(q.a - p.a));
  for (int c = 0; c < k; ++c) {
    if (c == i || c == j) continue;
    if (distance_to_segment(p, q, config_.centers[c]) <= 1e-9 * len) {
      std::ostringstream os;
      os << "cycle_period: segment " << i << "-" << j << " passes through center " << c;
      fail(ErrorCode::path, os.str());
    }
  }
  // Surface (θ, t) -> (θ, x_i + t (x_j - x_i)). The pulled-back integrand is
  // ω_K(∂θ, ∂t); row 0 of ω_K is db in every gauge, and V da1∧da2 vanishes on
  // ∂θ, so it equals the b-velocity of the segment.
  const double xdot_b = q.b - p.b;
  auto fiber = [&](double) {
    return adaptive_simpson([&](double) { return xdot_b; }, 0.0, kTwoPi);
  };
  return adaptive_simpson(fiber, 1e-12, 1.0 - 1e-12) / (1.0 - 2e-12);
}

double GibbonsHawking::quotient_invariance_residual(const GroupElement& gel,
                                                    int sample_count,
                                                    std::uint64_t seed) const {
  if (gel.n < 2) {
    fail(ErrorCode::invalid_argument, "invariance: the group is trivial for n = 1");
  }
  if (sample_count < 1) fail(ErrorCode::invalid_argument, "invariance: no samples");
  const cplx rot = apply_action_gh(gel, {0.0, 0.0, {1.0, 0.0}}).a;
  Mat4 phi = identity4();
  phi[2][2] = rot.real();
  phi[2][3] = -rot.imag();
  phi[3][2] = rot.imag();
  phi[3][3] = rot.real();

  const double s = std::max(1.0, config_.extent());
  const double r0 = 0.5 * s, r1 = 3.0 * s;
  auto clear = [&](double b, cplx a) {
    for (const auto& c : config_.centers) {
      if (std::abs(a - c.a) < 0.05) return false;
      if (std::hypot(b - c.b, std::abs(a - c.a)) < 0.05) return false;
    }
    return true;
  };
  HaltonStream stream(4, seed);
  double worst = 0;
  int used = 0;
  for (int attempt = 0; used < sample_count && attempt < 100 * sample_count; ++attempt) {
    const auto u = stream.next();
    const double r = std::cbrt(r0 * r0 * r0 + u[0] * (r1 * r1 * r1 - r0 * r0 * r0));
    const double ct = 2.0 * u[1] - 1.0, st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double ph = kTwoPi * u[2];
    const GHPoint p{kTwoPi * u[3], r * ct, r * st * cplx{std::cos(ph), std::sin(ph)}};
    const GHCoordinates img = apply_action_gh(gel, {p.theta, p.b, p.a});
    if (!clear(p.b, p.a) || !clear(img.b, img.a)) continue;
    const Mat4 g = metric_at(p).g;
    const Mat4 gi = metric_at({img.theta, img.b, img.a}).g;
    const Mat4 pulled = multiply(multiply(transpose(phi), gi), phi);
    worst = std::max(worst, max_abs_diff(pulled, g) / max_abs(g));
    ++used;
  }
  if (used == 0) fail(ErrorCode::scan, "invariance: no admissible sample points");
  return worst;
}

std::vector<double> default_volume_radii(const CenterConfiguration& config, int count) {
  if (count < 4) fail(ErrorCode::invalid_argument, "volume radii: need at least 4");
  const double s = std::max(1.0, config.extent());
  const bool alf = config.mode.kind == ModeKind::alf;
  const double lo = (alf ? 1e3 : 1e4) * s, hi = (alf ? 2e4 : 2e6) * s;
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i) {
    r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return r;
}

VolumeGrowth volume_growth_fit(const GibbonsHawking& gh,
                               std::span<const double> coordinate_radii) {
  std::vector<double> radii(coordinate_radii.begin(), coordinate_radii.end());
  if (radii.size() < 4) fail(ErrorCode::fit_domain, "volume growth: need at least 4 radii");
  std::sort(radii.begin(), radii.end());
  if (!(radii.front() > 0)) fail(ErrorCode::fit_domain, "volume growth: radii must be positive");

  const CenterConfiguration& cfg = gh.config();
  const double offset = cfg.mode.kind == ModeKind::alf ? 1.0 : 0.0;
  std::vector<double> norms;
  for (const auto& c : cfg.centers) norms.push_back(std::hypot(c.b, std::abs(c.a)));
  // Shell average of V by the mean-value property of 1/|x - x_i|.
  auto shell = [&](double r) {
    double s = 0;  // r^2 times the shell average
    for (double n : norms) s += r >= n ? r : r * r / n;
    return 4.0 * std::numbers::pi * (0.5 * s + offset * r * r);
  };
  auto integrate_split = [&](double a, double b) {
    std::vector<double> cuts{a};
    for (double n : norms)
      if (n > a && n < b) cuts.push_back(n);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    double total = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] > cuts[i]) total += adaptive_simpson(shell, cuts[i], cuts[i + 1]);
    }
    return total;
  };

  constexpr int kRays = 6;
  std::array<std::array<double, 3>, kRays> rays;
  for (int d = 0; d < kRays; ++d) {
    const double ct = -0.8 + 1.6 * (d + 0.5) / kRays, st = std::sqrt(1.0 - ct * ct);
    const double ph = 0.7 + kGolden * d;
    rays[d] = {ct, st * std::cos(ph), st * std::sin(ph)};
  }
  // ∫ sqrt(V) dr along a ray with r = s^2, which removes the r^{-1/2}
  // endpoint behaviour when a center sits at the origin.
  auto ray_length = [&](const std::array<double, 3>& u, double r_a, double r_b) {
    auto f = [&](double s) {
      const double r = s * s;
      if (r == 0) return 0.0;
      const BasePoint x{r * u[0], {r * u[1], r * u[2]}};
      return 2.0 * s * std::sqrt(gh.potential_at(x).V);
    };
    return adaptive_simpson(f, std::sqrt(r_a), std::sqrt(r_b));
  };

  VolumeGrowth out;
  out.coordinate_radii = radii;
  double vol = 0, prev = 0;
  std::array<double, kRays> len{};
  for (double R : radii) {
    vol += 2.0 * std::numbers::pi * integrate_split(prev, R);
    double mean = 0;
    for (int d = 0; d < kRays; ++d) {
      len[d] += ray_length(rays[d], prev, R);
      mean += len[d];
    }
    out.volumes.push_back(vol);
    out.geodesic_radii.push_back(mean / kRays);
    prev = R;
  }
  out.fit = fit_loglog(out.geodesic_radii, out.volumes);
  return out;
}

AklConvergence akl_convergence(const CenterConfiguration& cfg, const BasePoint& x) {
  if (cfg.mode.kind != ModeKind::akl) {
    fail(ErrorCode::not_applicable, "akl: configuration is not in akl mode");
  }
  const int n = cfg.signature.n(), j_max = cfg.mode.akl_j_max;
  if (cfg.k() != n * j_max) fail(ErrorCode::invalid_argument, "akl: center count mismatch");
  AklConvergence out;
  double V = 0;
  for (int j = 1; j <= j_max; ++j) {
    double inc = 0;
    for (int v = 0; v < n; ++v) {
      const Center& c = cfg.centers[static_cast<std::size_t>(j - 1) * n + v];
      const double d = std::hypot(x.b - c.b, std::abs(x.a - c.a));
      if (d == 0) fail(ErrorCode::pole, "akl: test point at a center");
      inc += 0.5 / d;
    }
    V += inc;
    out.partial.push_back(V);
    if (j >= 2) out.increments.push_back(inc);
  }
  const double ax = std::abs(x.a);
  out.tail_bound.assign(j_max, 0.0);
  double tail = 0;
  for (int j = j_max; j >= 1; --j) {
    out.tail_bound[j - 1] = tail;
    const double jj = static_cast<double>(j) * j;
    tail += jj > ax ? n / (2.0 * (jj - ax)) : INFINITY;
  }
  for (int J = 1; J <= j_max; ++J) {
    const double diff = out.partial.back() - out.partial[J - 1];
    if (!(std::abs(diff) <= out.tail_bound[J - 1] * (1 + 1e-12) + 1e-15)) {
      out.tail_respected = false;
    }
  }
  // increments[i] belongs to J = i + 2
  for (std::size_t i = 1; i < out.increments.size(); ++i) {
    if (static_cast<int>(i) + 1 >= 10 && !(out.increments[i] < out.increments[i - 1])) {
      out.monotone_from_10 = false;
    }
  }
  return out;
}

}  // namespace rfk
