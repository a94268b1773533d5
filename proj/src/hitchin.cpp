#include "rfk/hitchin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rfk/errors.hpp"

namespace rfk {

namespace {

constexpr cplx kI{0.0, 1.0};

// (b - b_i) + Δ_i without cancellation when b < b_i.
double height_factor(double t, double r2) {
  const double delta = std::sqrt(t * t + r2);
  return t >= 0 ? t + delta : r2 / (delta - t);
}

}  // namespace

HitchinMetric::HitchinMetric(CenterConfiguration config, HitchinOptions opts)
    : config_(std::move(config)), opts_(opts) {
  if (config_.mode.kind != ModeKind::ale) {
    fail(ErrorCode::not_applicable,
         "hitchin: the twistor chart metric is only defined in ale mode");
  }
  if (config_.k() < 1) fail(ErrorCode::invalid_argument, "hitchin: no centers");
  if (config_.k() >= 2 &&
      min_horizontal_separation(config_) <= 1e-12 * std::max(1.0, config_.extent())) {
    fail(ErrorCode::singular_fiber,
         "hitchin: centers with equal a give a singular fiber over u = 0");
  }
  if (!(opts_.y_floor > 0) || !(opts_.solver_tol > 0) || opts_.max_iterations < 1 ||
      !(opts_.step_fraction > 0)) {
    fail(ErrorCode::invalid_argument, "hitchin: invalid options");
  }
}

double HitchinMetric::log_height_product(cplx z, double b) const {
  double s = 0;
  for (const auto& c : config_.centers) {
    const double x = b - c.b, r = std::abs(std::conj(z) + c.a);
    // log(x + sqrt(x^2 + r^2)) = log r + asinh(x / r) keeps full relative
    // precision where the factor is close to 1.
    if (r > 0 && std::abs(x) < 1e300 * r) {
      s += std::log(r) + std::asinh(x / r);
    } else {
      s += std::log(height_factor(x, std::norm(std::conj(z) + c.a)));
    }
  }
  return s;
}

ImplicitSolution HitchinMetric::solve_b(cplx z, double y_abs_sq) const {
  if (!(y_abs_sq > 0) || !std::isfinite(y_abs_sq)) {
    std::ostringstream os;
    os << "solve_b: |y|^2 must be positive and finite (got " << y_abs_sq << ")";
    fail(ErrorCode::domain, os.str());
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    fail(ErrorCode::domain, "solve_b: non-finite z");
  }
  const double target = std::log(y_abs_sq);
  auto F = [&](double b) { return log_height_product(z, b) - target; };
  auto slope = [&](double b) {
    double g = 0;
    for (const auto& c : config_.centers) {
      g += 1.0 / std::hypot(b - c.b, std::abs(std::conj(z) + c.a));
    }
    return g;
  };

  double bmin = config_.centers.front().b, bmax = bmin, sum_abs = 0;
  for (const auto& c : config_.centers) {
    bmin = std::min(bmin, c.b);
    bmax = std::max(bmax, c.b);
    sum_abs += std::abs(c.b);
  }
  double span = y_abs_sq + 1.0 + sum_abs;
  double lo = bmin - span, hi = bmax + span;
  int expansions = 0;
  while (!(F(lo) < 0)) {
    lo = bmin - (span *= 2);
    if (++expansions > 2000) fail(ErrorCode::convergence, "solve_b: lower bracket failed");
  }
  span = y_abs_sq + 1.0 + sum_abs;
  while (!(F(hi) > 0)) {
    hi = bmax + (span *= 2);
    if (++expansions > 4000) fail(ErrorCode::convergence, "solve_b: upper bracket failed");
  }

  // Bisection until the bracket is moderately tight, then safeguarded Newton.
  int it = 0;
  double b = 0.5 * (lo + hi);
  while (it < opts_.max_iterations &&
         hi - lo > 1e-3 * std::max({1.0, std::abs(lo), std::abs(hi)})) {
    ++it;
    (F(b) < 0 ? lo : hi) = b;
    b = 0.5 * (lo + hi);
  }
  for (; it < opts_.max_iterations; ++it) {
    const double f = F(b);
    if (f == 0) break;
    (f < 0 ? lo : hi) = b;
    const double g = slope(b);
    double next = b - f / g;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    const double moved = std::abs(next - b);
    b = next;
    if (moved <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b)) ||
        hi - lo <= 4 * std::numeric_limits<double>::epsilon() *
                       std::max({1e-300, std::abs(lo), std::abs(hi)})) {
      break;
    }
  }

  // Newton stops within a few ulp of the root (in absolute terms near b = 0);
  // polish while |F| strictly decreases, then settle on the neighbouring
  // double with the smallest |F|.
  double fb = std::abs(F(b));
  for (int polish = 0; polish < 8 && fb > 0; ++polish) {
    const double c = b - F(b) / slope(b);
    const double fc = std::abs(F(c));
    if (!(fc < fb)) break;
    b = c;
    fb = fc;
  }
  for (const double toward : {INFINITY, -INFINITY}) {
    for (int step = 0; step < 16 && fb > 0; ++step) {
      const double c = std::nextafter(b, toward);
      const double fc = std::abs(F(c));
      if (!(fc < fb)) break;
      b = c;
      fb = fc;
    }
  }

  ImplicitSolution out;
  out.b = b;
  out.iterations = it;
  out.residual = std::abs(std::expm1(F(b)));
  if (!(out.residual <= std::max(opts_.solver_tol, 1e-12))) {
    std::ostringstream os;
    os << "solve_b: residual " << out.residual << " after " << it << " iterations";
    fail(ErrorCode::convergence, os.str());
  }
  out.delta_list.reserve(config_.centers.size());
  for (const auto& c : config_.centers) {
    out.delta_list.push_back(std::hypot(b - c.b, std::abs(std::conj(z) + c.a)));
  }
  return out;
}

double HitchinMetric::gamma(cplx z, double b) const {
  double g = 0;
  for (const auto& c : config_.centers) {
    const double d = std::hypot(b - c.b, std::abs(std::conj(z) + c.a));
    if (d == 0) fail(ErrorCode::pole, "gamma: evaluated at a center");
    g += 1.0 / d;
  }
  return g;
}

cplx HitchinMetric::delta(cplx z, double b) const {
  cplx s{};
  for (const auto& c : config_.centers) {
    const cplx w = std::conj(z) + c.a;
    const double r = std::abs(w);
    if (r <= 1e-14 * (1.0 + std::abs(z) + std::abs(c.a))) {
      fail(ErrorCode::pole, "delta: conj(z) + a_i = 0");
    }
    const double t = b - c.b;
    const double d = std::hypot(t, r);
    // For t > 0, (t - Δ)/w = -conj(w)/(t + Δ) avoids the cancellation.
    s += t > 0 ? -std::conj(w) / (d * (t + d)) : (t - d) / (d * w);
  }
  return s;
}

void HitchinMetric::check_point(const HitchinPoint& p) const {
  if (!std::isfinite(p.z.real()) || !std::isfinite(p.z.imag()) ||
      !std::isfinite(p.y.real()) || !std::isfinite(p.y.imag())) {
    fail(ErrorCode::invalid_argument, "hitchin: non-finite chart point");
  }
  if (std::abs(p.y) < opts_.y_floor) {
    std::ostringstream os;
    os << "hitchin: |y| = " << std::abs(p.y) << " below the chart floor";
    fail(ErrorCode::chart_boundary, os.str());
  }
}

HitchinMetric::Frame HitchinMetric::frame(const HitchinPoint& p) const {
  check_point(p);
  const ImplicitSolution sol = solve_b(p.z, std::norm(p.y));
  return {gamma(p.z, sol.b), delta(p.z, sol.b)};
}

namespace {

// h_ab = γ w1_a conj(w1_b) + γ^{-1} w2_a conj(w2_b) in the real chart basis.
std::array<std::array<cplx, 4>, 4> hermitian_form(double gamma, cplx delta, cplx y) {
  const std::array<cplx, 4> w1{1.0, kI, 0.0, 0.0};
  const cplx dbar = std::conj(delta);
  const std::array<cplx, 4> w2{dbar, kI * dbar, 2.0 / y, 2.0 * kI / y};
  std::array<std::array<cplx, 4>, 4> h{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      h[a][b] = gamma * w1[a] * std::conj(w1[b]) + w2[a] * std::conj(w2[b]) / gamma;
  return h;
}

}  // namespace

MetricSample HitchinMetric::metric_at(const HitchinPoint& p) const {
  const Frame f = frame(p);
  const auto h = hermitian_form(f.gamma, f.delta, p.y);
  MetricSample out;
  out.point = to_chart(p);
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) out.g[a][b] = out.g[b][a] = h[a][b].real();
  return out;
}

TwoFormSample HitchinMetric::kahler_form_at(const HitchinPoint& p) const {
  const Frame f = frame(p);
  const auto h = hermitian_form(f.gamma, f.delta, p.y);
  TwoFormSample out;
  out.point = to_chart(p);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      out.omega[a][b] = -h[a][b].imag();
      out.omega[b][a] = -out.omega[a][b];
    }
  return out;
}

ComplexStructureSample HitchinMetric::complex_structure_at(const HitchinPoint& p) const {
  check_point(p);
  ComplexStructureSample out;
  out.point = to_chart(p);
  out.J[1][0] = 1.0;
  out.J[0][1] = -1.0;
  out.J[3][2] = 1.0;
  out.J[2][3] = -1.0;
  return out;
}

HitchinPoint HitchinMetric::point_over(double b, cplx a, double phase) const {
  const cplx z = -std::conj(a);
  const double log_s = log_height_product(z, b);
  if (!(log_s > -700)) {
    fail(ErrorCode::chart_boundary, "point_over: base point lies on the y = 0 locus");
  }
  if (!(log_s < 700)) fail(ErrorCode::numeric_overflow, "point_over: |y| overflows");
  return {z, std::polar(std::exp(0.5 * log_s), phase)};
}

double HitchinMetric::local_scale(cplx a) const {
  double l = INFINITY;
  for (const auto& c : config_.centers) l = std::min(l, std::abs(a - c.a));
  return l;
}

Vec4 HitchinMetric::steps_at(const HitchinPoint& p) const {
  check_point(p);
  const double l = local_scale(-std::conj(p.z));
  if (!(l > 0)) fail(ErrorCode::pole, "hitchin: point on the vertical line of a center");
  // |y| varies on its own scale: near a lower string |y|^2 ∝ |a - a_i|^2.
  const double hz = opts_.step_fraction * l;
  const double hy = opts_.step_fraction * std::abs(p.y);
  return {hz, hz, hy, hy};
}

HitchinPoint HitchinMetric::from_chart(const ChartPoint& p) {
  return {{p.coords[0], p.coords[1]}, {p.coords[2], p.coords[3]}};
}

ChartPoint HitchinMetric::to_chart(const HitchinPoint& p) {
  return {{p.z.real(), p.z.imag(), p.y.real(), p.y.imag()}, ChartId::hitchin_zy};
}

MetricField HitchinMetric::metric_field() const {
  return [this](const ChartPoint& q) { return metric_at(from_chart(q)); };
}

TwoFormField HitchinMetric::kahler_form_field() const {
  return [this](const ChartPoint& q) { return kahler_form_at(from_chart(q)); };
}

ComplexStructureField HitchinMetric::complex_structure_field() const {
  return [this](const ChartPoint& q) { return complex_structure_at(from_chart(q)); };
}

double ale_radius_to_base(double ale_radius, int k) {
  return ale_radius * ale_radius / (2.0 * k);
}

DecayResult ale_curvature_decay(const HitchinMetric& metric,
                                std::span<const double> ale_radii, int directions,
                                double noise_floor) {
  if (ale_radii.size() < 4) {
    fail(ErrorCode::fit_domain, "curvature decay: need at least 4 radii");
  }
  const auto [mn, mx] = std::minmax_element(ale_radii.begin(), ale_radii.end());
  if (!(*mn > 0) || *mx / *mn < 10.0 * (1 - 1e-12)) {
    fail(ErrorCode::fit_domain, "curvature decay: radii must span a decade");
  }
  if (directions < 1) fail(ErrorCode::invalid_argument, "curvature decay: no directions");

  const int k = metric.config().k();
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  DecayResult out;
  out.ale_radii.assign(ale_radii.begin(), ale_radii.end());
  const MetricField field = metric.metric_field();
  for (double rho : ale_radii) {
    const double R = ale_radius_to_base(rho, k);
    double sum = 0;
    for (int d = 0; d < directions; ++d) {
      const double ct = -0.8 + 1.6 * (d + 0.5) / directions;
      const double st = std::sqrt(1.0 - ct * ct);
      const double phi = 0.3 + golden * d;
      const cplx a = R * st * cplx{std::cos(phi), std::sin(phi)};
      const HitchinPoint hp = metric.point_over(R * ct, a, 0.37);
      const CurvatureBundle c =
          curvature_at(field, HitchinMetric::to_chart(hp), metric.steps_at(hp));
      sum += c.riem_norm_sq;
    }
    out.mean_riem_sq.push_back(sum / directions);
  }
  double largest = 0;
  for (std::size_t i = 0; i < out.ale_radii.size(); ++i) {
    largest = std::max(largest, std::pow(out.ale_radii[i], 4) * out.mean_riem_sq[i]);
  }
  if (largest < noise_floor) {
    out.flat = true;
    return out;
  }
  out.fit = fit_loglog(out.ale_radii, out.mean_riem_sq);
  return out;
}

}  // namespace rfk
