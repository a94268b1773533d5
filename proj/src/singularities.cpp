#include "rfk/singularities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "rfk/errors.hpp"
#include "rfk/numerics.hpp"

namespace rfk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx unit_root(int n, long long power) {
  const long long r = ((power % n) + n) % n;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == n) return {-1.0, 0.0};
  if (4 * r == n) return {0.0, 1.0};
  if (4 * r == 3LL * n) return {0.0, -1.0};
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / n);
}

double arg_positive(cplx a) {
  double t = std::arg(a);
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double distance3(const Center& p, const Center& q) {
  return std::hypot(p.b - q.b, std::abs(p.a - q.a));
}

}  // namespace

QuotientSignature::QuotientSignature(int d, int n, int m) : d_(d), n_(n), m_(m) {
  std::ostringstream os;
  if (d < 1) {
    os << "signature: d must be positive (got " << d << ")";
    fail(ErrorCode::invalid_signature, os.str());
  }
  if (n < 1) {
    os << "signature: n must be >= 1 (got " << n << ")";
    fail(ErrorCode::invalid_signature, os.str());
  }
  if (n == 1) {
    if (m != 0) fail(ErrorCode::invalid_signature, "signature: n = 1 requires m = 0");
    return;
  }
  if (m < 1 || m >= n) {
    os << "signature: need 1 <= m < n (got m = " << m << ", n = " << n << ")";
    fail(ErrorCode::invalid_signature, os.str());
  }
  if (std::gcd(m, n) != 1) {
    os << "signature: gcd(m, n) = " << std::gcd(m, n) << " != 1";
    fail(ErrorCode::invalid_signature, os.str());
  }
}

cplx QuotientSignature::rho() const { return unit_root(n_, 1); }

Mode Mode::akl(int j_max) {
  if (j_max < 1) fail(ErrorCode::invalid_argument, "mode: akl J_max must be positive");
  return {ModeKind::akl, j_max};
}

Mode Mode::parse(const std::string& text) {
  if (text == "ale") return ale();
  if (text == "alf") return alf();
  if (text.rfind("akl:", 0) == 0) {
    const std::string num = text.substr(4);
    std::size_t used = 0;
    int j = 0;
    try {
      j = std::stoi(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) {
      fail(ErrorCode::parse, "mode: malformed akl truncation '" + text + "'");
    }
    return akl(j);
  }
  fail(ErrorCode::parse, "mode: expected ale, alf or akl:J (got '" + text + "')");
}

std::string Mode::to_string() const {
  switch (kind) {
    case ModeKind::ale: return "ale";
    case ModeKind::alf: return "alf";
    case ModeKind::akl: return "akl:" + std::to_string(akl_j_max);
  }
  return "ale";
}

double CenterConfiguration::extent() const {
  double r = 0;
  for (const auto& c : centers) r = std::max(r, std::hypot(c.b, std::abs(c.a)));
  return r;
}

CenterConfiguration make_polygon_config(const QuotientSignature& signature,
                                        const std::vector<cplx>& radii,
                                        const std::vector<double>& heights,
                                        Mode mode) {
  const int d = signature.d(), n = signature.n();
  if (static_cast<int>(radii.size()) != d || static_cast<int>(heights.size()) != d) {
    std::ostringstream os;
    os << "polygon config: expected " << d << " radii and heights, got "
       << radii.size() << " and " << heights.size();
    fail(ErrorCode::invalid_argument, os.str());
  }
  std::vector<cplx> principal(d);
  for (int i = 0; i < d; ++i) {
    const cplx c = radii[i];
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) ||
        !std::isfinite(heights[i])) {
      fail(ErrorCode::invalid_argument, "polygon config: non-finite entry");
    }
    if (n >= 2 && std::abs(c) == 0.0) {
      fail(ErrorCode::singular_fiber,
           "polygon config: zero radius collapses a polygon onto one point");
    }
    // Rotate c by a power of ρ into the sector arg ∈ [0, 2π/n); this does not
    // change c^n nor the polygon.
    const double sector = kTwoPi / n;
    const double t = arg_positive(c);
    const long long turns = static_cast<long long>(std::floor(t / sector));
    principal[i] = turns == 0 ? c : c * unit_root(n, -turns);
  }
  double scale = 1.0;
  for (const cplx& c : principal) scale = std::max(scale, std::abs(c));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const cplx pi = std::pow(principal[i], n), pj = std::pow(principal[j], n);
      if (std::abs(pi - pj) <= 1e-12 * std::pow(scale, n)) {
        std::ostringstream os;
        os << "polygon config: c_" << i + 1 << "^n and c_" << j + 1
           << "^n coincide (singular fiber)";
        fail(ErrorCode::singular_fiber, os.str());
      }
    }
  }
  CenterConfiguration cfg;
  cfg.signature = signature;
  cfg.mode = mode;
  cfg.radii = principal;
  cfg.heights = heights;
  cfg.centers.reserve(static_cast<std::size_t>(d) * n);
  for (int i = 0; i < d; ++i) {
    for (int j = 1; j <= n; ++j) {
      cfg.centers.push_back({heights[i], -std::conj(principal[i]) * unit_root(n, -j)});
    }
  }
  return cfg;
}

CenterConfiguration make_akl_config(int n, int m, int j_max,
                                    std::vector<double> heights) {
  if (j_max < 1) fail(ErrorCode::invalid_argument, "akl config: J_max must be positive");
  if (heights.empty()) heights.assign(j_max, 0.0);
  std::vector<cplx> radii(j_max);
  for (int j = 1; j <= j_max; ++j) radii[j - 1] = {static_cast<double>(j) * j, 0.0};
  return make_polygon_config(QuotientSignature(j_max, n, m), radii, heights,
                             Mode::akl(j_max));
}

CenterConfiguration make_explicit_config(std::vector<Center> centers,
                                         const QuotientSignature& signature,
                                         Mode mode) {
  if (static_cast<int>(centers.size()) != signature.center_count()) {
    std::ostringstream os;
    os << "explicit config: signature needs " << signature.center_count()
       << " centers, got " << centers.size();
    fail(ErrorCode::invalid_argument, os.str());
  }
  for (const auto& c : centers) {
    if (!std::isfinite(c.b) || !std::isfinite(c.a.real()) || !std::isfinite(c.a.imag())) {
      fail(ErrorCode::invalid_argument, "explicit config: non-finite center");
    }
  }
  CenterConfiguration cfg;
  cfg.centers = std::move(centers);
  cfg.signature = signature;
  cfg.mode = mode;
  if (cfg.k() >= 2 && min_center_separation(cfg) <= 1e-12 * std::max(1.0, cfg.extent())) {
    fail(ErrorCode::singular_fiber, "explicit config: coincident centers");
  }
  return cfg;
}

CenterConfiguration perturbed(const CenterConfiguration& config, double eps,
                              std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<Center> moved = config.centers;
  for (auto& c : moved) {
    const double u = unit_from_bits(gen()), v = unit_from_bits(gen());
    const double cz = 2.0 * u - 1.0, sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    const double phi = kTwoPi * v;
    c.b += eps * cz;
    c.a += eps * sz * cplx{std::cos(phi), std::sin(phi)};
  }
  return make_explicit_config(std::move(moved), config.signature, config.mode);
}

double symmetry_residual(const CenterConfiguration& config) {
  const int n = config.signature.n();
  if (n == 1) return 0.0;
  const cplx rot = unit_root(n, -config.signature.m());
  double worst = 0;
  for (const auto& c : config.centers) {
    const Center moved{c.b, rot * c.a};
    double best = INFINITY;
    for (const auto& o : config.centers) best = std::min(best, distance3(moved, o));
    worst = std::max(worst, best);
  }
  return worst;
}

double min_center_separation(const CenterConfiguration& config) {
  double best = INFINITY;
  for (std::size_t i = 0; i < config.centers.size(); ++i)
    for (std::size_t j = i + 1; j < config.centers.size(); ++j)
      best = std::min(best, distance3(config.centers[i], config.centers[j]));
  return best;
}

double min_horizontal_separation(const CenterConfiguration& config) {
  double best = INFINITY;
  for (std::size_t i = 0; i < config.centers.size(); ++i)
    for (std::size_t j = i + 1; j < config.centers.size(); ++j)
      best = std::min(best, std::abs(config.centers[i].a - config.centers[j].a));
  return best;
}

DeformationPolynomial defining_polynomial(const CenterConfiguration& config) {
  DeformationPolynomial poly;
  std::vector<cplx> p{1.0};
  for (const auto& c : config.centers) {
    const cplx root = -std::conj(c.a);
    poly.roots.push_back(root);
    std::vector<cplx> next(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i] += p[i];
      next[i + 1] -= root * p[i];
    }
    p = std::move(next);
  }
  poly.coefficients.assign(p.begin() + 1, p.end());
  return poly;
}

GroupElement GroupElement::compose(const GroupElement& other) const {
  if (other.n != n || other.m != m) {
    fail(ErrorCode::invalid_argument, "group element: mismatched signatures");
  }
  return {(exponent + other.exponent) % n, n, m};
}

GroupElement GroupElement::power(int times) const {
  const long long e = (static_cast<long long>(exponent) * times) % n;
  return {static_cast<int>((e + n) % n), n, m};
}

cplx GroupElement::value() const { return unit_root(n, exponent); }

std::pair<cplx, cplx> apply_action_hitchin(const GroupElement& g, cplx z, cplx y) {
  const long long l = g.exponent;
  return {unit_root(g.n, g.m * l) * z, unit_root(g.n, -l) * y};
}

GHCoordinates apply_action_gh(const GroupElement& g, const GHCoordinates& p) {
  const long long l = g.exponent;
  double theta = p.theta + kTwoPi * static_cast<double>(l % g.n) / g.n;
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0) theta += kTwoPi;
  return {theta, p.b, unit_root(g.n, -g.m * l) * p.a};
}

std::vector<Center> canonical_order(std::vector<Center> centers) {
  std::stable_sort(centers.begin(), centers.end(), [](const Center& x, const Center& y) {
    if (x.b != y.b) return x.b > y.b;
    return arg_positive(x.a) < arg_positive(y.a);
  });
  return centers;
}

KahlerClassVector kahler_class(const CenterConfiguration& config) {
  const auto ordered = canonical_order(config.centers);
  KahlerClassVector v;
  for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
    v.entries.push_back(8.0 * std::numbers::pi * (ordered[i].b - ordered[i + 1].b));
  }
  return v;
}

}  // namespace rfk
