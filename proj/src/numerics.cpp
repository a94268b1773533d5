#include "rfk/numerics.hpp"

#include <cmath>
#include <random>

#include "rfk/errors.hpp"

namespace rfk {

FitResult fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::fit_domain, "fit: size mismatch");
  if (x.size() < 4) fail(ErrorCode::fit_domain, "fit: need at least 4 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) fail(ErrorCode::fit_domain, "fit: degenerate abscissae");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    ss += e * e;
  }
  r.rms_residual = std::sqrt(ss / n);
  r.point_count = static_cast<int>(x.size());
  return r;
}

FitResult fit_loglog(std::span<const double> x, std::span<const double> y,
                     double min_span) {
  if (x.size() != y.size()) fail(ErrorCode::fit_domain, "fit: size mismatch");
  std::vector<double> lx, ly;
  double lo = INFINITY, hi = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0) || !std::isfinite(x[i]) ||
        !std::isfinite(y[i])) {
      fail(ErrorCode::fit_domain, "fit: log-log data must be positive");
    }
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (x.size() >= 1 && hi / lo < min_span * (1 - 1e-12)) {
    fail(ErrorCode::fit_domain, "fit: abscissae span less than required ratio");
  }
  return fit_line(lx, ly);
}

namespace {

struct SimpsonCtx {
  const std::function<double(double)>& f;
  const QuadratureOptions& opts;
};

double simpson_rec(const SimpsonCtx& ctx, double a, double fa, double m,
                   double fm, double b, double fb, double whole, double tol,
                   int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = ctx.f(lm), frm = ctx.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(ctx, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(ctx, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  SimpsonCtx ctx{f, opts};
  // Seed with a coarse composite rule so the tolerance is relative to the
  // integral's magnitude rather than to a possibly tiny first panel.
  constexpr int panels = 8;
  const double h = (b - a) / panels;
  std::vector<double> xs(2 * panels + 1), fs(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) {
    xs[i] = a + 0.5 * h * i;
    fs[i] = f(xs[i]);
  }
  double coarse = 0;
  for (int p = 0; p < panels; ++p) {
    coarse += h / 6.0 * (fs[2 * p] + 4 * fs[2 * p + 1] + fs[2 * p + 2]);
  }
  const double tol =
      std::max(opts.abs_tol, opts.rel_tol * std::abs(coarse)) / panels;
  std::vector<double> parts(panels);
  for (int p = 0; p < panels; ++p) {
    const double whole =
        h / 6.0 * (fs[2 * p] + 4 * fs[2 * p + 1] + fs[2 * p + 2]);
    parts[p] = simpson_rec(ctx, xs[2 * p], fs[2 * p], xs[2 * p + 1],
                           fs[2 * p + 1], xs[2 * p + 2], fs[2 * p + 2], whole,
                           tol, opts.max_depth);
  }
  return pairwise_sum(parts);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}
}  // namespace

HaltonStream::HaltonStream(int dims, std::uint64_t seed) : dims_(dims) {
  if (dims < 1 || dims > 8) {
    fail(ErrorCode::invalid_argument, "HaltonStream: dims must be in [1, 8]");
  }
  std::mt19937_64 gen(seed);
  shift_.resize(dims);
  for (auto& s : shift_) s = unit_from_bits(gen());
}

std::vector<double> HaltonStream::next() {
  std::vector<double> p(dims_);
  for (int d = 0; d < dims_; ++d) {
    double v = radical_inverse(index_, kPrimes[d]) + shift_[d];
    p[d] = v - std::floor(v);
  }
  ++index_;
  return p;
}

}  // namespace rfk
