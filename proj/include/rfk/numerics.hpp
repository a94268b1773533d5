#pragma once

// Shared numeric helpers: log-log regression, adaptive Simpson quadrature,
// shifted Halton sequences and an order-preserving parallel map.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace rfk {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  int point_count = 0;
};

/// Least-squares line through (log x, log y). Needs at least 4 points,
/// strictly positive data and x spanning at least `min_span` (ratio).
FitResult fit_loglog(std::span<const double> x, std::span<const double> y,
                     double min_span = 10.0);

/// Ordinary least squares on already transformed data; same point-count rule.
FitResult fit_line(std::span<const double> x, std::span<const double> y);

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-300;
  int max_depth = 48;
};

/// Adaptive Simpson on [a, b]. Never evaluates f outside [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, const QuadratureOptions& opts = {});

/// Pairwise summation; order-stable and accurate for long sample lists.
double pairwise_sum(std::span<const double> values);

/// Radical-inverse Halton sequence in `dims` dimensions (dims <= 8) with a
/// Cranley-Patterson rotation drawn from `seed`.
class HaltonStream {
 public:
  HaltonStream(int dims, std::uint64_t seed);

  /// Next point in [0, 1)^dims.
  std::vector<double> next();

 private:
  int dims_;
  std::uint64_t index_ = 1;
  std::vector<double> shift_;
};

/// Deterministic uniform double in [0, 1) from the raw mt19937_64 stream.
double unit_from_bits(std::uint64_t bits);

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and
/// returns the results in index order.
template <class T>
std::vector<T> parallel_map(std::size_t count,
                            const std::function<T(std::size_t)>& fn,
                            unsigned threads = 0) {
  std::vector<T> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  // The exception of the lowest failing index is rethrown, so the outcome
  // does not depend on scheduling.
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace rfk
