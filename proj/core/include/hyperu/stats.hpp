#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hyperu {

double mean(std::span<const double> values);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> values);

/// Kolmogorov-Smirnov distance sup |F_n - F| between the empirical law of
/// `values` and a continuous CDF.
double ks_distance(std::span<const double> values, const std::function<double(double)>& cdf);

/// Compensated accumulator for long sums with cancellation.
class CompensatedSum {
 public:
  // Knuth's branch-free TwoSum: the rounding error of each addition is
  // recovered exactly and accumulated separately.
  void add(double v) noexcept {
    const double t = sum_ + v;
    const double bp = t - sum_;
    comp_ += (sum_ - (t - bp)) + (v - bp);
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// executed exactly once; callers write results into per-index slots so the
/// outcome does not depend on the worker count.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace hyperu
