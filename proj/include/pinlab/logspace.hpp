#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <span>

namespace pinlab {

// All probability mass in this project accumulates in log domain: in the
// delocalized phase individual path weights underflow linear doubles long
// before the sums they build up do.  log(0) is -infinity, which every
// routine below treats as the additive identity.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double x) { return x == kLogZero; }

// Terms this far below the leading one move no sum by more than ~1e-22
// relative, below every tolerance in the project.  Summation routines drop
// or floor them there: it also keeps every intermediate of a compensated
// sum orders of magnitude away from the subnormal range, whose microcode
// assists otherwise dominate the runtime on steeply decaying kernels.
inline constexpr double kNegligibleLog = -60.0;

namespace detail {

// One compensated-summation step (Kahan).
inline void kahan_add(double& sum, double& comp, double x) {
  const double y = x - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace detail

// log(exp(a) + exp(b)).
double log_add(double a, double b);

// log(exp(a) - exp(b)) for a >= b; returns -inf when a == b.
double log_sub(double a, double b);

// Compensated sum; error stays at a few ulp independent of length.
double kahan_sum(std::span<const double> xs);

// log(sum_i exp(xs[i])): one max pass, then compensated summation of the
// rescaled terms.
double log_sum_exp(std::span<const double> xs);
double log_sum_exp(const Eigen::ArrayXd& xs);

// log sum over a half-open index range [lo, hi) of an array of logs.
double log_sum_exp_range(const Eigen::ArrayXd& xs, int lo, int hi);

// Streaming log-sum-exp: running max plus a compensated mantissa sum.
class LogAccumulator {
 public:
  void add(double t);
  double value() const;
  bool empty() const { return max_ == kLogZero; }
  void reset() {
    max_ = kLogZero;
    sum_ = comp_ = 0.0;
  }

 private:
  double max_ = kLogZero;
  double sum_ = 0.0;   // sum of exp(t - max_)
  double comp_ = 0.0;  // compensation carried with sum_
};

}  // namespace pinlab
