#include "pinlab/logspace.hpp"

#include <algorithm>
#include <stdexcept>

namespace pinlab {

double log_add(double a, double b) {
  if (is_log_zero(a)) return b;
  if (is_log_zero(b)) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sub(double a, double b) {
  if (is_log_zero(b)) return a;
  if (!(a >= b)) throw std::invalid_argument("log_sub requires a >= b");
  if (a == b) return kLogZero;
  return a + std::log1p(-std::exp(b - a));
}

double kahan_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) detail::kahan_add(sum, comp, x);
  return sum;
}

double log_sum_exp(std::span<const double> xs) {
  double m = kLogZero;
  for (double x : xs) m = std::max(m, x);
  if (is_log_zero(m)) return kLogZero;
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    if (x >= m + kNegligibleLog) detail::kahan_add(sum, comp, std::exp(x - m));
  }
  return m + std::log(sum + comp);
}

double log_sum_exp(const Eigen::ArrayXd& xs) {
  return log_sum_exp(std::span<const double>(xs.data(), xs.size()));
}

double log_sum_exp_range(const Eigen::ArrayXd& xs, int lo, int hi) {
  lo = std::max(lo, 0);
  hi = std::min<int>(hi, static_cast<int>(xs.size()));
  if (hi <= lo) return kLogZero;
  return log_sum_exp(std::span<const double>(xs.data() + lo, hi - lo));
}

void LogAccumulator::add(double t) {
  if (is_log_zero(t)) return;
  if (is_log_zero(max_)) {
    max_ = t;
    sum_ = 1.0;
    comp_ = 0.0;
    return;
  }
  if (t <= max_) {
    if (t < max_ + kNegligibleLog) return;
    detail::kahan_add(sum_, comp_, std::exp(t - max_));
  } else {
    const double r = t - max_ > -kNegligibleLog ? 0.0 : std::exp(max_ - t);
    sum_ *= r;
    comp_ *= r;
    detail::kahan_add(sum_, comp_, 1.0);
    max_ = t;
  }
}

double LogAccumulator::value() const {
  if (is_log_zero(max_)) return kLogZero;
  return max_ + std::log(sum_ + comp_);
}

}  // namespace pinlab
