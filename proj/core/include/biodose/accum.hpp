#pragma once

#include <cmath>
#include <limits>

namespace biodose {

/// Neumaier compensated accumulator. All per-point sums in the fitting and
/// selection code go through this so that results do not depend on the
/// partitioning or ordering of the points beyond ~1 ulp.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Streaming log-sum-exp, numerically safe for Monte Carlo density
/// accumulation: value() = log(sum_i exp(x_i)).
class OnlineLogSum {
 public:
  void add(double x) {
    if (std::isinf(x) && x < 0) return;  // exp(-inf) contributes nothing
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
    ++count_;
  }
  bool empty() const { return count_ == 0; }
  double value() const {
    if (count_ == 0 || sum_ <= 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  long count_ = 0;
};

}  // namespace biodose
