#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace lsilab {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

inline double sq(double x) { return x * x; }

// Neumaier variant of compensated summation: tracks a running correction so
// that catastrophic cancellation between near-equal terms of opposite sign
// does not contaminate small accumulated totals.
class CompensatedSum {
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

inline double compensated_total(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// phi(x) = x log x - x + 1, the nonnegative integrand of relative entropy;
// phi(0) = 1 and phi(1) = 0. Evaluating entropies as sums of w * phi terms
// avoids the catastrophic cancellation the textbook sum w g log(g/s) suffers
// near constant g, where value and roundoff are both O((g/s - 1)^2).
inline double entropy_phi(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.5) return 1.0 + x * (std::log(x) - 1.0);
  const double d = x - 1.0;
  return (1.0 + d) * std::log1p(d) - d;
}

// log(sum_i exp(a_i)), tolerating -inf entries (zero mass).
inline double log_sum_exp(std::span<const double> a) {
  double m = -infinity;
  for (double x : a) m = std::max(m, x);
  if (!std::isfinite(m)) return m;  // all -inf, or a +inf entry dominates
  CompensatedSum s;
  for (double x : a) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_domain(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace lsilab
