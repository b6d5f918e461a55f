#pragma once

#include <cmath>
#include <numbers>

namespace sphot::numeric {

// Below this angle the closed forms lose digits to cancellation; the
// truncated Maclaurin series used instead are accurate to < 1e-16 there.
inline constexpr double kSeriesThreshold = 1e-4;

/// sin(t) / t.
inline double sinc(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

/// t / tan(t), equal to 1 at t = 0.
inline double t_over_tan(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return 1.0 - t2 / 3.0 - t2 * t2 / 45.0;
  }
  return t / std::tan(t);
}

/// log(t / sin t) = -log(sinc t).
inline double log_t_over_sin(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    const double t2 = t * t;
    return t2 / 6.0 + t2 * t2 / 180.0;
  }
  return std::log(t / std::sin(t));
}

/// Derivative of sinc, used by the transport velocity and the jets.
inline double sinc_prime(double t) {
  if (std::abs(t) < kSeriesThreshold) {
    return -t / 3.0 + t * t * t / 30.0;
  }
  return (t * std::cos(t) - std::sin(t)) / (t * t);
}

/// Neumaier compensated accumulator.  Summation order is the call order,
/// so results are reproducible bit for bit.
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
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sphot::numeric
