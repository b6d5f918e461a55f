#pragma once

#include <cmath>
#include <numbers>

#include "sphot/errors.hpp"
#include "sphot/numeric/special.hpp"

namespace sphot {

/// K(a) = 1 - a / tan a + log(a / sin a) on [0, pi), with K(0) = 0.
inline double k_function(double alpha) {
  if (!(alpha >= 0.0) || !(alpha < std::numbers::pi)) {
    throw DomainError("k_function: argument must lie in [0, pi)");
  }
  return (1.0 - numeric::t_over_tan(alpha)) + numeric::log_t_over_sin(alpha);
}

/// Maclaurin series of K truncated after m_max terms:
/// sum_{m=1}^{m_max} (2m + 1) zeta(2m) a^{2m} / (pi^{2m} m).
inline double k_series(double alpha, int m_max) {
  if (!(alpha >= 0.0) || !(alpha < std::numbers::pi)) {
    throw DomainError("k_series: argument must lie in [0, pi)");
  }
  if (m_max < 0) throw InvalidArgument("k_series: negative term count");
  const double r2 = (alpha / std::numbers::pi) * (alpha / std::numbers::pi);
  double power = 1.0, sum = 0.0;
  for (int m = 1; m <= m_max; ++m) {
    power *= r2;
    sum += (2.0 * m + 1.0) * std::riemann_zeta(2.0 * m) * power / m;
  }
  return sum;
}

}  // namespace sphot
