#pragma once

#include <cmath>
#include <numbers>

#include "sphot/sphere/types.hpp"

namespace sphot {

inline constexpr double kCoincidenceTolerance = 1e-24;

/// Green's function of the Laplace-Beltrami operator on S^2,
/// G(b, c) = -(4 pi)^-1 log(1 - cos d(b, c)).
///
/// Relative to surface area it satisfies Lap_b G(b, c) = 1/(4 pi) - delta_c.
inline double green_function(const SpherePoint& b, const SpherePoint& c) {
  if (b.dim() != 2 || c.dim() != 2) throw DimensionUnsupported("green_function: S^2 only");
  // 1 - cos d = |b - c|^2 / 2 avoids cancellation for nearby points.
  const double one_minus_cos = 0.5 * (b.coords() - c.coords()).squaredNorm();
  if (one_minus_cos <= kCoincidenceTolerance) {
    throw CoincidentPoints("green_function: coincident arguments");
  }
  return -std::log(one_minus_cos) / (4.0 * std::numbers::pi);
}

/// Gradient of G(., c) at b, as a tangent vector at b.
inline TangentVector green_gradient(const SpherePoint& b, const SpherePoint& c) {
  if (b.dim() != 2 || c.dim() != 2) throw DimensionUnsupported("green_gradient: S^2 only");
  const double one_minus_cos = 0.5 * (b.coords() - c.coords()).squaredNorm();
  if (one_minus_cos <= kCoincidenceTolerance) {
    throw CoincidentPoints("green_gradient: coincident arguments");
  }
  const double cosd = b.coords().dot(c.coords());
  Vector g = (c.coords() - cosd * b.coords()) / (4.0 * std::numbers::pi * one_minus_cos);
  g -= b.coords().dot(g) * b.coords();
  return TangentVector(b, std::move(g));
}

}  // namespace sphot
