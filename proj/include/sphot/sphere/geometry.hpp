#pragma once

#include <cmath>
#include <numbers>

#include "sphot/config.hpp"
#include "sphot/numeric/special.hpp"
#include "sphot/sphere/types.hpp"

namespace sphot {

namespace detail {

inline void require_same_dim(const SpherePoint& a, const SpherePoint& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw InvalidArgument("points live on spheres of different dimension");
  }
}

inline void require_base(const SpherePoint& x, const TangentVector& tau) {
  if (!tau.base().same_as(x)) {
    throw BaseMismatch("tangent vector is not based at the given point");
  }
}

}  // namespace detail

/// Great-circle distance in radians, in [0, pi].
///
/// Evaluated as 2 atan2(|x - y|, |x + y|), which equals the clamped
/// arccos(<x,y>) but keeps full relative accuracy for nearby points and is
/// exactly zero for identical ones.
inline double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
  detail::require_same_dim(x, y);
  return 2.0 * std::atan2((x.coords() - y.coords()).norm(), (x.coords() + y.coords()).norm());
}

/// exp_x(tau) = cos|tau| x + (sin|tau| / |tau|) tau.
inline SpherePoint exp_map(const SpherePoint& x, const TangentVector& tau,
                           const GeometryConfig& cfg = {}) {
  detail::require_base(x, tau);
  const double theta = tau.norm();
  if (!(theta < std::numbers::pi - cfg.cut_margin)) {
    throw CutLocusViolation("exp_map: tangent vector reaches the cut locus");
  }
  if (theta == 0.0) return x;
  Vector y = std::cos(theta) * x.coords() + numeric::sinc(theta) * tau.vec();
  // Renormalize so the unit-norm invariant survives repeated application.
  return SpherePoint(y / y.norm());
}

/// Inverse of exp_map: the tangent vector at x pointing to y with length d(x,y).
inline TangentVector log_map(const SpherePoint& x, const SpherePoint& y,
                             const GeometryConfig& cfg = {}) {
  detail::require_same_dim(x, y);
  if (x.coords() == y.coords()) return TangentVector::zero(x);
  const double c = x.coords().dot(y.coords());
  Vector w = y.coords() - c * x.coords();
  const double s = w.norm();
  const double d = geodesic_distance(x, y);
  if (!(d < std::numbers::pi - cfg.cut_margin)) {
    throw CutLocusViolation("log_map: points are too close to antipodal");
  }
  if (s == 0.0) return TangentVector::zero(x);
  w *= d / s;
  // Remove the rounding residue along x.
  w -= x.coords().dot(w) * x.coords();
  return TangentVector(x, std::move(w));
}

/// Jacobian determinant of exp_x at tau on S^n: (sin|tau| / |tau|)^(n-1).
inline double jacobian_exp(const SpherePoint& x, const TangentVector& tau) {
  detail::require_base(x, tau);
  const double theta = tau.norm();
  if (!(theta < std::numbers::pi)) {
    throw CutLocusViolation("jacobian_exp: tangent vector reaches the cut locus");
  }
  return std::pow(numeric::sinc(theta), x.dim() - 1);
}

/// Hessian in x of d(x,y)^2 / 2, expressed in `frame` (based at x).
///
/// A = c I + (1 - c) u u^T with c = d / tan d and u the unit direction of the
/// geodesic from x to y.  Returns the identity when d <= 1e-8.
inline SymOperator hessian_half_dist_sq(const SpherePoint& x, const SpherePoint& y,
                                        const TangentFrame& frame,
                                        const GeometryConfig& cfg = {}) {
  detail::require_same_dim(x, y);
  if (!frame.base().same_as(x)) {
    throw BaseMismatch("hessian_half_dist_sq: frame is not based at x");
  }
  const double d = geodesic_distance(x, y);
  if (!(d < std::numbers::pi - cfg.cut_margin)) {
    throw DegenerateDistance("hessian_half_dist_sq: distance reaches the cut locus");
  }
  const int n = x.dim();
  if (d <= 1e-8) return SymOperator::identity(frame);
  const Vector w = y.coords() - x.coords().dot(y.coords()) * x.coords();
  const Vector u = frame.coordinates(w / w.norm());
  const double c = numeric::t_over_tan(d);
  Matrix a = c * Matrix::Identity(n, n) + (1.0 - c) * u * u.transpose();
  a = 0.5 * (a + a.transpose());
  return SymOperator(frame, std::move(a));
}

}  // namespace sphot
