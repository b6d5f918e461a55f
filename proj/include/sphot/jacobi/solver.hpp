#pragma once

#include <cmath>
#include <numbers>

#include "sphot/jacobi/curvature.hpp"
#include "sphot/jacobi/matrix_trig.hpp"
#include "sphot/numeric/special.hpp"

namespace sphot {

/// Jacobi field Y and its derivative V, in the adapted parallel frame.
struct BlockState {
  Vector Y;
  Vector V;
};

inline constexpr int kReferenceSteps = 10000;

namespace detail {

inline void require_no_conjugate_point(const CurvatureSpec& spec, double speed) {
  if (!(speed >= 0.0)) throw InvalidArgument("jacobi: speed must be nonnegative");
  if (spec.kind() == CurvatureSpec::Kind::constant_sphere && !(speed < std::numbers::pi)) {
    throw ConjugatePoint("jacobi: speed reaches the first conjugate point");
  }
}

}  // namespace detail

/// Classical RK4 for d/dt [Y; V] = [V; -R(t) Y] from Y(0) = y0, V(0) = v0.
inline BlockState jacobi_rk4(const CurvatureSpec& spec, const Vector& y0, const Vector& v0, double speed,
                             double t_end = 1.0, int steps = kReferenceSteps) {
  const int n = spec.dim();
  if (y0.size() != n || v0.size() != n) throw InvalidArgument("jacobi_rk4: state has the wrong size");
  const double h = t_end / steps;
  Vector y = y0, v = v0;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Matrix R0 = spec.operator_at(t, speed);
    const Matrix Rh = spec.operator_at(t + 0.5 * h, speed);
    const Matrix R1 = spec.operator_at(t + h, speed);
    const Vector ky1 = v, kv1 = -R0 * y;
    const Vector ky2 = v + 0.5 * h * kv1, kv2 = -Rh * (y + 0.5 * h * ky1);
    const Vector ky3 = v + 0.5 * h * kv2, kv3 = -Rh * (y + 0.5 * h * ky2);
    const Vector ky4 = v + h * kv3, kv4 = -R1 * (y + h * ky3);
    y += h / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
    v += h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
  }
  return {y, v};
}

/// Propagator of the first-order system at time t for time-independent
/// curvature T: [[cos(t sqrt T), sin(t sqrt T)/sqrt T], [-sqrt T sin(t sqrt T), cos(t sqrt T)]].
inline Matrix jacobi_propagator(const Matrix& T, double t) {
  const long n = T.rows();
  const MatrixTrig a = matrix_trig(T, t);
  Matrix p(2 * n, 2 * n);
  p.topLeftCorner(n, n) = a.cos_part;
  p.topRightCorner(n, n) = a.sinc_part;
  p.bottomLeftCorner(n, n) = -T * a.sinc_part;  // -sqrt T sin(t sqrt T)
  p.bottomRightCorner(n, n) = a.cos_part;
  return p;
}

/// Jacobi field with Y(0) = 0, V(0) = w (frame coordinates) at time t.
/// Closed form on the sphere; RK4 for custom curvature.
inline BlockState jacobi_solve(const CurvatureSpec& spec, const Vector& w, double speed, double t = 1.0) {
  detail::require_no_conjugate_point(spec, speed);
  const int n = spec.dim();
  if (w.size() != n) throw InvalidArgument("jacobi_solve: w has the wrong size");
  if (spec.kind() == CurvatureSpec::Kind::custom) {
    return jacobi_rk4(spec, Vector::Zero(n), w, speed, t);
  }
  BlockState s{Vector(n), Vector(n)};
  s.Y(0) = t * w(0);
  s.V(0) = w(0);
  const double sn = t * numeric::sinc(speed * t);
  const double cs = std::cos(speed * t);
  for (int i = 1; i < n; ++i) {
    s.Y(i) = sn * w(i);
    s.V(i) = cs * w(i);
  }
  return s;
}

/// Same, with w an ambient tangent vector and the frame's first axis along
/// the geodesic.
inline BlockState jacobi_solve(const CurvatureSpec& spec, const TangentFrame& frame, const TangentVector& w,
                               double speed, double t = 1.0) {
  if (!frame.base().same_as(w.base())) throw BaseMismatch("jacobi_solve: w is not based at the frame");
  return jacobi_solve(spec, frame.coordinates(w.vec()), speed, t);
}

/// Hessian of d^2/2 at the start of a geodesic of the given length, from the
/// first variation identity <A Y(1), Y(1)> = <V(1), Y(1)>: A = Q P^{-1} with
/// Y(1) = P w and V(1) = Q w.  Matrix in the adapted frame.
inline Matrix hessian_from_jacobi(const CurvatureSpec& spec, double speed) {
  detail::require_no_conjugate_point(spec, speed);
  const int n = spec.dim();
  Matrix P(n, n), Q(n, n);
  for (int k = 0; k < n; ++k) {
    const BlockState s = jacobi_solve(spec, Vector::Unit(n, k), speed);
    P.col(k) = s.Y;
    Q.col(k) = s.V;
  }
  Eigen::FullPivLU<Matrix> lu(P);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) {
    throw ConjugatePoint("hessian_from_jacobi: Jacobi fields degenerate");
  }
  Matrix a = Q * lu.inverse();
  return 0.5 * (a + a.transpose());
}

inline SymOperator hessian_from_jacobi(const CurvatureSpec& spec, const TangentFrame& frame, double speed) {
  if (frame.dim() != spec.dim()) throw InvalidArgument("hessian_from_jacobi: frame dimension mismatch");
  return SymOperator(frame, hessian_from_jacobi(spec, speed));
}

}  // namespace sphot
