#pragma once

#include <functional>

#include "sphot/sphere/types.hpp"

namespace sphot {

/// Curvature along a geodesic, as the matrix of Y -> R(gamma', Y) gamma' in
/// a parallel frame whose first axis is the geodesic direction.
///
/// Only the unit sphere ships; `custom` lets callers supply the operator
/// S(t) directly (it is then integrated numerically).
class CurvatureSpec {
 public:
  enum class Kind { constant_sphere, custom };
  using Operator = std::function<Matrix(double t, double speed)>;

  static CurvatureSpec constant_sphere(int n) {
    if (n < 2) throw InvalidArgument("CurvatureSpec: sphere dimension must be at least 2");
    return CurvatureSpec(Kind::constant_sphere, n, {});
  }

  static CurvatureSpec custom(int n, Operator op) {
    if (!op) throw InvalidArgument("CurvatureSpec: empty curvature operator");
    return CurvatureSpec(Kind::custom, n, std::move(op));
  }

  Kind kind() const { return kind_; }
  int dim() const { return n_; }

  /// n x n operator at time t for a geodesic of the given speed.  On the unit
  /// sphere it is speed^2 on the orthogonal complement of the direction.
  Matrix operator_at(double t, double speed) const {
    if (kind_ == Kind::custom) {
      Matrix m = op_(t, speed);
      if (m.rows() != n_ || m.cols() != n_) throw InvalidArgument("CurvatureSpec: operator has the wrong size");
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw NotSymmetric("CurvatureSpec: curvature operator is not symmetric");
      }
      return m;
    }
    Matrix m = Matrix::Identity(n_, n_) * (speed * speed);
    m(0, 0) = 0.0;
    return m;
  }

 private:
  CurvatureSpec(Kind k, int n, Operator op) : kind_(k), n_(n), op_(std::move(op)) {}

  Kind kind_;
  int n_;
  Operator op_;
};

}  // namespace sphot
