#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sphot/numeric/special.hpp"
#include "sphot/sphere/types.hpp"

namespace sphot {

struct MatrixTrig {
  Matrix cos_part;   ///< cos(t sqrt T)
  Matrix sinc_part;  ///< sin(t sqrt T) / sqrt T, equal to t I at T = 0
};

/// cos(t sqrt T) and sin(t sqrt T) / sqrt T for symmetric positive
/// semidefinite T, through the eigendecomposition of T.  Both are entire
/// functions of T, so no square root is ever formed at zero eigenvalues.
inline MatrixTrig matrix_trig(const Matrix& T, double t) {
  const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  if (T.rows() != T.cols() || (T - T.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw NotSymmetric("matrix_trig: operator is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (T + T.transpose()));
  const Vector& lam = es.eigenvalues();
  if (lam.size() > 0 && lam(0) < -1e-12 * scale) {
    throw InvalidArgument("matrix_trig: operator has a negative eigenvalue");
  }
  const long n = lam.size();
  Vector c(n), s(n);
  for (long i = 0; i < n; ++i) {
    const double r = std::sqrt(std::max(0.0, lam(i)));
    c(i) = std::cos(t * r);
    s(i) = t * numeric::sinc(t * r);
  }
  const Matrix& Q = es.eigenvectors();
  MatrixTrig out{Q * c.asDiagonal() * Q.transpose(), Q * s.asDiagonal() * Q.transpose()};
  out.cos_part = 0.5 * (out.cos_part + out.cos_part.transpose());
  out.sinc_part = 0.5 * (out.sinc_part + out.sinc_part.transpose());
  return out;
}

inline MatrixTrig matrix_trig(const SymOperator& T, double t) { return matrix_trig(T.matrix(), t); }

}  // namespace sphot
