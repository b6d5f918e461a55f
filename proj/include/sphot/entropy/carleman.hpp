#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>

#include "sphot/numeric/special.hpp"
#include "sphot/sphere/types.hpp"

namespace sphot {

inline constexpr double kEigenvalueFloor = 1e-10;

/// Eigenvalues of a symmetric positive definite matrix, ascending.
/// Throws NotPositiveDefinite when the smallest is <= 1e-10.
inline Vector spd_eigenvalues(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw NotSymmetric("spd_eigenvalues: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  if (!(ev(0) > kEigenvalueFloor)) throw NotPositiveDefinite("operator is not positive definite");
  return ev;
}

/// -log det2(M) = trace(M - I - log M) = sum (l - 1 - log l) over the spectrum.
inline double carleman_log_det2(const Matrix& m) {
  const Vector ev = spd_eigenvalues(m);
  numeric::CompensatedSum s;
  for (long i = 0; i < ev.size(); ++i) {
    const double d = ev(i) - 1.0;
    // l - 1 - log l = d - log1p(d) keeps digits near l = 1.
    s += d - std::log1p(d);
  }
  return s.value();
}

inline double carleman_log_det2(const SymOperator& m) { return carleman_log_det2(m.matrix()); }

/// trace(log M) for symmetric positive definite M.
inline double log_det_spd(const Matrix& m) {
  const Vector ev = spd_eigenvalues(m);
  numeric::CompensatedSum s;
  for (long i = 0; i < ev.size(); ++i) s += std::log(ev(i));
  return s.value();
}

}  // namespace sphot
