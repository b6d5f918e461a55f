#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "sphot/errors.hpp"

namespace sphot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kTangencyTolerance = 1e-12;
inline constexpr double kFrameTolerance = 1e-10;
inline constexpr double kSymmetryTolerance = 1e-12;

/// A point of the unit sphere S^n, stored by its coordinates in R^{n+1}.
class SpherePoint {
 public:
  /// Requires a unit vector with at least three components.
  explicit SpherePoint(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 3) {
      throw InvalidArgument("SpherePoint: sphere dimension must be at least 2");
    }
    if (!(std::abs(coords_.norm() - 1.0) <= kUnitNormTolerance)) {
      throw InvalidArgument("SpherePoint: coordinates are not a unit vector");
    }
  }

  /// Projects a nonzero vector radially onto the sphere.
  static SpherePoint normalized(const Vector& v) {
    const double r = v.norm();
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw InvalidArgument("SpherePoint::normalized: zero or non-finite vector");
    }
    return SpherePoint(v / r);
  }

  /// North pole (0, ..., 0, 1) of S^n.
  static SpherePoint north_pole(int n) {
    Vector v = Vector::Zero(n + 1);
    v(n) = 1.0;
    return SpherePoint(std::move(v));
  }

  const Vector& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()) - 1; }
  int ambient_dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_(i); }

  bool same_as(const SpherePoint& o, double tol = kUnitNormTolerance) const {
    return coords_.size() == o.coords_.size() && (coords_ - o.coords_).norm() <= tol;
  }

 private:
  Vector coords_;
};

/// A vector of the tangent space at `base`, expressed in ambient coordinates.
class TangentVector {
 public:
  TangentVector(SpherePoint base, Vector vec) : base_(std::move(base)), vec_(std::move(vec)) {
    if (vec_.size() != base_.coords().size()) {
      throw InvalidArgument("TangentVector: dimension mismatch");
    }
    const double scale = std::max(1.0, vec_.norm());
    if (!(std::abs(base_.coords().dot(vec_)) <= kTangencyTolerance * scale)) {
      throw InvalidArgument("TangentVector: vector is not orthogonal to its base point");
    }
  }

  /// Orthogonal projection of an arbitrary ambient vector onto T_base.
  static TangentVector project(const SpherePoint& base, const Vector& v) {
    Vector t = v - base.coords().dot(v) * base.coords();
    return TangentVector(base, std::move(t));
  }

  static TangentVector zero(const SpherePoint& base) {
    return TangentVector(base, Vector::Zero(base.ambient_dim()));
  }

  const SpherePoint& base() const { return base_; }
  const Vector& vec() const { return vec_; }
  double norm() const { return vec_.norm(); }

 private:
  SpherePoint base_;
  Vector vec_;
};

/// Orthonormal basis of T_base, stored as the columns of an (n+1) x n matrix.
class TangentFrame {
 public:
  TangentFrame(SpherePoint base, Matrix axes) : base_(std::move(base)), axes_(std::move(axes)) {
    const int n = base_.dim();
    if (axes_.rows() != n + 1 || axes_.cols() != n) {
      throw InvalidArgument("TangentFrame: axes must be an (n+1) x n matrix");
    }
    const Matrix gram = axes_.transpose() * axes_;
    if ((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kFrameTolerance) {
      throw InvalidArgument("TangentFrame: axes are not orthonormal");
    }
    if ((axes_.transpose() * base_.coords()).cwiseAbs().maxCoeff() > kFrameTolerance) {
      throw InvalidArgument("TangentFrame: axes are not tangent");
    }
  }

  /// Frame whose first axis is `direction` (which must be nonzero).
  ///
  /// On S^2 the second axis is base x direction; in higher dimensions the
  /// remaining axes come from Gram-Schmidt over the coordinate axes.
  static TangentFrame adapted(const SpherePoint& base, const Vector& direction) {
    const Vector& x = base.coords();
    Vector d = direction - x.dot(direction) * x;
    const double len = d.norm();
    if (!(len > 0.0)) {
      throw InvalidArgument("TangentFrame::adapted: zero tangent direction");
    }
    d /= len;
    const int n = base.dim();
    Matrix axes(n + 1, n);
    axes.col(0) = d;
    if (n == 2) {
      const Eigen::Vector3d x3 = x.head<3>();
      const Eigen::Vector3d d3 = d.head<3>();
      axes.col(1) = x3.cross(d3);
    } else {
      Matrix seed(n + 1, n + 1);
      seed.col(0) = x;
      seed.col(1) = d;
      fill_by_gram_schmidt(seed, 2);
      axes.rightCols(n - 1) = seed.rightCols(n - 1);
    }
    return TangentFrame(base, std::move(axes));
  }

  /// Frame obtained by Gram-Schmidt over the coordinate axes.
  static TangentFrame standard(const SpherePoint& base) {
    const int n = base.dim();
    Matrix seed(n + 1, n + 1);
    seed.col(0) = base.coords();
    fill_by_gram_schmidt(seed, 1);
    return TangentFrame(base, seed.rightCols(n));
  }

  /// Adapted to `direction` when it is nonzero, standard otherwise.
  static TangentFrame adapted_or_standard(const SpherePoint& base, const Vector& direction) {
    const Vector& x = base.coords();
    if ((direction - x.dot(direction) * x).norm() > 1e-300) return adapted(base, direction);
    return standard(base);
  }

  const SpherePoint& base() const { return base_; }
  const Matrix& axes() const { return axes_; }
  int dim() const { return static_cast<int>(axes_.cols()); }

  /// Coordinates of a tangent vector in this frame.
  Vector coordinates(const Vector& ambient) const { return axes_.transpose() * ambient; }
  /// Ambient vector with the given frame coordinates.
  Vector ambient(const Vector& coords) const { return axes_ * coords; }

 private:
  // Completes columns [filled, n+1) of `seed` to an orthonormal basis, picking
  // at each step the coordinate axis with the largest residual.
  static void fill_by_gram_schmidt(Matrix& seed, int filled) {
    const int m = static_cast<int>(seed.rows());
    for (int c = 0; c < filled; ++c) {
      for (int p = 0; p < c; ++p) seed.col(c) -= seed.col(p).dot(seed.col(c)) * seed.col(p);
      seed.col(c).normalize();
    }
    for (int c = filled; c < m; ++c) {
      Vector best;
      double best_norm = -1.0;
      for (int k = 0; k < m; ++k) {
        Vector e = Vector::Unit(m, k);
        for (int pass = 0; pass < 2; ++pass) {
          for (int p = 0; p < c; ++p) e -= seed.col(p).dot(e) * seed.col(p);
        }
        const double en = e.norm();
        if (en > best_norm) {
          best_norm = en;
          best = e;
        }
      }
      seed.col(c) = best / best_norm;
    }
  }

  SpherePoint base_;
  Matrix axes_;
};

/// Symmetric operator on a tangent space, given by its matrix in `frame`.
class SymOperator {
 public:
  SymOperator(TangentFrame frame, Matrix matrix) : frame_(std::move(frame)), matrix_(std::move(matrix)) {
    const int n = frame_.dim();
    if (matrix_.rows() != n || matrix_.cols() != n) {
      throw InvalidArgument("SymOperator: matrix size does not match the frame");
    }
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
      throw NotSymmetric("SymOperator: matrix is not symmetric");
    }
  }

  static SymOperator identity(const TangentFrame& frame) {
    return SymOperator(frame, Matrix::Identity(frame.dim(), frame.dim()));
  }

  const TangentFrame& frame() const { return frame_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return frame_.dim(); }

  /// <M t, t> for an ambient tangent vector t.
  double quadratic_form(const Vector& t) const {
    const Vector c = frame_.coordinates(t);
    return c.dot(matrix_ * c);
  }

  /// The same operator expressed in another frame at the same base point.
  SymOperator in_frame(const TangentFrame& other) const {
    const Matrix change = frame_.axes().transpose() * other.axes();
    Matrix m = change.transpose() * matrix_ * change;
    m = 0.5 * (m + m.transpose());
    return SymOperator(other, std::move(m));
  }

  /// Ambient (n+1) x (n+1) matrix acting as the operator on T and as 0 on the normal.
  Matrix ambient() const { return frame_.axes() * matrix_ * frame_.axes().transpose(); }

 private:
  TangentFrame frame_;
  Matrix matrix_;
};

}  // namespace sphot
