#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sphot/fields/scalar_field.hpp"
#include "sphot/numeric/special.hpp"

namespace sphot {

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kMarginalTolerance = 1e-9;

/// Finitely supported probability measure on S^n.  Points are the columns
/// of an (n+1) x N matrix.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Matrix points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.cols() != static_cast<long>(weights_.size()) || weights_.empty()) {
      throw InvalidArgument("DiscreteMeasure: need one weight per point and at least one point");
    }
    if (points_.rows() < 3) throw InvalidArgument("DiscreteMeasure: sphere dimension must be at least 2");
    numeric::CompensatedSum total;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("DiscreteMeasure: negative weight");
      total += w;
    }
    if (std::abs(total.value() - 1.0) > kMassTolerance) {
      throw InvalidArgument("DiscreteMeasure: weights do not sum to one");
    }
    for (long i = 0; i < points_.cols(); ++i) {
      if (std::abs(points_.col(i).norm() - 1.0) > kUnitNormTolerance) {
        throw InvalidArgument("DiscreteMeasure: point is not on the unit sphere");
      }
    }
  }

  static DiscreteMeasure dirac(const SpherePoint& x) { return DiscreteMeasure(Matrix(x.coords()), {1.0}); }

  /// Rescales nonnegative masses to total one.
  static DiscreteMeasure normalized(Matrix points, std::vector<double> masses) {
    numeric::CompensatedSum total;
    for (double m : masses) total += m;
    if (!(total.value() > 0.0)) throw InvalidArgument("DiscreteMeasure: zero total mass");
    for (double& m : masses) m /= total.value();
    return DiscreteMeasure(std::move(points), std::move(masses));
  }

  /// Grid quadrature measure, optionally reweighted by a nonnegative density.
  static DiscreteMeasure from_grid(const SphereGrid& grid) {
    return normalized(grid.points(), grid.weights());
  }
  static DiscreteMeasure from_grid(const SphereGrid& grid, const std::vector<double>& density) {
    if (static_cast<int>(density.size()) != grid.size()) {
      throw InvalidArgument("DiscreteMeasure::from_grid: density size mismatch");
    }
    std::vector<double> m(grid.size());
    for (int i = 0; i < grid.size(); ++i) m[i] = grid.weight(i) * density[i];
    return normalized(grid.points(), std::move(m));
  }

  int size() const { return static_cast<int>(weights_.size()); }
  int dim() const { return static_cast<int>(points_.rows()) - 1; }
  const Matrix& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int i) const { return weights_[i]; }
  SpherePoint point(int i) const { return SpherePoint(points_.col(i)); }

  /// Integral of a function of the ambient coordinates.
  template <class F>
  double integrate(F&& f) const {
    numeric::CompensatedSum s;
    for (int i = 0; i < size(); ++i) s += weights_[i] * f(point(i));
    return s.value();
  }

  /// Same measure with zero-weight atoms removed.
  DiscreteMeasure support() const {
    std::vector<int> keep;
    for (int i = 0; i < size(); ++i)
      if (weights_[i] > 0.0) keep.push_back(i);
    Matrix p(points_.rows(), static_cast<long>(keep.size()));
    std::vector<double> w(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      p.col(k) = points_.col(keep[k]);
      w[k] = weights_[keep[k]];
    }
    return normalized(std::move(p), std::move(w));
  }

 private:
  Matrix points_;
  std::vector<double> weights_;
};

/// A coupling of two discrete measures.
class TransportPlan {
 public:
  TransportPlan(DiscreteMeasure source, DiscreteMeasure target, Matrix coupling)
      : source_(std::move(source)), target_(std::move(target)), coupling_(std::move(coupling)) {
    if (coupling_.rows() != source_.size() || coupling_.cols() != target_.size()) {
      throw InvalidArgument("TransportPlan: coupling shape does not match the marginals");
    }
    if (coupling_.minCoeff() < 0.0) throw InvalidArgument("TransportPlan: negative mass");
    if (marginal_error() > kMarginalTolerance) {
      throw InvalidArgument("TransportPlan: marginals violated");
    }
  }

  const DiscreteMeasure& source() const { return source_; }
  const DiscreteMeasure& target() const { return target_; }
  const Matrix& coupling() const { return coupling_; }

  /// Largest absolute deviation of a row or column sum from its marginal.
  double marginal_error() const {
    double e = 0.0;
    for (int i = 0; i < source_.size(); ++i) e = std::max(e, std::abs(coupling_.row(i).sum() - source_.weight(i)));
    for (int j = 0; j < target_.size(); ++j) e = std::max(e, std::abs(coupling_.col(j).sum() - target_.weight(j)));
    return e;
  }

  /// sum_ij pi_ij c(x_i, y_j).
  template <class Cost>
  double cost(Cost&& c) const {
    numeric::CompensatedSum s;
    for (int i = 0; i < source_.size(); ++i)
      for (int j = 0; j < target_.size(); ++j)
        if (coupling_(i, j) > 0.0) s += coupling_(i, j) * c(i, j);
    return s.value();
  }

 private:
  DiscreteMeasure source_, target_;
  Matrix coupling_;
};

/// Geodesic distance 2 atan2(|x - y|, |x + y|): accurate at every separation
/// and exactly zero for identical points.
template <class A, class B>
double chord_distance(const A& x, const B& y) {
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

/// Matrix of d(x_i, y_j)^p.
inline Matrix distance_power_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b, double p) {
  if (a.dim() != b.dim()) throw InvalidArgument("measures live on spheres of different dimension");
  Matrix c(a.size(), b.size());
  for (long i = 0; i < c.rows(); ++i)
    for (long j = 0; j < c.cols(); ++j) {
      const double d = chord_distance(a.points().col(i), b.points().col(j));
      c(i, j) = p == 1.0 ? d : (p == 2.0 ? d * d : std::pow(d, p));
    }
  return c;
}

}  // namespace sphot
