#pragma once

#include <cmath>
#include <vector>

#include "sphot/fields/scalar_field.hpp"
#include "sphot/numeric/special.hpp"

namespace sphot {

inline constexpr double kDensityMassTolerance = 1e-9;

/// Ent = int v log v dmu for a density v of nu with respect to mu, given at
/// the atoms of a quadrature rule with weights `mu_weights`.  0 log 0 = 0.
inline double relative_entropy(const std::vector<double>& density, const std::vector<double>& mu_weights,
                               double mass_tolerance = kDensityMassTolerance) {
  if (density.size() != mu_weights.size()) throw InvalidArgument("relative_entropy: size mismatch");
  numeric::CompensatedSum mass, ent;
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double v = density[i];
    if (!(v >= 0.0) || !std::isfinite(v)) throw NotADensity("relative_entropy: negative or non-finite density");
    mass += mu_weights[i] * v;
    if (v > 0.0) ent += mu_weights[i] * v * std::log(v);
  }
  if (std::abs(mass.value() - 1.0) > mass_tolerance) {
    throw NotADensity("relative_entropy: density does not integrate to one (mass " +
                      std::to_string(mass.value()) + ")");
  }
  return ent.value();
}

/// Reference measure mu = e^{-U} dx on a grid, with U normalized so that mu
/// is a probability measure.
class GridMeasure {
 public:
  GridMeasure(SphereGrid grid, const ScalarField& U) : grid_(std::move(grid)), weights_(grid_.size()) {
    if (U.dim() != grid_.dim()) throw InvalidArgument("GridMeasure: dimension mismatch");
    const GridFunction u = U.sample(grid_);
    const double shift = *std::min_element(u.values.begin(), u.values.end());
    numeric::CompensatedSum z;
    for (int i = 0; i < grid_.size(); ++i) {
      weights_[i] = grid_.weight(i) * std::exp(-(u.values[i] - shift));
      z += weights_[i];
    }
    for (double& w : weights_) w /= z.value();
    log_normalizer_ = std::log(z.value()) - shift;
  }

  explicit GridMeasure(SphereGrid grid) : GridMeasure(grid, ScalarField::zero(grid.dim())) {}

  const SphereGrid& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int i) const { return weights_[i]; }
  int size() const { return grid_.size(); }
  /// log of int e^{-U} dx.
  double log_normalizer() const { return log_normalizer_; }

  double integrate(const std::vector<double>& values) const {
    numeric::CompensatedSum s;
    for (int i = 0; i < size(); ++i) s += weights_[i] * values[i];
    return s.value();
  }

 private:
  SphereGrid grid_;
  std::vector<double> weights_;
  double log_normalizer_ = 0.0;
};

inline double relative_entropy(const GridFunction& density, const GridMeasure& mu,
                               double mass_tolerance = kDensityMassTolerance) {
  if (!density.grid.same_nodes(mu.grid())) throw InvalidArgument("relative_entropy: grids differ");
  return relative_entropy(density.values, mu.weights(), mass_tolerance);
}

}  // namespace sphot
