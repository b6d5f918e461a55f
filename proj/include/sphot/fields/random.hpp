#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sphot/fields/scalar_field.hpp"

namespace sphot {

/// Deterministic, roughly uniform points on S^n: a Fibonacci lattice on
/// S^2 and normalized Gaussian samples from a fixed seed otherwise.
inline std::vector<SpherePoint> spread_points(int dim, int count, std::uint64_t seed = 7) {
  std::vector<SpherePoint> pts;
  pts.reserve(count);
  if (dim == 2) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vector v(3);
      v << r * std::cos(golden * i), r * std::sin(golden * i), z;
      pts.push_back(SpherePoint::normalized(v));
    }
    return pts;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < count; ++i) {
    Vector v(dim + 1);
    for (int k = 0; k <= dim; ++k) v(k) = normal(rng);
    pts.push_back(SpherePoint::normalized(v));
  }
  return pts;
}

struct RandomFieldOptions {
  int degree = 4;
  std::uint64_t seed = 1;
  /// The field is scaled so its largest gradient norm on a fixed point set
  /// equals this value.
  double max_gradient = 1.0;
};

/// Random bandlimited field of degree <= options.degree.
///
/// On S^2 the field is mean-free, with independent normal coefficients of
/// variance (1 + l)^-4; on S^n, n >= 3, it is a sum of ridge monomials
/// <g, x>^l with random unit directions g.
inline ScalarField random_bandlimited(int dim, const RandomFieldOptions& opt = {}) {
  if (opt.degree < 1) throw InvalidArgument("random_bandlimited: degree must be at least 1");
  if (dim < 2 || dim + 1 > numeric::kMaxJetDim) {
    throw DimensionUnsupported("random_bandlimited: unsupported sphere dimension");
  }
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  ScalarField raw = ScalarField::zero(dim);
  if (dim == 2) {
    const int L = opt.degree;
    std::vector<double> c((L + 1) * (L + 1), 0.0);
    for (int l = 1; l <= L; ++l) {
      for (int m = -l; m <= l; ++m) {
        c[HarmonicExpansion::index(l, m)] = normal(rng) / ((1.0 + l) * (1.0 + l));
      }
    }
    raw = harmonic_field(L, std::move(c));
  } else {
    std::vector<RidgePolynomial::Term> terms;
    for (int l = 1; l <= opt.degree; ++l) {
      for (int k = 0; k < 2; ++k) {
        Vector g(dim + 1);
        for (int i = 0; i <= dim; ++i) g(i) = normal(rng);
        g.normalize();
        terms.push_back({g, l, normal(rng) / ((1.0 + l) * (1.0 + l))});
      }
    }
    raw = ScalarField(std::make_shared<RidgePolynomial>(dim, std::move(terms)));
  }
  double gmax = 0.0;
  for (const auto& p : spread_points(dim, 2000)) gmax = std::max(gmax, raw.gradient(p).norm());
  if (!(gmax > 0.0)) throw InvalidArgument("random_bandlimited: degenerate draw");
  return raw.scaled(opt.max_gradient / gmax);
}

}  // namespace sphot
