#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sphot/fields/scalar_field.hpp"

namespace sphot {

namespace detail {

// Geodesic distance between grid nodes, evaluated with the smaller index
// first so the cost is exactly symmetric.
inline double node_distance(const SphereGrid& g, int i, int j) {
  if (i > j) std::swap(i, j);
  const auto x = g.coords(i);
  const auto y = g.coords(j);
  const double c = x.dot(y);
  const double s = (y - c * x).norm();
  return std::atan2(s, c);
}

// Rounds to a multiple of 2^-40.  Sums and differences of such numbers below
// 2^12 in magnitude are exact in double precision, which makes the discrete
// transform exactly idempotent.
inline double snap(double v) { return std::ldexp(std::nearbyint(std::ldexp(v, 40)), -40); }

}  // namespace detail

/// phi^c(y) = min over grid nodes w of d(y, w)^2 / 2 - phi(w).
///
/// Costs and inputs are snapped to a 2^-40 lattice first, so phi^ccc = phi^c
/// holds exactly on the grid.  Ties resolve to the lowest node index.
inline GridFunction c_transform(const GridFunction& phi) {
  const SphereGrid& g = phi.grid;
  GridFunction out(g);
  std::vector<double> snapped(phi.values.size());
  for (std::size_t i = 0; i < snapped.size(); ++i) snapped[i] = detail::snap(phi.values[i]);
  for (int y = 0; y < g.size(); ++y) {
    double best = std::numeric_limits<double>::infinity();
    for (int w = 0; w < g.size(); ++w) {
      const double d = detail::node_distance(g, y, w);
      const double v = detail::snap(0.5 * d * d) - snapped[w];
      if (v < best) best = v;
    }
    out.values[y] = best;
  }
  return out;
}

inline GridFunction c_transform(const ScalarField& phi, const SphereGrid& grid) {
  return c_transform(phi.sample(grid));
}

struct CConcavityReport {
  bool certified = false;
  /// Largest violation found; infinite when a gradient reaches the cut locus.
  double margin = 0.0;
  double tolerance = 1e-8;
  int worst_node = -1;
};

/// Certifies that x -> exp_x(grad psi(x)) is the c-optimal map on `grid`.
///
/// For each node x with y = Psi(x), the function w -> d(y, w)^2 / 2 + psi(w)
/// must attain its minimum over the grid at w = x.  The excess of its value
/// at x over the grid minimum is an upper bound for ((-psi)^cc - (-psi))(x),
/// with y ranging over the image points; the margin is its maximum.
inline CConcavityReport check_c_concavity(const ScalarField& psi, const SphereGrid& grid,
                                          double tolerance = 1e-8, const GeometryConfig& cfg = {}) {
  CConcavityReport r;
  r.tolerance = tolerance;
  const GridFunction vals = psi.sample(grid);
  const int N = grid.size();
  for (int i = 0; i < N; ++i) {
    const SpherePoint x = grid.point(i);
    const TangentVector gx = psi.gradient(x);
    if (!(gx.norm() < std::numbers::pi - cfg.cut_margin)) {
      r.margin = std::numeric_limits<double>::infinity();
      r.worst_node = i;
      r.certified = false;
      return r;
    }
    const SpherePoint y = exp_map(x, gx, cfg);
    const Vector& yc = y.coords();
    const double dx = gx.norm();
    const double at_x = 0.5 * dx * dx + vals.values[i];
    double best = at_x;
    for (int w = 0; w < N; ++w) {
      const auto wc = grid.coords(w);
      const double c = yc.dot(wc);
      const double d = std::atan2((wc - c * yc).norm(), c);
      best = std::min(best, 0.5 * d * d + vals.values[w]);
    }
    const double dev = at_x - best;
    if (dev > r.margin) {
      r.margin = dev;
      r.worst_node = i;
    }
  }
  r.certified = r.margin <= tolerance;
  return r;
}

struct ScaledPotential {
  ScalarField psi;
  double epsilon = 0.0;
  CConcavityReport certificate;
};

/// Scales `base` by epsilon = eps0, eps0 / 2, ... until the result passes
/// check_c_concavity on `grid`.
inline ScaledPotential scale_until_c_concave(const ScalarField& base, const SphereGrid& grid, double eps0 = 0.05,
                                             int max_halvings = 20, const GeometryConfig& cfg = {}) {
  double eps = eps0;
  for (int k = 0; k <= max_halvings; ++k, eps *= 0.5) {
    ScalarField psi = base.scaled(eps);
    auto cert = check_c_concavity(psi, grid, 1e-8, cfg);
    if (cert.certified) return {std::move(psi), eps, cert};
  }
  throw NotCConcave("scale_until_c_concave: no admissible scale found");
}

}  // namespace sphot
