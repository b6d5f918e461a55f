#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "sphot/numeric/gauss_legendre.hpp"
#include "sphot/sphere/green.hpp"
#include "sphot/transport/wasserstein.hpp"

namespace sphot {

struct MollifyOptions {
  /// Cap radius in units of the grid spacing pi / n_colat.
  double cap_cells = 3.0;
};

/// Replaces each atom by a normalized indicator of the geodesic cap of
/// radius r around it, discretized on the grid nodes with their quadrature
/// weights.  Returns grid-node masses (length grid.size()).
inline std::vector<double> mollify_onto_grid(const DiscreteMeasure& mu, const SphereGrid& grid, double radius) {
  if (mu.dim() != grid.dim()) throw InvalidArgument("mollify: dimension mismatch");
  std::vector<double> mass(grid.size(), 0.0);
  const double cos_r = std::cos(radius);
  std::vector<int> cap;
  for (int k = 0; k < mu.size(); ++k) {
    if (mu.weight(k) == 0.0) continue;
    cap.clear();
    double cap_weight = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      if (grid.coords(i).dot(mu.points().col(k)) >= cos_r) {
        cap.push_back(i);
        cap_weight += grid.weight(i);
      }
    }
    if (cap.empty()) throw InvalidArgument("mollify: cap radius is below the grid resolution");
    for (int i : cap) mass[i] += mu.weight(k) * grid.weight(i) / cap_weight;
  }
  return mass;
}

inline DiscreteMeasure mollify(const DiscreteMeasure& mu, const SphereGrid& grid, double radius) {
  return DiscreteMeasure::normalized(grid.points(), mollify_onto_grid(mu, grid, radius)).support();
}

/// Green potential u(x) = int G(x, c) d(mu_r - nu_r)(c) of cap-mollified
/// measures, where every atom is spread uniformly over the geodesic cap of
/// radius r around it.  Each cap is zonal, so its field follows from the flux
/// through the circle at distance theta:
///   du/dtheta = (A(theta) / 4 pi - m(theta)) / (2 pi sin theta),
/// with A the cap area and m the enclosed fraction of the atom's mass.
class CapPotential {
 public:
  CapPotential(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double radius) : radius_(radius) {
    if (mu.dim() != 2 || nu.dim() != 2) throw DimensionUnsupported("Green potentials are provided on S^2 only");
    if (!(radius > 0.0 && radius < std::numbers::pi)) throw InvalidArgument("CapPotential: radius out of range");
    add(mu, 1.0);
    add(nu, -1.0);
  }

  Eigen::Vector3d gradient(const Eigen::Vector3d& x) const {
    const double cap = 1.0 - std::cos(radius_);
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < charge_.size(); ++k) {
      const Eigen::Vector3d& c = centers_[k];
      const Eigen::Vector3d t = c - x.dot(c) * x;  // points towards c
      const double s = t.norm();
      if (s == 0.0) continue;
      const double one_minus_cos = 0.5 * (x - c).squaredNorm();
      const double enclosed = std::min(1.0, one_minus_cos / cap);
      // -du/dtheta along the unit vector towards c.
      const double pull = (enclosed - 0.5 * one_minus_cos) / (2.0 * std::numbers::pi * s);
      g += charge_[k] * pull / s * t;
    }
    return g;
  }

  bool empty() const { return charge_.empty(); }
  double radius() const { return radius_; }

 private:
  void add(const DiscreteMeasure& m, double sign) {
    for (int k = 0; k < m.size(); ++k) {
      if (m.weight(k) == 0.0) continue;
      centers_.emplace_back(m.points().col(k));
      charge_.push_back(sign * m.weight(k));
    }
  }

  double radius_;
  std::vector<Eigen::Vector3d> centers_;
  std::vector<double> charge_;
};

struct GreenBoundResult {
  double lhs = 0.0;  ///< W_1 of the mollified measures
  double rhs = 0.0;  ///< int |grad G(mu - nu)| dA over the surface
  double mollification_radius = 0.0;
  int mu_support = 0;
  int nu_support = 0;
};

/// W_1(mu, nu) <= int_{S^2} |grad_x int G(x, y) (mu - nu)(dy)| dA(x), checked
/// on cap-mollified surrogates of mu and nu.  The left side is the exact W_1
/// of the caps discretized on the grid nodes; the right side integrates the
/// closed-form cap field by quadrature.  dA is surface area (total 4 pi).
inline GreenBoundResult green_w1_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GridSpec& spec,
                                       const MollifyOptions& opt = {}) {
  if (spec.dim != 2 || mu.dim() != 2 || nu.dim() != 2) {
    throw DimensionUnsupported("green_w1_bound: S^2 only");
  }
  const SphereGrid grid(spec);
  GreenBoundResult r;
  r.mollification_radius = opt.cap_cells * std::numbers::pi / spec.n_colat;
  const auto mu_mass = mollify_onto_grid(mu, grid, r.mollification_radius);
  const auto nu_mass = mollify_onto_grid(nu, grid, r.mollification_radius);
  if (mu_mass == nu_mass) return r;
  const CapPotential u(mu, nu, r.mollification_radius);

  const DiscreteMeasure mu_s = DiscreteMeasure::normalized(grid.points(), mu_mass).support();
  const DiscreteMeasure nu_s = DiscreteMeasure::normalized(grid.points(), nu_mass).support();
  r.mu_support = mu_s.size();
  r.nu_support = nu_s.size();
  r.lhs = wasserstein_p(mu_s, nu_s, 1.0, OTMethod::exact_lp).value;

  numeric::CompensatedSum s;
  for (int i = 0; i < grid.size(); ++i) s += grid.weight(i) * u.gradient(grid.coords(i)).norm();
  r.rhs = 4.0 * std::numbers::pi * s.value();
  return r;
}

/// Average of phi over the geodesic cap of radius r around c, by
/// Gauss-Legendre quadrature in the distance from c and the trapezoid rule in
/// the angle around it.
inline double cap_average(const ScalarField& phi, const Eigen::Vector3d& c, double radius, int n_radial = 24,
                          int n_angle = 48) {
  const Eigen::Vector3d a = (std::abs(c(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY())
                                .cross(c)
                                .normalized();
  const Eigen::Vector3d b = c.cross(a);
  // In u = 1 - cos(theta) the area element is du dalpha.
  const auto rule = numeric::gauss_legendre(n_radial, 0.0, 1.0 - std::cos(radius));
  numeric::CompensatedSum s;
  for (int i = 0; i < n_radial; ++i) {
    const double ct = 1.0 - rule.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int k = 0; k < n_angle; ++k) {
      const double al = 2.0 * std::numbers::pi * k / n_angle;
      const Eigen::Vector3d x = ct * c + st * (std::cos(al) * a + std::sin(al) * b);
      s += rule.weights[i] * phi.value_at(x.data());
    }
  }
  return s.value() / (n_angle * (1.0 - std::cos(radius)));
}

struct DualityResidual {
  double measure_side = 0.0;    ///< int phi d(mu - nu)
  double dirichlet_side = 0.0;  ///< int <grad phi, grad G(mu - nu)> dA
  double residual = 0.0;
};

/// Compares int phi d(mu - nu) with the Dirichlet pairing of phi against the
/// Green potential of mu - nu (integration by parts, surface measure).
inline DualityResidual green_duality_residual(const ScalarField& phi, const DiscreteMeasure& mu,
                                              const DiscreteMeasure& nu, const GridSpec& spec,
                                              const MollifyOptions& opt = {}) {
  if (spec.dim != 2) throw DimensionUnsupported("green_duality_residual: S^2 only");
  const SphereGrid grid(spec);
  const double radius = opt.cap_cells * std::numbers::pi / spec.n_colat;
  const CapPotential u(mu, nu, radius);
  DualityResidual r;
  numeric::CompensatedSum m, d;
  for (int i = 0; i < grid.size(); ++i) {
    const SpherePoint x = grid.point(i);
    const Eigen::Vector3d gu = u.gradient(grid.coords(i));
    const Eigen::Vector3d gp = phi.gradient(x).vec();
    d += grid.weight(i) * gp.dot(gu);
  }
  for (int k = 0; k < mu.size(); ++k) m += mu.weight(k) * cap_average(phi, mu.points().col(k), radius);
  for (int k = 0; k < nu.size(); ++k) m += -nu.weight(k) * cap_average(phi, nu.points().col(k), radius);
  r.measure_side = m.value();
  r.dirichlet_side = 4.0 * std::numbers::pi * d.value();
  r.residual = std::abs(r.measure_side - r.dirichlet_side);
  return r;
}

}  // namespace sphot
