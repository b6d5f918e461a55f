#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "sphot/fields/c_transform.hpp"
#include "sphot/transport/measure.hpp"
#include "sphot/transport/network_simplex.hpp"
#include "sphot/transport/sinkhorn.hpp"

namespace sphot {

enum class OTMethod { exact_lp, entropic };

inline constexpr int kExactSupportLimit = 2000;

struct OTOptions {
  /// Entropic regularization, in units of the cost d^p.
  double epsilon = 0.05;
  int max_iterations = 20000;
  double marginal_tolerance = 1e-9;
  /// Compute the debiased entropic estimate (two extra self-transport solves).
  bool debias = true;
};

struct WassersteinResult {
  double value = 0.0;  ///< W_p
  double cost = 0.0;   ///< W_p^p as transported by the returned plan
  TransportPlan plan;
  OTMethod method = OTMethod::exact_lp;
  double epsilon = 0.0;
  /// Entropic only: OT_eps(mu,nu) - (OT_eps(mu,mu) + OT_eps(nu,nu)) / 2.
  std::optional<double> debiased_cost;
  int iterations = 0;
};

/// W_p between discrete measures with geodesic cost d^p.
inline WassersteinResult wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                       OTMethod method = OTMethod::exact_lp, const OTOptions& opt = {}) {
  if (!(p >= 1.0)) throw InvalidArgument("wasserstein_p: p must be at least 1");
  const Matrix c = distance_power_matrix(mu, nu, p);
  if (method == OTMethod::exact_lp) {
    if (mu.size() > kExactSupportLimit || nu.size() > kExactSupportLimit) {
      throw SizeLimit("wasserstein_p: exact solver supports at most 2000 points per side");
    }
    transport_detail::NetworkSimplex ns(c, mu.weights(), nu.weights());
    auto r = ns.solve();
    const double cost = std::max(0.0, r.cost);
    return {std::pow(cost, 1.0 / p), cost, TransportPlan(mu, nu, std::move(r.flow)), method, 0.0,
            std::nullopt, static_cast<int>(r.pivots)};
  }
  auto solve = [&](const Matrix& cm, const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return transport_detail::sinkhorn_log(cm, a.weights(), b.weights(), opt.epsilon, opt.max_iterations,
                                          opt.marginal_tolerance);
  };
  auto r = solve(c, mu, nu);
  std::optional<double> debiased;
  if (opt.debias) {
    auto self = [&](const DiscreteMeasure& m) {
      return transport_detail::sinkhorn_symmetric_value(distance_power_matrix(m, m, p), m.weights(), opt.epsilon,
                                                        opt.max_iterations, opt.marginal_tolerance);
    };
    debiased = r.dual_value - 0.5 * (self(mu) + self(nu));
  }
  const double cost = std::max(0.0, r.transport_cost);
  return {std::pow(cost, 1.0 / p), cost, TransportPlan(mu, nu, std::move(r.plan)), method,
          opt.epsilon, debiased, r.iterations};
}

/// Pushforward of mu under Psi_t: atoms move, weights stay.
inline DiscreteMeasure pushforward(const DiscreteMeasure& mu, const ScalarField& psi, double t,
                                   const GeometryConfig& cfg = {}) {
  Matrix pts(mu.points().rows(), mu.size());
  for (int i = 0; i < mu.size(); ++i) pts.col(i) = transport_map(psi, mu.point(i), t, cfg).coords();
  return DiscreteMeasure(std::move(pts), mu.weights());
}

struct PotentialCost {
  double gradient_form = 0.0;  ///< int |grad psi|^2 dmu
  double distance_form = 0.0;  ///< int d(Psi(x), x)^2 dmu
  double certification_margin = 0.0;
};

/// W_2^2 transported by the map exp_x(grad psi), evaluated both ways.
/// The potential must pass check_c_concavity on `certification_grid`.
inline PotentialCost transport_cost_of_potential(const ScalarField& psi, const DiscreteMeasure& mu,
                                                 const SphereGrid& certification_grid,
                                                 const GeometryConfig& cfg = {}) {
  const auto cert = check_c_concavity(psi, certification_grid, 1e-8, cfg);
  if (!cert.certified) throw NotCConcave("transport_cost_of_potential: potential is not c-concave");
  PotentialCost r;
  r.certification_margin = cert.margin;
  numeric::CompensatedSum g, d;
  for (int i = 0; i < mu.size(); ++i) {
    const SpherePoint x = mu.point(i);
    const TangentVector v = psi.gradient(x);
    g += mu.weight(i) * v.vec().squaredNorm();
    const double dist = geodesic_distance(transport_map(psi, x, 1.0, cfg), x);
    d += mu.weight(i) * dist * dist;
  }
  r.gradient_form = g.value();
  r.distance_form = d.value();
  return r;
}

/// Writes the nonzero entries of a plan as "i,j,mass" lines.
inline void write_plan_csv(const TransportPlan& plan, std::ostream& out) {
  out << "i,j,mass\n";
  out.precision(17);
  const Matrix& c = plan.coupling();
  for (long i = 0; i < c.rows(); ++i)
    for (long j = 0; j < c.cols(); ++j)
      if (c(i, j) > 0.0) out << i << ',' << j << ',' << c(i, j) << '\n';
}

}  // namespace sphot
