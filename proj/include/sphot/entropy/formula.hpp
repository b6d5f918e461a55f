#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sphot/entropy/carleman.hpp"
#include "sphot/entropy/k_function.hpp"
#include "sphot/entropy/relative_entropy.hpp"
#include "sphot/fields/c_transform.hpp"
#include "sphot/numeric/gauss_legendre.hpp"

namespace sphot {

enum class JacobianMethod {
  /// log J_exp(grad psi) + log det(A + H).
  chain_rule,
  /// Fourth-order central differences of the map itself, with the grid
  /// spacing as step.
  measured,
};

struct EntropyOptions {
  int t_nodes = 16;
  GeometryConfig geometry;
  /// Allowed deviation of the reconstructed density's mass from one.
  double mass_tolerance = 1e-6;
  int newton_max_iterations = 50;
  double newton_tolerance = 1e-12;
  bool compute_direct = true;
};

/// Integrand terms of the entropy formula at one point.
struct PointTerms {
  double trace_term = 0.0;     ///< trace(H - log(A + H))
  double jacobian_term = 0.0;  ///< -log J_exp(grad psi)
  double u_line = 0.0;         ///< int_0^1 (1 - t) d^2/dt^2 U(Psi_t) dt
  double carleman = 0.0;       ///< -log det2(A + H)
  double trace_i_minus_a = 0.0;
  double k_term = 0.0;         ///< (n - 1) K(|grad psi|)
  double gradient_sq = 0.0;
  double u_line_32 = 0.0;      ///< u_line with 32 nodes, for the error estimate
};

namespace detail {

// A + H in a frame whose first axis follows grad psi.
struct MapLinearization {
  TangentFrame frame;
  Matrix a_plus_h;
  Matrix h;
  double rho;
};

inline MapLinearization linearize(const ScalarField& psi, const SpherePoint& x, const GeometryConfig& cfg) {
  const LocalJet j = psi.jet(x);
  const double rho = j.gradient.norm();
  if (!(rho < std::numbers::pi - cfg.cut_margin)) {
    throw CutLocusViolation("gradient of the potential reaches the cut locus");
  }
  TangentFrame frame = rho > 0.0 ? TangentFrame::adapted(x, j.gradient) : TangentFrame::standard(x);
  const int n = x.dim();
  Matrix a = Matrix::Identity(n, n) * numeric::t_over_tan(rho);
  a(0, 0) = 1.0;
  Matrix h = j.hessian_in(frame);
  return {std::move(frame), a + h, std::move(h), rho};
}

}  // namespace detail

/// int_0^1 (1 - t) <Hess U(Psi_t x) dPsi_t/dt, dPsi_t/dt> dt by Gauss-Legendre.
/// Along the geodesic t -> Psi_t(x) this is the second derivative of U(Psi_t(x)).
inline double u_hessian_line_integral(const ScalarField& psi, const ScalarField& U, const SpherePoint& x,
                                      int nodes = 16, const GeometryConfig& cfg = {}) {
  const auto rule = numeric::gauss_legendre(nodes, 0.0, 1.0);
  numeric::CompensatedSum s;
  for (int k = 0; k < nodes; ++k) {
    const double t = rule.nodes[k];
    const TangentVector v = transport_velocity(psi, x, t, cfg);
    if (v.norm() == 0.0) continue;
    const LocalJet ju = U.jet(v.base());
    s += rule.weights[k] * (1.0 - t) * v.vec().dot(ju.hessian * v.vec());
  }
  return s.value();
}

inline PointTerms entropy_terms_at(const ScalarField& psi, const ScalarField& U, const SpherePoint& x,
                                   const EntropyOptions& opt = {}) {
  const auto lin = detail::linearize(psi, x, opt.geometry);
  const int n = x.dim();
  PointTerms p;
  p.gradient_sq = lin.rho * lin.rho;
  p.trace_term = lin.h.trace() - log_det_spd(lin.a_plus_h);
  p.jacobian_term = (n - 1) * numeric::log_t_over_sin(lin.rho);
  p.carleman = carleman_log_det2(lin.a_plus_h);
  p.trace_i_minus_a = (n - 1) * (1.0 - numeric::t_over_tan(lin.rho));
  p.k_term = (n - 1) * k_function(lin.rho);
  p.u_line = u_hessian_line_integral(psi, U, x, opt.t_nodes, opt.geometry);
  p.u_line_32 = u_hessian_line_integral(psi, U, x, 2 * opt.t_nodes, opt.geometry);
  return p;
}

/// log J_Psi(x) = log J_exp(grad psi) + log det(A + H).
inline double log_jacobian_chain_rule(const ScalarField& psi, const SpherePoint& x, const GeometryConfig& cfg = {}) {
  const auto lin = detail::linearize(psi, x, cfg);
  return -(x.dim() - 1) * numeric::log_t_over_sin(lin.rho) + log_det_spd(lin.a_plus_h);
}

namespace detail {

// Columns: derivative of Psi along each frame axis at x, as tangent vectors
// at Psi(x).  order 2 or 4 central differences.
inline Matrix map_differential_fd(const ScalarField& psi, const SpherePoint& x, const TangentFrame& frame,
                                  double h, int order, const GeometryConfig& cfg) {
  const SpherePoint px = transport_map(psi, x, 1.0, cfg);
  const int n = x.dim();
  Matrix d(x.ambient_dim(), n);
  auto sample = [&](int i, double s) {
    const SpherePoint q = exp_map(x, TangentVector(x, s * frame.axes().col(i)), cfg);
    return log_map(px, transport_map(psi, q, 1.0, cfg), cfg).vec();
  };
  for (int i = 0; i < n; ++i) {
    if (order == 2) {
      d.col(i) = (sample(i, h) - sample(i, -h)) / (2.0 * h);
    } else {
      d.col(i) = (-sample(i, 2 * h) + 8.0 * sample(i, h) - 8.0 * sample(i, -h) + sample(i, -2 * h)) / (12.0 * h);
    }
  }
  return d;
}

}  // namespace detail

/// Jacobian of Psi measured by fourth-order differences with step h.
inline double log_jacobian_measured(const ScalarField& psi, const SpherePoint& x, double h,
                                    const GeometryConfig& cfg = {}) {
  const TangentFrame frame = TangentFrame::standard(x);
  // Where grad psi and Hess psi vanish, D Psi = I exactly.
  if (psi.gradient(x).vec().isZero(0.0) && psi.hessian(x, frame).matrix().isZero(0.0)) return 0.0;
  const Matrix d = detail::map_differential_fd(psi, x, frame, h, 4, cfg);
  return 0.5 * std::log((d.transpose() * d).determinant());
}

/// Solves Psi(x) = y by Gauss-Newton on the sphere.
inline SpherePoint invert_transport_map(const ScalarField& psi, const SpherePoint& y, const EntropyOptions& opt = {}) {
  const auto& cfg = opt.geometry;
  SpherePoint x = exp_map(y, TangentVector(y, -psi.gradient(y).vec()), cfg);
  double res = log_map(transport_map(psi, x, 1.0, cfg), y, cfg).norm();
  for (int it = 0; it < opt.newton_max_iterations && res > opt.newton_tolerance; ++it) {
    const SpherePoint px = transport_map(psi, x, 1.0, cfg);
    const Vector r = log_map(px, y, cfg).vec();
    const TangentFrame frame = TangentFrame::standard(x);
    const Matrix d = detail::map_differential_fd(psi, x, frame, 1e-6, 2, cfg);
    const Vector delta = (d.transpose() * d).ldlt().solve(d.transpose() * r);
    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 20; ++k, step *= 0.5) {
      const SpherePoint cand = exp_map(x, TangentVector(x, step * frame.ambient(delta)), cfg);
      const double cres = log_map(transport_map(psi, cand, 1.0, cfg), y, cfg).norm();
      if (cres < res) {
        x = cand;
        res = cres;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(res <= 1e-9)) throw SolverNotConverged("invert_transport_map: Newton iteration did not converge");
  return x;
}

struct DensityFromMap {
  GridFunction density;  ///< v = d nu / d mu at the grid nodes
  double mass = 0.0;     ///< int v dmu
};

/// Density of nu = Psi_# mu with respect to mu, from
/// log v(Psi x) = U(Psi x) - U(x) - log J_Psi(x), evaluated at each grid
/// node y = Psi(x) after inverting the map.
inline DensityFromMap density_from_map(const ScalarField& psi, const ScalarField& U, const GridMeasure& mu,
                                       JacobianMethod method = JacobianMethod::chain_rule,
                                       const EntropyOptions& opt = {}) {
  const SphereGrid& grid = mu.grid();
  DensityFromMap r{GridFunction(grid), 0.0};
  const double h = grid.spacing();
  for (int i = 0; i < grid.size(); ++i) {
    const SpherePoint y = grid.point(i);
    const SpherePoint x = invert_transport_map(psi, y, opt);
    const double log_j = method == JacobianMethod::chain_rule ? log_jacobian_chain_rule(psi, x, opt.geometry)
                                                              : log_jacobian_measured(psi, x, h, opt.geometry);
    r.density.values[i] = std::exp(U.value(y) - U.value(x) - log_j);
  }
  r.mass = mu.integrate(r.density.values);
  return r;
}

struct EntropyReport {
  double direct_entropy = 0.0;             ///< measured-Jacobian density, then int v log v
  double direct_entropy_chain_rule = 0.0;  ///< analytic Jacobian, then int v log v
  double density_mass = 1.0;
  double trace_term = 0.0;
  double jacobian_term = 0.0;
  double u_line_term = 0.0;
  double rhs_total = 0.0;
  double carleman_term = 0.0;
  double k_term = 0.0;
  double split_total = 0.0;  ///< carleman + K + U-line regrouping of rhs_total
  double w2_squared = 0.0;
  double kappa = 0.0;
  double max_gradient_norm = 0.0;
  double t_integration_error = 0.0;  ///< max |16-node - 32-node| over grid points
  GridSpec grid;
  int t_nodes = 16;

  double relative_gap() const {
    return std::abs(direct_entropy - rhs_total) / std::max(std::abs(direct_entropy), 1e-6);
  }
};

/// kappa_U = min over grid nodes of the smallest eigenvalue of (n-1) I + Hess U.
inline double kappa_of_potential(const ScalarField& U, const SphereGrid& grid) {
  const int n = grid.dim();
  double kappa = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    const SpherePoint x = grid.point(i);
    const Matrix h = U.jet(x).hessian_in(TangentFrame::standard(x));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h + (n - 1) * Matrix::Identity(n, n), Eigen::EigenvaluesOnly);
    kappa = std::min(kappa, es.eigenvalues()(0));
  }
  return kappa;
}

/// Assembles every term of the entropy formula over mu = e^{-U} dx on the
/// grid, alongside the entropy of the pushforward computed directly.
inline EntropyReport entropy_formula_rhs(const ScalarField& psi, const ScalarField& U, const GridMeasure& mu,
                                         const EntropyOptions& opt = {}) {
  const SphereGrid& grid = mu.grid();
  EntropyReport r;
  r.grid = grid.spec();
  r.t_nodes = opt.t_nodes;
  numeric::CompensatedSum tr, jac, ul, car, kt, w2;
  for (int i = 0; i < grid.size(); ++i) {
    const SpherePoint x = grid.point(i);
    const PointTerms p = entropy_terms_at(psi, U, x, opt);
    const double w = mu.weight(i);
    tr += w * p.trace_term;
    jac += w * p.jacobian_term;
    ul += w * p.u_line;
    car += w * p.carleman;
    kt += w * p.k_term;
    w2 += w * p.gradient_sq;
    r.max_gradient_norm = std::max(r.max_gradient_norm, std::sqrt(p.gradient_sq));
    r.t_integration_error = std::max(r.t_integration_error, std::abs(p.u_line - p.u_line_32));
  }
  r.trace_term = tr.value();
  r.jacobian_term = jac.value();
  r.u_line_term = ul.value();
  r.rhs_total = r.trace_term + r.jacobian_term + r.u_line_term;
  r.carleman_term = car.value();
  r.k_term = kt.value();
  r.split_total = r.carleman_term + r.k_term + r.u_line_term;
  r.w2_squared = w2.value();
  r.kappa = kappa_of_potential(U, grid);
  if (opt.compute_direct) {
    const auto measured = density_from_map(psi, U, mu, JacobianMethod::measured, opt);
    r.density_mass = measured.mass;
    r.direct_entropy = relative_entropy(measured.density, mu, opt.mass_tolerance);
    const auto analytic = density_from_map(psi, U, mu, JacobianMethod::chain_rule, opt);
    r.direct_entropy_chain_rule = relative_entropy(analytic.density, mu, opt.mass_tolerance);
  }
  return r;
}

struct TalagrandReport {
  double entropy = 0.0;
  double w2_squared = 0.0;
  double kappa = 0.0;
  double slack = 0.0;  ///< Ent - (kappa / 2) W_2^2
  double tolerance = 1e-6;
  double certification_margin = 0.0;
  bool pass = false;
};

/// Ent(nu | mu) >= (kappa_U / 2) W_2(nu, mu)^2 for nu = Psi_# mu.
inline TalagrandReport talagrand_check(const ScalarField& psi, const ScalarField& U, const GridMeasure& mu,
                                       const SphereGrid& certification_grid, double tolerance = 1e-6,
                                       const EntropyOptions& opt = {}) {
  TalagrandReport r;
  r.tolerance = tolerance;
  r.kappa = kappa_of_potential(U, mu.grid());
  if (!(r.kappa > 0.0)) throw KappaNonpositive("talagrand_check: (n-1) I + Hess U is not positive");
  const auto cert = check_c_concavity(psi, certification_grid, 1e-8, opt.geometry);
  if (!cert.certified) throw NotCConcave("talagrand_check: potential is not c-concave");
  r.certification_margin = cert.margin;
  const auto dens = density_from_map(psi, U, mu, JacobianMethod::chain_rule, opt);
  r.entropy = relative_entropy(dens.density, mu, opt.mass_tolerance);
  numeric::CompensatedSum w2;
  for (int i = 0; i < mu.size(); ++i) {
    w2 += mu.weight(i) * psi.gradient(mu.grid().point(i)).vec().squaredNorm();
  }
  r.w2_squared = w2.value();
  r.slack = r.entropy - 0.5 * r.kappa * r.w2_squared;
  r.pass = r.slack >= -tolerance;
  return r;
}

}  // namespace sphot
