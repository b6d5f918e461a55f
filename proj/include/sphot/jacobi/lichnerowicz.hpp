#pragma once

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "sphot/entropy/carleman.hpp"
#include "sphot/entropy/relative_entropy.hpp"
#include "sphot/fields/scalar_field.hpp"

namespace sphot {

/// 1/2 (|Hess psi|_HS^2 + (n-1)|grad psi|^2 + <Hess U grad psi, grad psi>) at x,
/// with the Hessian taken in `frame`.
inline double lichnerowicz_integrand(const ScalarField& psi, const ScalarField& U, const SpherePoint& x,
                                     const TangentFrame& frame) {
  const LocalJet jp = psi.jet(x);
  const Matrix h = jp.hessian_in(frame);
  const Vector g = frame.coordinates(jp.gradient);
  const Matrix hu = U.jet(x).hessian_in(frame);
  return 0.5 * (h.squaredNorm() + (x.dim() - 1) * g.squaredNorm() + g.dot(hu * g));
}

/// tau^2 coefficient of Ent(nu_tau | mu) on S^n, integrated against mu.
inline double lichnerowicz_integral(const ScalarField& psi, const ScalarField& U, const GridMeasure& mu) {
  numeric::CompensatedSum s;
  for (int i = 0; i < mu.size(); ++i) {
    const SpherePoint x = mu.grid().point(i);
    s += mu.weight(i) * lichnerowicz_integrand(psi, U, x, TangentFrame::standard(x));
  }
  return s.value();
}

struct ExpansionTerms {
  double trace_i_minus_a = 0.0;  ///< int trace(I - A)
  double log_j_exp = 0.0;        ///< int -log J_exp(tau grad psi)
  double det2 = 0.0;             ///< int -log det2(A + tau H)
};

/// The three pieces of the entropy formula for the potential tau psi, each
/// of order tau^2.  Requires tau |grad psi| < pi / 2.
inline ExpansionTerms small_tau_expansion_terms(const ScalarField& psi, double tau, const GridMeasure& mu) {
  if (!(tau >= 0.0)) throw InvalidArgument("small_tau_expansion_terms: tau must be nonnegative");
  std::vector<LocalJet> jets;
  jets.reserve(mu.size());
  for (int i = 0; i < mu.size(); ++i) {
    jets.push_back(psi.jet(mu.grid().point(i)));
    if (!(tau * jets.back().gradient.norm() < 0.5 * std::numbers::pi)) {
      throw CutLocusViolation("small_tau_expansion_terms: tau |grad psi| must stay below pi/2");
    }
  }
  numeric::CompensatedSum ta, lj, d2;
  for (int i = 0; i < mu.size(); ++i) {
    const SpherePoint x = mu.grid().point(i);
    const int n = x.dim();
    const LocalJet& j = jets[i];
    const double rho = tau * j.gradient.norm();
    const TangentFrame frame =
        rho > 0.0 ? TangentFrame::adapted(x, j.gradient) : TangentFrame::standard(x);
    Matrix a = Matrix::Identity(n, n) * numeric::t_over_tan(rho);
    a(0, 0) = 1.0;
    const double w = mu.weight(i);
    ta += w * (n - 1) * (1.0 - numeric::t_over_tan(rho));
    lj += w * (n - 1) * numeric::log_t_over_sin(rho);
    d2 += w * carleman_log_det2(a + tau * j.hessian_in(frame));
  }
  return {ta.value(), lj.value(), d2.value()};
}

/// Leading Maclaurin coefficient of K, 3 zeta(2) / pi^2 = 1/2.
inline double k_leading_coefficient() { return 3.0 * std::riemann_zeta(2.0) / (std::numbers::pi * std::numbers::pi); }

/// Two-level Richardson extrapolation from values at h, h/2, h/4 whose
/// error expands in powers h^p1, h^p2.
inline double richardson(double f_h, double f_h2, double f_h4, int p1, int p2) {
  const double r1 = std::ldexp(1.0, p1);
  const double a = (r1 * f_h2 - f_h) / (r1 - 1.0);
  const double b = (r1 * f_h4 - f_h2) / (r1 - 1.0);
  const double r2 = std::ldexp(1.0, p2);
  return (r2 * b - a) / (r2 - 1.0);
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need two or more points");
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct ExpansionRow {
  double tau;
  std::string term;
  double integrated_value;
  double tau_sq_ratio;
};

inline std::vector<ExpansionRow> expansion_sweep(const ScalarField& psi, const GridMeasure& mu,
                                                 const std::vector<double>& taus) {
  std::vector<ExpansionRow> rows;
  for (double tau : taus) {
    const auto t = small_tau_expansion_terms(psi, tau, mu);
    const double t2 = tau * tau;
    rows.push_back({tau, "traceIA", t.trace_i_minus_a, t.trace_i_minus_a / t2});
    rows.push_back({tau, "logJexp", t.log_j_exp, t.log_j_exp / t2});
    rows.push_back({tau, "det2", t.det2, t.det2 / t2});
  }
  return rows;
}

inline void write_expansion_csv(const std::vector<ExpansionRow>& rows, std::ostream& out) {
  out << "tau,term,integrated_value,tau_sq_ratio\n";
  out.precision(17);
  for (const auto& r : rows) out << r.tau << ',' << r.term << ',' << r.integrated_value << ',' << r.tau_sq_ratio << '\n';
}

}  // namespace sphot
