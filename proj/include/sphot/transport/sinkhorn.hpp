#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sphot/errors.hpp"
#include "sphot/numeric/special.hpp"
#include "sphot/sphere/types.hpp"

namespace sphot::transport_detail {

struct SinkhornResult {
  Matrix plan;
  /// <C, P> for the returned plan.
  double transport_cost = 0.0;
  /// Regularized objective sum f_i a_i + sum g_j b_j.
  double dual_value = 0.0;
  double marginal_violation = 0.0;
  int iterations = 0;
};

/// Log-domain Sinkhorn iterations for entropic optimal transport with
/// regularization eps.  Stops once the row marginals (the columns are exact
/// after each sweep) are within `tolerance` in total variation.
inline SinkhornResult sinkhorn_log(const Matrix& cost, const std::vector<double>& a,
                                   const std::vector<double>& b, double eps, int max_iterations,
                                   double tolerance) {
  if (!(eps > 0.0)) throw InvalidArgument("sinkhorn: regularization must be positive");
  const int m = static_cast<int>(a.size()), n = static_cast<int>(b.size());
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_a(m), log_b(n), f(m, 0.0), g(n, 0.0);
  for (int i = 0; i < m; ++i) log_a[i] = a[i] > 0.0 ? std::log(a[i]) : neg_inf;
  for (int j = 0; j < n; ++j) log_b[j] = b[j] > 0.0 ? std::log(b[j]) : neg_inf;

  // -eps * log sum_k exp(log_w_k + (h_k - C)/eps), stabilized by the max.
  auto soft_min = [&](auto&& entry, int count) {
    double mx = neg_inf;
    for (int k = 0; k < count; ++k) mx = std::max(mx, entry(k));
    if (mx == neg_inf) return 0.0;
    double s = 0.0;
    for (int k = 0; k < count; ++k) s += std::exp(entry(k) - mx);
    return -eps * (mx + std::log(s));
  };

  SinkhornResult r;
  std::vector<double> row(m);
  for (int it = 1; it <= max_iterations; ++it) {
    for (int i = 0; i < m; ++i) {
      f[i] = soft_min([&](int j) { return log_b[j] + (g[j] - cost(i, j)) / eps; }, n);
    }
    for (int j = 0; j < n; ++j) {
      g[j] = soft_min([&](int i) { return log_a[i] + (f[i] - cost(i, j)) / eps; }, m);
    }
    double violation = 0.0;
    for (int i = 0; i < m; ++i) {
      if (a[i] == 0.0) continue;
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (b[j] > 0.0) s += std::exp(log_a[i] + log_b[j] + (f[i] + g[j] - cost(i, j)) / eps);
      }
      violation += std::abs(s - a[i]);
    }
    r.iterations = it;
    r.marginal_violation = violation;
    if (violation < tolerance) {
      r.plan = Matrix::Zero(m, n);
      numeric::CompensatedSum tc, dual;
      for (int i = 0; i < m; ++i) {
        if (a[i] == 0.0) continue;
        dual += f[i] * a[i];
        for (int j = 0; j < n; ++j) {
          if (b[j] == 0.0) continue;
          const double p = std::exp(log_a[i] + log_b[j] + (f[i] + g[j] - cost(i, j)) / eps);
          r.plan(i, j) = p;
          tc += p * cost(i, j);
        }
      }
      for (int j = 0; j < n; ++j)
        if (b[j] > 0.0) dual += g[j] * b[j];
      r.transport_cost = tc.value();
      r.dual_value = dual.value();
      return r;
    }
  }
  throw SolverNotConverged("sinkhorn: marginal violation " + std::to_string(r.marginal_violation) +
                           " after " + std::to_string(max_iterations) + " iterations");
}

/// Self-transport OT_eps(a, a) for a symmetric cost, by the averaged
/// fixed-point iteration f <- (f + softmin(C - f)) / 2, which converges much
/// faster than alternating updates when both marginals coincide.  Returns the
/// regularized objective 2 sum f_i a_i.
inline double sinkhorn_symmetric_value(const Matrix& cost, const std::vector<double>& a, double eps,
                                       int max_iterations, double tolerance) {
  if (!(eps > 0.0)) throw InvalidArgument("sinkhorn: regularization must be positive");
  const int m = static_cast<int>(a.size());
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_a(m), f(m, 0.0), next(m);
  for (int i = 0; i < m; ++i) log_a[i] = a[i] > 0.0 ? std::log(a[i]) : neg_inf;
  double violation = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    for (int i = 0; i < m; ++i) {
      double mx = neg_inf;
      for (int j = 0; j < m; ++j) mx = std::max(mx, log_a[j] + (f[j] - cost(i, j)) / eps);
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += std::exp(log_a[j] + (f[j] - cost(i, j)) / eps - mx);
      next[i] = 0.5 * (f[i] - eps * (mx + std::log(s)));
    }
    f.swap(next);
    violation = 0.0;
    for (int i = 0; i < m; ++i) {
      if (a[i] == 0.0) continue;
      double s = 0.0;
      for (int j = 0; j < m; ++j) {
        if (a[j] > 0.0) s += std::exp(log_a[i] + log_a[j] + (f[i] + f[j] - cost(i, j)) / eps);
      }
      violation += std::abs(s - a[i]);
    }
    if (violation < tolerance) {
      numeric::CompensatedSum v;
      for (int i = 0; i < m; ++i)
        if (a[i] > 0.0) v += 2.0 * f[i] * a[i];
      return v.value();
    }
  }
  throw SolverNotConverged("sinkhorn (symmetric): marginal violation " + std::to_string(violation) + " after " +
                           std::to_string(max_iterations) + " iterations");
}

}  // namespace sphot::transport_detail
