#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "sphot/entropy/formula.hpp"
#include "sphot/fields/random.hpp"
#include "sphot/jacobi/lichnerowicz.hpp"
#include "sphot/jacobi/solver.hpp"
#include "support/oracles.hpp"
#include "support/property.hpp"

using namespace sphot;
using sphot::testing::for_all;
using sphot::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

SphereGrid s2(int nc) { return SphereGrid({GridKind::gauss_legendre_colatitude, nc, 2 * nc, 2}); }

}  // namespace

TEST(MatrixTrig, Examples) {
  const auto z = matrix_trig(Matrix::Zero(3, 3), 0.7);
  EXPECT_EQ(max_abs(z.cos_part - Matrix::Identity(3, 3)), 0.0);
  EXPECT_EQ(max_abs(z.sinc_part - 0.7 * Matrix::Identity(3, 3)), 0.0);
  const double rho = 1.3, t = 0.8;
  const auto s = matrix_trig(Matrix::Identity(2, 2) * rho * rho, t);
  EXPECT_LT(max_abs(s.cos_part - std::cos(rho * t) * Matrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_abs(s.sinc_part - std::sin(rho * t) / rho * Matrix::Identity(2, 2)), 1e-15);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(matrix_trig(asym, 1.0), NotSymmetric);
}

TEST(MatrixTrig, MatchesPowerSeries) {
  for_all(200, 60, [](Gen& g) {
    const int n = g.integer(1, 5);
    Matrix T = g.spd(n, 1e-6, 1.0);
    // Rank-deficient half of the cases.
    if (g.uniform(0.0, 1.0) < 0.5) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(T);
      Vector lam = es.eigenvalues();
      lam(0) = 0.0;
      T = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
      T = 0.5 * (T + T.transpose());
    }
    const double t = g.uniform(0.0, 1.0);
    const auto a = matrix_trig(T, t);
    const auto b = oracle::matrix_trig_series(T, t, 20);
    EXPECT_LT(max_abs(a.cos_part - b.cos_part), 1e-12);
    EXPECT_LT(max_abs(a.sinc_part - b.sin_over_root), 1e-12);
  });
}

TEST(JacobiSolve, Examples) {
  const auto spec = CurvatureSpec::constant_sphere(3);
  const Vector w = Vector::Unit(3, 1);
  EXPECT_LT((jacobi_solve(spec, w, 1e-9).Y - w).norm(), 1e-15);
  EXPECT_NEAR(jacobi_solve(spec, w, kPi / 2).Y(1), 2.0 / kPi, 1e-15);
  const Vector along = Vector::Unit(3, 0) * 0.4;
  EXPECT_LT((jacobi_solve(spec, along, 2.0).Y - along).norm(), 1e-15);
  EXPECT_THROW(jacobi_solve(spec, w, kPi), ConjugatePoint);
  EXPECT_THROW(hessian_from_jacobi(spec, 3.5), ConjugatePoint);
}

TEST(JacobiSolve, MatchesRk4) {
  for (int n : {2, 3, 5}) {
    const auto spec = CurvatureSpec::constant_sphere(n);
    for_all(20, 61 + n, [&](Gen& g) {
      const double speed = g.uniform(0.0, kPi - 0.1);
      const Vector w = g.gaussian(n);
      const BlockState a = jacobi_solve(spec, w, speed);
      const BlockState b = jacobi_rk4(spec, Vector::Zero(n), w, speed);
      EXPECT_LT((a.Y - b.Y).norm(), 1e-8);
      EXPECT_LT((a.V - b.V).norm(), 1e-8);
    });
  }
}

TEST(JacobiSolve, SatisfiesSecondOrderEquation) {
  const auto spec = CurvatureSpec::constant_sphere(4);
  for_all(30, 62, [&](Gen& g) {
    const double speed = g.uniform(0.0, 3.0);
    const Vector w = g.gaussian(4);
    const double t = g.uniform(0.2, 1.0), h = 2e-3;
    auto Y = [&](double s) { return jacobi_solve(spec, w, speed, s).Y; };
    const Vector ypp = (-Y(t + 2 * h) + 16 * Y(t + h) - 30 * Y(t) + 16 * Y(t - h) - Y(t - 2 * h)) / (12 * h * h);
    EXPECT_LT((ypp + spec.operator_at(t, speed) * Y(t)).norm(), 1e-8);
    const Vector yp = (-Y(t + 2 * h) + 8 * Y(t + h) - 8 * Y(t - h) + Y(t - 2 * h)) / (12 * h);
    EXPECT_LT((yp - jacobi_solve(spec, w, speed, t).V).norm(), 1e-8);
    EXPECT_EQ(jacobi_solve(spec, w, speed, 0.0).Y.norm(), 0.0);
  });
}

TEST(Curvature, SymmetricOperators) {
  for (int n : {2, 3, 6}) {
    const auto spec = CurvatureSpec::constant_sphere(n);
    for (double s : {0.0, 0.5, 3.0}) {
      const Matrix m = spec.operator_at(0.3, s);
      EXPECT_LT(max_abs(m - m.transpose()), 1e-12);
      EXPECT_NEAR(m.trace(), (n - 1) * s * s, 1e-14);
      EXPECT_EQ(m(0, 0), 0.0);
    }
  }
  const auto bad = CurvatureSpec::custom(2, [](double, double) {
    Matrix m(2, 2);
    m << 1, 1, 0, 1;
    return m;
  });
  EXPECT_THROW(bad.operator_at(0.0, 1.0), NotSymmetric);
  EXPECT_THROW(CurvatureSpec::constant_sphere(1), InvalidArgument);
}

TEST(Curvature, CustomBranchIntegratesSphereCurvature) {
  const auto sphere = CurvatureSpec::constant_sphere(3);
  const auto custom = CurvatureSpec::custom(3, [&](double t, double s) { return sphere.operator_at(t, s); });
  const Vector w = Vector::Unit(3, 2);
  EXPECT_LT((jacobi_rk4(custom, Vector::Zero(3), w, 1.2).Y - jacobi_solve(sphere, w, 1.2).Y).norm(), 1e-10);
}

TEST(HessianFromJacobi, Examples) {
  const auto spec = CurvatureSpec::constant_sphere(2);
  EXPECT_LT(max_abs(hessian_from_jacobi(spec, 0.0) - Matrix::Identity(2, 2)), 1e-15);
  const Matrix a = hessian_from_jacobi(spec, 1.0);
  EXPECT_NEAR(a(1, 1), 1.0 / std::tan(1.0), 1e-14);
  EXPECT_NEAR(a(1, 1), 0.642093, 1e-6);
  EXPECT_NEAR(a(0, 0), 1.0, 1e-15);
}

TEST(HessianFromJacobi, AgreesWithClosedFormInRandomFrames) {
  for_all(100, 63, [](Gen& g) {
    const int n = g.integer(2, 5);
    const SpherePoint x = g.point(n);
    const double d = g.uniform(0.01, kPi - 0.1);
    const SpherePoint y = g.at_distance(x, d);
    const TangentFrame frame = g.frame(x);
    const Matrix closed = hessian_half_dist_sq(x, y, frame).matrix();
    const TangentFrame adapted = TangentFrame::adapted(x, log_map(x, y).vec());
    const Matrix amb = SymOperator(adapted, hessian_from_jacobi(CurvatureSpec::constant_sphere(n), d)).ambient();
    const Matrix jac = frame.axes().transpose() * amb * frame.axes();
    EXPECT_LT(max_abs(closed - jac), 1e-10);
  });
}

// trace(I - A) = (tau^2 / 3) trace S + O(tau^4).
TEST(HessianFromJacobi, TraceExpansionQuarticFit) {
  for (int n : {2, 3}) {
    const double g = 1.7;
    Matrix X(3, 2);
    Vector y(3);
    int row = 0;
    for (double tau : {0.2, 0.1, 0.05}) {
      const Matrix a = hessian_from_jacobi(CurvatureSpec::constant_sphere(n), tau * g);
      X(row, 0) = tau * tau;
      X(row, 1) = std::pow(tau, 4);
      y(row++) = (Matrix::Identity(n, n) - a).trace();
    }
    const Vector c = X.colPivHouseholderQr().solve(y);
    const double trace_s = (n - 1) * g * g;
    EXPECT_NEAR(c(0), trace_s / 3.0, 1e-5 * trace_s);
    EXPECT_NEAR(c(1), (n - 1) * std::pow(g, 4) / 45.0, 1e-2 * std::pow(g, 4));
    EXPECT_LT((X * c - y).norm(), 1e-7);
  }
}

TEST(Lichnerowicz, ZeroPotential) {
  const GridMeasure mu(s2(8));
  EXPECT_EQ(lichnerowicz_integral(ScalarField::zero(2), random_bandlimited(2, {2, 3, 1.0}), mu), 0.0);
  const auto t = small_tau_expansion_terms(random_bandlimited(2, {3, 4, 1.0}), 0.0, mu);
  EXPECT_EQ(t.trace_i_minus_a, 0.0);
  EXPECT_EQ(t.log_j_exp, 0.0);
  EXPECT_EQ(t.det2, 0.0);
}

TEST(Lichnerowicz, FrameIndependent) {
  for_all(50, 64, [](Gen& g) {
    const int n = g.integer(2, 3);
    const ScalarField psi = random_bandlimited(n, {3, static_cast<unsigned>(g.engine()()), 1.0});
    const ScalarField U = random_bandlimited(n, {2, static_cast<unsigned>(g.engine()()), 1.0});
    const SpherePoint x = g.point(n);
    const double a = lichnerowicz_integrand(psi, U, x, g.frame(x));
    const double b = lichnerowicz_integrand(psi, U, x, g.frame(x));
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
  });
}

TEST(Lichnerowicz, LinearPotentialClosedForm) {
  // psi = z on S^2: |grad|^2 = 1 - z^2, Hess = -z I, so the integrand is
  // (2 z^2 + 1 - z^2) / 2 and its mean is (1/3 + 1) / 2 = 2/3.
  const ScalarField psi = ScalarField::from_function(2, [](const auto* X) { return X[2]; });
  EXPECT_NEAR(lichnerowicz_integral(psi, ScalarField::zero(2), GridMeasure(s2(8))), 2.0 / 3.0, 1e-14);
}

TEST(SmallTau, ConstantCurvatureTrace) {
  // trace S = |grad psi|^2 = g^2 (1 - z^2) for psi = g z; its mean is 2 g^2 / 3.
  const double g = 1.5;
  const ScalarField psi = ScalarField::from_function(2, [g](const auto* X) { return g * X[2]; });
  const GridMeasure mu(s2(16));
  std::vector<double> r;
  for (double tau : {0.1, 0.05, 0.025}) r.push_back(small_tau_expansion_terms(psi, tau, mu).trace_i_minus_a / (tau * tau));
  const double target = g * g * 2.0 / 3.0 / 3.0;
  EXPECT_NEAR(r[2], target, 1e-3 * target);
  EXPECT_NEAR(richardson(r[0], r[1], r[2], 2, 4), target, 1e-9);
  EXPECT_THROW(small_tau_expansion_terms(psi, 2.0, mu), CutLocusViolation);
  EXPECT_THROW(small_tau_expansion_terms(psi, -0.1, mu), InvalidArgument);
}

TEST(SmallTau, QuadraticScalingAndSumRule) {
  const ScalarField psi = random_bandlimited(2, {3, 65, 1.0});
  const GridMeasure mu(s2(24));
  const std::vector<double> taus{0.1, 0.05, 0.025};
  std::vector<double> ta, lj, d2;
  for (double tau : taus) {
    const auto t = small_tau_expansion_terms(psi, tau, mu);
    ta.push_back(t.trace_i_minus_a);
    lj.push_back(t.log_j_exp);
    d2.push_back(t.det2);
  }
  for (const auto* v : {&ta, &lj, &d2}) EXPECT_NEAR(loglog_slope(taus, *v), 2.0, 0.05);
  double grad_sq = 0.0;
  for (int i = 0; i < mu.size(); ++i) grad_sq += mu.weight(i) * psi.gradient(mu.grid().point(i)).vec().squaredNorm();
  const double tau = taus.back();
  EXPECT_NEAR((ta.back() + lj.back()) / (tau * tau * grad_sq), k_leading_coefficient(), 0.01 * 0.5);
  EXPECT_NEAR(k_leading_coefficient(), 0.5, 1e-15);
}

// Ent(nu_tau | mu) / tau^2 approaches the Lichnerowicz integral with O(tau) error.
TEST(SmallTau, EntropyRatioConvergesToLichnerowicz) {
  const ScalarField psi = random_bandlimited(2, {3, 66, 1.0});
  const ScalarField U = random_bandlimited(2, {2, 67, 0.5});
  const GridMeasure mu(s2(32), U);
  const double limit = lichnerowicz_integral(psi, U, mu);
  EntropyOptions opt;
  opt.compute_direct = false;
  std::vector<double> err;
  for (double tau : {0.1, 0.05, 0.025}) {
    const auto r = entropy_formula_rhs(psi.scaled(tau), U, mu, opt);
    err.push_back(std::abs(r.rhs_total / (tau * tau) - limit));
  }
  EXPECT_LT(err[1], 0.7 * err[0]);
  EXPECT_LT(err[2], 0.7 * err[1]);
  EXPECT_LT(err[2] / limit, 0.05);
}

TEST(SmallTau, CsvExport) {
  const auto rows = expansion_sweep(ScalarField::zero(2), GridMeasure(s2(4)), {0.5});
  std::ostringstream out;
  write_expansion_csv(rows, out);
  EXPECT_EQ(out.str(), "tau,term,integrated_value,tau_sq_ratio\n0.5,traceIA,0,0\n0.5,logJexp,0,0\n0.5,det2,0,0\n");
}
