#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sphot/entropy/formula.hpp"
#include "sphot/fields/random.hpp"
#include "sphot/jacobi/lichnerowicz.hpp"
#include "support/oracles.hpp"
#include "support/property.hpp"

using namespace sphot;
using sphot::testing::for_all;
using sphot::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

SphereGrid s2(int nc) { return SphereGrid({GridKind::gauss_legendre_colatitude, nc, 2 * nc, 2}); }

ScalarField small_potential(unsigned seed, double eps = 0.05) {
  return random_bandlimited(2, {3, seed, 1.0}).scaled(eps);
}

}  // namespace

TEST(RelativeEntropy, ConstantDensityIsZero) {
  const SphereGrid g = s2(8);
  EXPECT_EQ(relative_entropy(GridFunction(g, std::vector<double>(g.size(), 1.0)), GridMeasure(g)), 0.0);
}

TEST(RelativeEntropy, HemisphereIndicator) {
  const SphereGrid g = s2(16);
  GridFunction v(g);
  for (int i = 0; i < g.size(); ++i) v.values[i] = g.coords(i)(2) > 0 ? 2.0 : 0.0;
  EXPECT_NEAR(relative_entropy(v, GridMeasure(g)), std::log(2.0), 1e-14);
}

TEST(RelativeEntropy, AgreesWithMonteCarlo) {
  const ScalarField f = random_bandlimited(2, {3, 17, 1.0});
  // v = e^f / E[e^f] is a smooth positive density.
  const SphereGrid g = s2(24);
  const GridFunction fs = f.sample(g);
  double z = 0.0;
  for (int i = 0; i < g.size(); ++i) z += g.weight(i) * std::exp(fs.values[i]);
  GridFunction v(g);
  for (int i = 0; i < g.size(); ++i) v.values[i] = std::exp(fs.values[i]) / z;
  const double quad = relative_entropy(v, GridMeasure(g));

  const auto pts = oracle::uniform_samples(2, 1000000, 5);
  double s = 0.0, s2 = 0.0;
  for (const auto& p : pts) {
    const double vv = std::exp(f.value_at(p.data())) / z;
    const double h = vv * std::log(vv);
    s += h;
    s2 += h * h;
  }
  const double n = static_cast<double>(pts.size());
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_GT(quad, 0.0);
  EXPECT_NEAR(quad, mean, 3 * se);
}

TEST(RelativeEntropy, RejectsNonDensities) {
  EXPECT_THROW(relative_entropy({1.0, 1.1}, {0.5, 0.5}), NotADensity);
  EXPECT_THROW(relative_entropy({2.0, -0.0001}, {0.5, 0.5}), NotADensity);
  EXPECT_NO_THROW(relative_entropy({2.0, 0.0}, {0.5, 0.5}));
}

TEST(KFunction, Examples) {
  EXPECT_EQ(k_function(0.0), 0.0);
  EXPECT_NEAR(k_function(kPi / 2), 1.0 + std::log(kPi / 2), 1e-12);
  for (double a : {0.1, 0.5, 1.0, 2.0}) EXPECT_NEAR(k_function(a), k_series(a, 50), 1e-10) << a;
  EXPECT_THROW(k_function(kPi), DomainError);
  EXPECT_THROW(k_series(-0.1, 5), DomainError);
}

TEST(KFunction, DominatesHalfSquare) {
  for (int i = 1; i <= 10000; ++i) {
    const double a = (kPi - 0.01) * i / 10001.0;
    const double gap = k_function(a) - 0.5 * a * a;
    ASSERT_GE(gap, 0.0) << a;
    if (a >= 0.1) ASSERT_GT(gap, 0.0) << a;
  }
}

TEST(Carleman, Examples) {
  EXPECT_EQ(carleman_log_det2(Matrix::Identity(3, 3)), 0.0);
  Matrix m(2, 2);
  m << 2, 0, 0, 0.5;
  EXPECT_NEAR(carleman_log_det2(m), 0.5, 1e-15);
  Matrix bad(2, 2);
  bad << 1, 0, 0, -0.1;
  EXPECT_THROW(carleman_log_det2(bad), NotPositiveDefinite);
  Matrix asym(2, 2);
  asym << 1, 0.1, 0, 1;
  EXPECT_THROW(carleman_log_det2(asym), NotSymmetric);
}

TEST(Carleman, NonnegativeAndMatchesSpectrum) {
  for_all(500, 50, [](Gen& g) {
    const int n = g.integer(1, 6);
    const Matrix q = g.rotation(n);
    Vector lam(n);
    for (int i = 0; i < n; ++i) lam(i) = std::exp(g.uniform(-3, 3));
    const Matrix m = q * lam.asDiagonal() * q.transpose();
    double ref = 0.0;
    for (int i = 0; i < n; ++i) ref += lam(i) - 1 - std::log(lam(i));
    const double v = carleman_log_det2(0.5 * (m + m.transpose()));
    EXPECT_GT(v, 0.0);
    EXPECT_NEAR(v, ref, 1e-10 * std::max(1.0, ref));
  });
}

TEST(EntropyTerms, RegroupingAndTraceBoundPerPoint) {
  for_all(50, 51, [](Gen& g) {
    const ScalarField psi = small_potential(static_cast<unsigned>(g.engine()()), 0.3);
    const ScalarField U = random_bandlimited(2, {2, static_cast<unsigned>(g.engine()()), 0.3});
    const SpherePoint x = g.point(2);
    const PointTerms p = entropy_terms_at(psi, U, x);
    EXPECT_NEAR(p.trace_term, p.carleman + p.trace_i_minus_a, 1e-12);
    const double rho = std::sqrt(p.gradient_sq);
    EXPECT_NEAR(p.trace_i_minus_a, 1 - rho / std::tan(rho), 1e-14);
    EXPECT_GE(p.trace_i_minus_a, 0.0);
    EXPECT_NEAR(p.trace_i_minus_a + p.jacobian_term, p.k_term, 1e-12);
  });
}

TEST(ULine, ConstantAndClosedForm) {
  const SpherePoint x(Eigen::Vector3d(1, 0, 0));
  const ScalarField psi = ScalarField::from_function(2, [](const auto* X) { return 0.8 * X[1]; });
  EXPECT_EQ(u_hessian_line_integral(psi, ScalarField::constant(2, 4.0), x), 0.0);
  // Along Psi_t(x) = (cos 0.8t, sin 0.8t, 0), U = y gives -rho^2 int (1-t) sin(rho t) dt = sin rho - rho.
  const ScalarField U = ScalarField::from_function(2, [](const auto* X) { return X[1]; });
  EXPECT_NEAR(u_hessian_line_integral(psi, U, x), std::sin(0.8) - 0.8, 1e-14);
  // U = z^2 along a meridian: z(t) = sin(rho t), U'' = 2 rho^2 cos(2 rho t).
  const ScalarField pz = ScalarField::from_function(2, [](const auto* X) { return 1.1 * X[2]; });
  const ScalarField Uz = ScalarField::from_function(2, [](const auto* X) { return X[2] * X[2]; });
  const double r = 1.1;
  EXPECT_NEAR(u_hessian_line_integral(pz, Uz, x), std::sin(r) * std::sin(r) - 0.0, 1e-13);
}

TEST(ULine, TaylorIdentity) {
  for_all(50, 52, [](Gen& g) {
    const int n = g.integer(2, 3);
    const ScalarField psi = random_bandlimited(n, {3, g.engine()(), 0.8});
    const ScalarField U = random_bandlimited(n, {3, g.engine()(), 1.0});
    const SpherePoint x = g.point(n);
    const double lhs = U.value(transport_map(psi, x, 1.0)) - U.value(x) - U.gradient(x).vec().dot(psi.gradient(x).vec());
    const double a = u_hessian_line_integral(psi, U, x, 16), b = u_hessian_line_integral(psi, U, x, 32);
    EXPECT_NEAR(a, lhs, 1e-8);
    EXPECT_LT(std::abs(a - b), 1e-10);
  });
}

TEST(Kappa, Examples) {
  EXPECT_NEAR(kappa_of_potential(ScalarField::constant(2, 1.0), s2(8)), 1.0, 1e-15);
  EXPECT_NEAR(kappa_of_potential(ScalarField::constant(3, 1.0), SphereGrid({GridKind::gauss_legendre_colatitude, 4, 6, 3})),
              2.0, 1e-15);
  for (int n : {2, 3}) {
    const SphereGrid g = n == 2 ? s2(12) : SphereGrid({GridKind::gauss_legendre_colatitude, 6, 8, 3});
    const double eps = 0.01;
    const ScalarField U = ScalarField::from_function(n, [eps](const auto* X) { return eps * X[2]; });
    double ref = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.size(); ++i) {
      const SpherePoint x = g.point(i);
      // Hess of a linear function f restricted to the sphere is -f I.
      const Matrix h = (n - 1 - eps * x[2]) * Matrix::Identity(n, n);
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      ref = std::min(ref, es.eigenvalues()(0));
    }
    EXPECT_NEAR(kappa_of_potential(U, g), ref, 1e-14);
    EXPECT_NEAR(kappa_of_potential(U, g), n - 1.0, 1.01 * eps);
  }
}

TEST(DensityFromMap, IdentityMapGivesOne) {
  const SphereGrid g = s2(8);
  const GridMeasure mu(g, random_bandlimited(2, {2, 3, 0.4}));
  const auto d = density_from_map(ScalarField::zero(2), random_bandlimited(2, {2, 3, 0.4}), mu);
  for (double v : d.density.values) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(DensityFromMap, ConservesMass) {
  const SphereGrid g = s2(32);
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto d = density_from_map(small_potential(seed), ScalarField::zero(2), GridMeasure(g));
    EXPECT_NEAR(d.mass, 1.0, 1e-6);
  }
  const SphereGrid g3({GridKind::gauss_legendre_colatitude, 10, 12, 3});
  const ScalarField psi3 = random_bandlimited(3, {2, 4, 0.05});
  EXPECT_NEAR(density_from_map(psi3, ScalarField::zero(3), GridMeasure(g3)).mass, 1.0, 1e-6);
}

// Mass of each equal-area bin under nu = Psi_# mu: quadrature nodes of a fine
// grid pushed forward and binned, against the reconstructed density
// integrated over the bin with a per-bin tensor rule.
TEST(DensityFromMap, MatchesHistogramOfMappedPoints) {
  const ScalarField psi = small_potential(7, 0.2);
  ASSERT_TRUE(check_c_concavity(psi, s2(16)).certified);
  using H = oracle::Histogram48;
  std::vector<double> mapped(H::kBins, 0.0);
  const SphereGrid fine = s2(400);
  for (int i = 0; i < fine.size(); ++i) {
    mapped[H::bin(transport_map(psi, fine.point(i), 1.0).coords())] += fine.weight(i);
  }
  const auto zr = numeric::gauss_legendre(8, 0.0, 1.0 / H::kBands * 2.0);
  const auto pr = numeric::gauss_legendre(8, 0.0, 2 * kPi / H::kSectors);
  for (int b = 0; b < H::kBands; ++b) {
    for (int s = 0; s < H::kSectors; ++s) {
      double mass = 0.0;
      for (int i = 0; i < 8; ++i) {
        for (int k = 0; k < 8; ++k) {
          const double z = -1.0 + 2.0 * b / H::kBands + zr.nodes[i];
          const double phi = 2 * kPi * s / H::kSectors + pr.nodes[k];
          const double r = std::sqrt(1 - z * z);
          const SpherePoint y(Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z));
          const SpherePoint x = invert_transport_map(psi, y);
          mass += zr.weights[i] * pr.weights[k] / (4 * kPi) * std::exp(-log_jacobian_chain_rule(psi, x));
        }
      }
      EXPECT_NEAR(mapped[b * H::kSectors + s] / mass, 1.0, 0.02) << b << ' ' << s;
    }
  }
}

TEST(EntropyFormula, ZeroPotential) {
  const SphereGrid g = s2(8);
  const auto r = entropy_formula_rhs(ScalarField::zero(2), random_bandlimited(2, {2, 1, 0.3}), GridMeasure(g));
  EXPECT_EQ(r.rhs_total, 0.0);
  EXPECT_EQ(r.direct_entropy, 0.0) << r.density_mass;
  EXPECT_EQ(r.w2_squared, 0.0);
}

TEST(EntropyFormula, BookkeepingAndSplit) {
  const SphereGrid g = s2(24);
  const ScalarField psi = small_potential(11);
  const ScalarField U = random_bandlimited(2, {2, 12, 0.3});
  EntropyOptions opt;
  opt.compute_direct = false;
  const auto r = entropy_formula_rhs(psi, U, GridMeasure(g, U), opt);
  EXPECT_NEAR(r.rhs_total, r.trace_term + r.jacobian_term + r.u_line_term, 1e-12);
  EXPECT_NEAR(r.split_total, r.rhs_total, 1e-10);
  EXPECT_LT(r.t_integration_error, 1e-10);
  const auto flat = entropy_formula_rhs(psi, ScalarField::zero(2), GridMeasure(g), opt);
  EXPECT_NEAR(flat.rhs_total, flat.carleman_term + flat.k_term, 1e-12);
  EXPECT_EQ(flat.u_line_term, 0.0);
}

TEST(EntropyFormula, DirectAgreesAndConverges) {
  const ScalarField psi = small_potential(11);
  const ScalarField U = random_bandlimited(2, {2, 12, 0.3});
  double previous = std::numeric_limits<double>::infinity();
  for (int nc : {32, 64}) {
    const auto r = entropy_formula_rhs(psi, U, GridMeasure(s2(nc), U));
    EXPECT_LT(r.relative_gap(), 1e-2);
    EXPECT_GE(r.direct_entropy, r.rhs_total - 1e-2 * r.rhs_total);
    EXPECT_NEAR(r.direct_entropy_chain_rule, r.rhs_total, 1e-10);
    EXPECT_LT(r.relative_gap(), previous / 4);
    previous = r.relative_gap();
  }
}

TEST(Talagrand, ZeroPotentialHasZeroSlack) {
  const SphereGrid g = s2(8);
  const auto r = talagrand_check(ScalarField::zero(2), ScalarField::zero(2), GridMeasure(g), g);
  EXPECT_EQ(r.slack, 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.kappa, 1.0);
}

TEST(Talagrand, UniformMeasureHasNonnegativeSlack) {
  const SphereGrid g = s2(24), cert = s2(16);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto r = talagrand_check(small_potential(seed), ScalarField::zero(2), GridMeasure(g), cert);
    EXPECT_GE(r.slack, 0.0) << seed;
    EXPECT_TRUE(r.pass);
  }
}

TEST(Talagrand, Errors) {
  const SphereGrid g = s2(8);
  const ScalarField steep = ScalarField::from_function(2, [](const auto* X) { return -2.0 * X[2] * X[2]; });
  EXPECT_THROW(talagrand_check(small_potential(1), steep, GridMeasure(g, steep), g), KappaNonpositive);
  EXPECT_THROW(talagrand_check(small_potential(1, 20.0), ScalarField::zero(2), GridMeasure(g), g), NotCConcave);
}

// slack / eps^2 tends to the Lichnerowicz integral minus (kappa / 2) int |grad psi|^2.
TEST(Talagrand, SlackScalingMatchesLichnerowiczGap) {
  const ScalarField base = random_bandlimited(2, {2, 21, 1.0});
  const ScalarField U = random_bandlimited(2, {2, 22, 0.3});
  const SphereGrid g = s2(32);
  const GridMeasure mu(g, U);
  double w2 = 0.0;
  for (int i = 0; i < g.size(); ++i) w2 += mu.weight(i) * base.gradient(g.point(i)).vec().squaredNorm();
  const double kappa = kappa_of_potential(U, g);
  const double limit = lichnerowicz_integral(base, U, mu) - 0.5 * kappa * w2;
  ASSERT_GT(limit, 0.0);
  std::vector<double> gaps;
  for (double eps : {0.04, 0.02, 0.01}) {
    const auto r = talagrand_check(base.scaled(eps), U, mu, s2(16));
    gaps.push_back(std::abs(r.slack / (eps * eps) - limit) / limit);
  }
  EXPECT_LT(gaps.back(), 0.05);
  EXPECT_LT(gaps[2], gaps[1]);
  EXPECT_LT(gaps[1], gaps[0]);
}
