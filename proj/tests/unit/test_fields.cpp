#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sphot/fields/c_transform.hpp"
#include "sphot/fields/io.hpp"
#include "sphot/fields/random.hpp"
#include "sphot/fields/scalar_field.hpp"
#include "support/oracles.hpp"
#include "support/property.hpp"

using namespace sphot;
using sphot::testing::for_all;
using sphot::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField z_coordinate() {
  return ScalarField::from_function(2, [](const auto* X) { return X[2]; });
}

SphereGrid s2_grid(int nc, int nl, GridKind kind = GridKind::gauss_legendre_colatitude) {
  return SphereGrid({kind, nc, nl, 2});
}

}  // namespace

TEST(Grid, WeightsPositiveAndNormalized) {
  for (const GridSpec& s : {GridSpec{GridKind::gauss_legendre_colatitude, 7, 13, 2},
                            GridSpec{GridKind::uniform_lonlat, 9, 16, 2},
                            GridSpec{GridKind::gauss_legendre_colatitude, 5, 6, 3}}) {
    const SphereGrid g(s);
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      EXPECT_GT(g.weight(i), 0.0);
      EXPECT_NEAR(g.points().col(i).norm(), 1.0, 1e-14);
      total += g.weight(i);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_THROW(SphereGrid({GridKind::gauss_legendre_colatitude, 0, 4, 2}), InvalidArgument);
  EXPECT_THROW(SphereGrid({GridKind::gauss_legendre_colatitude, 4, 4, 4}), DimensionUnsupported);
}

TEST(Quadrature, Examples) {
  const SphereGrid g = s2_grid(16, 32);
  EXPECT_NEAR(quadrature(ScalarField::constant(2, 1.0), g), 1.0, 1e-14);
  EXPECT_NEAR(quadrature(z_coordinate().scaled(std::sqrt(3.0)), g), 0.0, 1e-15);
  // E[z^2] = 1/3 and E[x^2 y^2] = 1/15 for the uniform measure.
  EXPECT_NEAR(quadrature(ScalarField::from_function(2, [](const auto* X) { return X[2] * X[2]; }), g), 1.0 / 3,
              1e-14);
  EXPECT_NEAR(
      quadrature(ScalarField::from_function(2, [](const auto* X) { return X[0] * X[0] * X[1] * X[1]; }), g),
      1.0 / 15, 1e-14);
  const SphereGrid g3({GridKind::gauss_legendre_colatitude, 6, 8, 3});
  EXPECT_NEAR(quadrature(ScalarField::from_function(3, [](const auto* X) { return X[3] * X[3]; }), g3), 0.25,
              1e-14);
}

TEST(Quadrature, ExactForHarmonicsUpToBandlimit) {
  const SphereGrid g = s2_grid(12, 24);
  for (int l = 1; l <= 11; ++l) {
    for (int m = -l; m <= l; ++m) {
      std::vector<double> c((l + 1) * (l + 1), 0.0);
      c[HarmonicExpansion::index(l, m)] = 1.0;
      EXPECT_NEAR(quadrature(harmonic_field(l, c), g), 0.0, 1e-12) << l << ' ' << m;
    }
  }
}

TEST(Quadrature, AgreesWithMonteCarlo) {
  const ScalarField f = random_bandlimited(2, {4, 5, 1.0}).shifted(0.3);
  const auto pts = oracle::uniform_samples(2, 1000000, 99);
  double s = 0.0, s2 = 0.0;
  for (const auto& p : pts) {
    const double v = f.value_at(p.data());
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(pts.size());
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(quadrature(f, s2_grid(16, 32)), mean, 3 * se);
}

TEST(Quadrature, RotationInvariantProperty) {
  const SphereGrid g = s2_grid(16, 32);
  const SphereGrid g3({GridKind::gauss_legendre_colatitude, 8, 10, 3});
  for_all(10, 20, [&](Gen& gen) {
    const ScalarField f = random_bandlimited(2, {5, gen.engine()(), 1.0});
    EXPECT_NEAR(quadrature(f.rotated(gen.rotation(3)), g), quadrature(f, g), 1e-10);
    const ScalarField h = random_bandlimited(3, {3, gen.engine()(), 1.0});
    EXPECT_NEAR(quadrature(h.rotated(gen.rotation(4)), g3), quadrature(h, g3), 1e-10);
  });
}

TEST(Differentiation, ConstantAndLinear) {
  const SpherePoint x = SpherePoint::normalized(Eigen::Vector3d(0.2, -0.4, 0.7));
  const ScalarField c = ScalarField::constant(2, 3.5);
  EXPECT_EQ(c.gradient(x).norm(), 0.0);
  EXPECT_EQ(c.hessian(x, TangentFrame::standard(x)).matrix().norm(), 0.0);
  const SpherePoint e = SpherePoint(Eigen::Vector3d(1, 0, 0));
  EXPECT_NEAR((gradient_field(z_coordinate(), e).vec() - Eigen::Vector3d(0, 0, 1)).norm(), 0.0, 1e-15);
  // Hess z = -z I on S^2.
  const Matrix h = hessian_field(z_coordinate(), x, TangentFrame::standard(x)).matrix();
  EXPECT_LT((h + x[2] * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Differentiation, HessianMatchesGeodesicSecondDifferences) {
  for_all(20, 21, [](Gen& g) {
    const int n = g.integer(2, 3);
    const ScalarField f = random_bandlimited(n, {4, g.engine()(), 1.0});
    const SpherePoint x = g.point(n);
    const TangentFrame frame = g.frame(x);
    auto fv = [&](const Vector& w) { return f.value_at(w.data()); };
    const Matrix fd = oracle::fd_hessian(fv, x.coords(), frame.axes(), 1e-3);
    const Matrix h = f.hessian(x, frame).matrix();
    EXPECT_LT((h - fd).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(std::abs(f.gradient(x).vec().dot(x.coords())), 1e-14);
  });
}

// x . grad psi(x) = 0 along the sphere, so <x, D_v grad psi> = -<v, grad psi>.
TEST(Differentiation, NormalComponentOfGradientDerivative) {
  for_all(20, 22, [](Gen& g) {
    const ScalarField f = random_bandlimited(2, {4, g.engine()(), 1.0});
    const SpherePoint x = g.point(2);
    const Vector v = g.unit_tangent(x);
    const double h = 1e-5;
    const SpherePoint p = SpherePoint::normalized(oracle::great_circle(x.coords(), v, h));
    const SpherePoint m = SpherePoint::normalized(oracle::great_circle(x.coords(), v, -h));
    const Vector dg = (f.gradient(p).vec() - f.gradient(m).vec()) / (2 * h);
    EXPECT_NEAR(x.coords().dot(dg), -v.dot(f.gradient(x).vec()), 1e-8);
  });
}

TEST(Differentiation, GradientIgnoresConstantsExactly) {
  for_all(20, 23, [](Gen& g) {
    const ScalarField f = random_bandlimited(2, {3, g.engine()(), 1.0});
    const SpherePoint x = g.point(2);
    EXPECT_EQ(f.shifted(g.uniform(-5, 5)).gradient(x).vec(), f.gradient(x).vec());
  });
}

TEST(Differentiation, SampledFieldsFallBackToFiniteDifferences) {
  const SphereGrid g = s2_grid(64, 128);
  const ScalarField smooth = interpolate(z_coordinate().sample(g), Interpolation::bilinear_in_angles);
  EXPECT_FALSE(smooth.smooth());
  const SpherePoint x = SpherePoint::normalized(Eigen::Vector3d(0.5, 0.3, 0.4));
  EXPECT_LT((smooth.gradient(x).vec() - z_coordinate().gradient(x).vec()).norm(), 5e-3);

  GridFunction abs_z(g);
  for (int i = 0; i < g.size(); ++i) abs_z.values[i] = std::abs(g.coords(i)(2));
  const ScalarField kink = interpolate(abs_z, Interpolation::bilinear_in_angles);
  const SpherePoint eq = SpherePoint::normalized(Eigen::Vector3d(0.6, 0.8, 1e-4));
  EXPECT_THROW(kink.hessian(eq, TangentFrame::standard(eq)), NonSmoothField);
}

TEST(Harmonics, AnalysisRoundTrip) {
  const ScalarField f = random_bandlimited(2, {6, 3, 1.0});
  const SphereGrid g = s2_grid(10, 20);
  const ScalarField back = interpolate(f.sample(g));
  for_all(30, 24, [&](Gen& gen) {
    const SpherePoint x = gen.point(2);
    EXPECT_NEAR(back.value(x), f.value(x), 1e-12);
  });
  EXPECT_THROW(harmonic_analysis(f.sample(g), 10), InvalidArgument);
}

TEST(Harmonics, Y10AtPole) {
  std::vector<double> c(4, 0.0);
  c[HarmonicExpansion::index(1, 0)] = 1.0;
  EXPECT_NEAR(harmonic_field(1, c).value(SpherePoint(Eigen::Vector3d(0, 0, 1))), std::sqrt(3.0), 1e-15);
}

TEST(CTransform, ZeroIsFixed) {
  const SphereGrid g = s2_grid(6, 12);
  const GridFunction c = c_transform(GridFunction(g));
  for (double v : c.values) EXPECT_EQ(v, 0.0);
}

TEST(CTransform, MatchesBruteForce) {
  const SphereGrid g = s2_grid(8, 16);
  const GridFunction phi = z_coordinate().scaled(0.1).sample(g);
  std::vector<Vector> nodes;
  for (int i = 0; i < g.size(); ++i) nodes.emplace_back(g.coords(i));
  const auto ref = oracle::brute_c_transform(nodes, phi.values);
  const GridFunction c = c_transform(phi);
  for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(c.values[i], ref[i], 1e-10);
}

TEST(CTransform, TripleEqualsSingleExactly) {
  for_all(5, 25, [](Gen& gen) {
    const SphereGrid g = s2_grid(6, 12);
    const GridFunction phi = random_bandlimited(2, {4, gen.engine()(), 0.8}).sample(g);
    const GridFunction c1 = c_transform(phi);
    const GridFunction c3 = c_transform(c_transform(c1));
    EXPECT_EQ(c1.values, c3.values);
  });
}

TEST(CTransform, OrderReversingProperty) {
  for_all(10, 26, [](Gen& gen) {
    const SphereGrid g = s2_grid(6, 12);
    GridFunction a = random_bandlimited(2, {3, gen.engine()(), 1.0}).sample(g);
    GridFunction b = a;
    for (double& v : b.values) v += gen.uniform(0.0, 0.2);
    const GridFunction ca = c_transform(a), cb = c_transform(b);
    for (int i = 0; i < g.size(); ++i) EXPECT_GE(ca.values[i], cb.values[i]);
  });
}

TEST(CConcavity, Examples) {
  const SphereGrid g = s2_grid(16, 32);
  const auto zero = check_c_concavity(ScalarField::zero(2), g);
  EXPECT_TRUE(zero.certified);
  EXPECT_EQ(zero.margin, 0.0);
  const ScalarField base = random_bandlimited(2, {3, 11, 1.0});
  EXPECT_TRUE(check_c_concavity(base.scaled(0.05), g).certified);
  const auto big = check_c_concavity(base.scaled(10.0), g);
  EXPECT_FALSE(big.certified);
  EXPECT_GT(big.margin, 1e-8);
}

TEST(CConcavity, ScaleSearchHalvesUntilCertified) {
  const SphereGrid g = s2_grid(12, 24);
  const ScalarField base = random_bandlimited(2, {3, 12, 1.0});
  const ScaledPotential sp = scale_until_c_concave(base, g, 3.0);
  EXPECT_TRUE(sp.certificate.certified);
  EXPECT_LT(sp.epsilon, 3.0);
  EXPECT_FALSE(check_c_concavity(base.scaled(2 * sp.epsilon), g).certified);
}

TEST(TransportMap, Examples) {
  const SpherePoint x = SpherePoint::normalized(Eigen::Vector3d(0.3, 0.1, 0.9));
  for (double t : {0.0, 0.5, 1.0}) EXPECT_TRUE(transport_map(ScalarField::zero(2), x, t).same_as(x, 0.0));
  // psi = (pi/2) x has gradient (pi/2) e_x at the north pole.
  const ScalarField psi = ScalarField::from_function(2, [](const auto* X) { return (kPi / 2) * X[0]; });
  const SpherePoint n = SpherePoint(Eigen::Vector3d(0, 0, 1));
  EXPECT_NEAR(transport_map(psi, n, 1.0).coords()(2), 0.0, 1e-15);
  EXPECT_NEAR(transport_map(psi, n, 0.0).coords()(2), 1.0, 0.0);
  EXPECT_THROW(transport_map(z_coordinate().scaled(-4.0), SpherePoint::normalized(Eigen::Vector3d(1, 0, 0.1)), 1.0),
               CutLocusViolation);
}

TEST(TransportMap, ConstantSpeedAndTangency) {
  for_all(20, 27, [](Gen& g) {
    const int n = g.integer(2, 3);
    const ScalarField psi = random_bandlimited(n, {4, g.engine()(), 1.5});
    const SpherePoint x = g.point(n);
    const double speed = psi.gradient(x).norm();
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const TangentVector v = transport_velocity(psi, x, t);
      EXPECT_NEAR(v.norm(), speed, 1e-10);
      EXPECT_LT(std::abs(v.vec().dot(transport_map(psi, x, t).coords())), 1e-12);
      const double h = 1e-5;
      const Vector fd = (transport_map(psi, x, t + h).coords() - transport_map(psi, x, t - h).coords()) / (2 * h);
      EXPECT_LT((fd - v.vec()).norm(), 1e-8);
    }
  });
}

TEST(FieldIo, HarmonicAndGridRoundTrip) {
  const nlohmann::json j = {{"lmax", 1}, {"coeffs", {0.0, 0.0, 1.0, 0.0}}};
  const ScalarField f = field_from_json(j);
  EXPECT_NEAR(f.value(SpherePoint(Eigen::Vector3d(0, 0, 1))), std::sqrt(3.0), 1e-15);
  const SphereGrid g = s2_grid(6, 12);
  const nlohmann::json gj = field_to_json(z_coordinate().sample(g));
  const ScalarField back = field_from_json(gj);
  EXPECT_NEAR(back.value(SpherePoint::normalized(Eigen::Vector3d(0.3, 0.2, 0.5))),
              0.5 / std::sqrt(0.38), 1e-12);
  EXPECT_EQ(grid_from_json(grid_to_json(g.spec())), g.spec());
  EXPECT_THROW(field_from_json(nlohmann::json{{"grid", grid_to_json(g.spec())}, {"values", {1.0, 2.0}}}),
               InvalidArgument);
  EXPECT_THROW(field_from_json(nlohmann::json{{"nothing", 1}}), InvalidArgument);
}
