#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sphot/config.hpp"
#include "sphot/fields/grid.hpp"
#include "sphot/fields/sources.hpp"
#include "sphot/sphere/geometry.hpp"

namespace sphot {

enum class Interpolation { bilinear_in_angles, spherical_harmonic };

inline std::string to_string(Interpolation i) {
  return i == Interpolation::bilinear_in_angles ? "bilinear_in_angles" : "spherical_harmonic";
}

inline Interpolation interpolation_from_string(const std::string& s) {
  if (s == "bilinear_in_angles") return Interpolation::bilinear_in_angles;
  if (s == "spherical_harmonic") return Interpolation::spherical_harmonic;
  throw InvalidArgument("unknown interpolation '" + s + "'");
}

/// Value, Riemannian gradient and Riemannian Hessian at a point, all in
/// ambient coordinates.  `hessian` is (n+1) x (n+1), acts on T_x and
/// annihilates x.
struct LocalJet {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;

  Matrix hessian_in(const TangentFrame& frame) const {
    Matrix m = frame.axes().transpose() * hessian * frame.axes();
    return 0.5 * (m + m.transpose());
  }
};

/// Settings for differentiating sampled (non-smooth) sources.
struct FiniteDifferenceOptions {
  double step = 1e-3;
  /// Allowed relative disagreement between step h and 2h estimates.
  double tolerance = 0.25;
};

/// A real function on S^n.
///
/// Smooth sources are differentiated exactly: with F the ambient extension,
/// grad f = P dF and Hess f = P (d^2F - <x, dF> I) P, where P projects onto T_x.
/// Sampled sources fall back to geodesic central differences in a local frame.
class ScalarField {
 public:
  explicit ScalarField(std::shared_ptr<const FieldSource> source, FiniteDifferenceOptions fd = {})
      : source_(std::move(source)), fd_(fd) {
    if (!source_) throw InvalidArgument("ScalarField: null source");
    if (source_->dim() + 1 > numeric::kMaxJetDim) {
      throw DimensionUnsupported("ScalarField: sphere dimension too large");
    }
  }

  /// Field given by a generic callable `f(const T* X) -> T`.
  template <class F>
  static ScalarField from_function(int dim, F f) {
    return ScalarField(std::make_shared<LambdaSource<F>>(dim, std::move(f)));
  }

  static ScalarField constant(int dim, double c) {
    return from_function(dim, [c](const auto*) { return c; });
  }

  static ScalarField zero(int dim) { return constant(dim, 0.0); }

  int dim() const { return source_->dim(); }
  bool smooth() const { return source_->smooth(); }
  const FieldSource& source() const { return *source_; }
  const std::shared_ptr<const FieldSource>& source_ptr() const { return source_; }

  double value(const SpherePoint& x) const {
    check_dim(x);
    return source_->eval(x.coords().data());
  }
  /// Value of the ambient extension at raw coordinates (no checks).
  double value_at(const double* X) const { return source_->eval(X); }

  TangentVector gradient(const SpherePoint& x) const {
    check_dim(x);
    if (!smooth()) return TangentVector(x, jet(x).gradient);
    const int m = x.ambient_dim();
    std::array<numeric::Jet1, numeric::kMaxJetDim> X{};
    for (int i = 0; i < m; ++i) X[i] = numeric::Jet1::variable(x[i], i, m);
    const numeric::Jet1 F = source_->eval(X.data());
    Vector g(m);
    for (int i = 0; i < m; ++i) g(i) = F.g[i];
    g -= x.coords().dot(g) * x.coords();
    return TangentVector(x, std::move(g));
  }

  SymOperator hessian(const SpherePoint& x, const TangentFrame& frame) const {
    if (!frame.base().same_as(x)) throw BaseMismatch("hessian: frame is not based at x");
    return SymOperator(frame, jet(x).hessian_in(frame));
  }

  LocalJet jet(const SpherePoint& x) const {
    check_dim(x);
    return smooth() ? exact_jet(x) : finite_difference_jet(x);
  }

  GridFunction sample(const SphereGrid& grid) const {
    if (grid.dim() != dim()) throw InvalidArgument("sample: grid dimension mismatch");
    GridFunction out(grid);
    for (int i = 0; i < grid.size(); ++i) out.values[i] = source_->eval(grid.coords(i).data());
    return out;
  }

  ScalarField scaled(double s) const { return combine({{s, source_}}, 0.0); }
  ScalarField shifted(double c) const { return combine({{1.0, source_}}, c); }
  ScalarField operator+(const ScalarField& o) const {
    return combine({{1.0, source_}, {1.0, o.source_}}, 0.0);
  }
  ScalarField operator-(const ScalarField& o) const {
    return combine({{1.0, source_}, {-1.0, o.source_}}, 0.0);
  }
  ScalarField operator-() const { return scaled(-1.0); }
  friend ScalarField operator*(double s, const ScalarField& f) { return f.scaled(s); }

  /// x -> f(R^T x).
  ScalarField rotated(const Matrix& rotation) const {
    return ScalarField(std::make_shared<RotatedSource>(source_, rotation), fd_);
  }

 private:
  ScalarField combine(std::vector<std::pair<double, std::shared_ptr<const FieldSource>>> terms,
                      double offset) const {
    return ScalarField(std::make_shared<LinearCombination>(std::move(terms), offset), fd_);
  }

  void check_dim(const SpherePoint& x) const {
    if (x.dim() != dim()) throw InvalidArgument("ScalarField: point on a sphere of another dimension");
  }

  LocalJet exact_jet(const SpherePoint& x) const {
    const int m = x.ambient_dim();
    std::array<numeric::Jet2, numeric::kMaxJetDim> X{};
    for (int i = 0; i < m; ++i) X[i] = numeric::Jet2::variable(x[i], i, m);
    const numeric::Jet2 F = source_->eval(X.data());
    Vector g(m);
    Matrix h(m, m);
    for (int i = 0; i < m; ++i) {
      g(i) = F.g[i];
      for (int k = 0; k < m; ++k) h(i, k) = F.hess(i, k);
    }
    const Vector& xc = x.coords();
    const double radial = xc.dot(g);
    const Matrix P = Matrix::Identity(m, m) - xc * xc.transpose();
    LocalJet j;
    j.value = F.v;
    j.gradient = g - radial * xc;
    j.hessian = P * (h - radial * Matrix::Identity(m, m)) * P;
    j.hessian = 0.5 * (j.hessian + j.hessian.transpose());
    return j;
  }

  // Central differences of f(exp_x(E s)) in normal coordinates s, whose
  // first and second derivatives at 0 are the Riemannian ones.
  LocalJet finite_difference_jet(const SpherePoint& x) const {
    const TangentFrame frame = TangentFrame::standard(x);
    const int n = x.dim();
    const double h = std::max(fd_.step, source_->resolution());
    auto f = [&](const Vector& s) {
      return value(exp_map(x, TangentVector(x, frame.ambient(s))));
    };
    auto estimate = [&](double step, Vector& grad, Matrix& hess) {
      const double f0 = value(x);
      grad.resize(n);
      hess.resize(n, n);
      for (int i = 0; i < n; ++i) {
        const Vector ei = step * Vector::Unit(n, i);
        const double fp = f(ei), fm = f(-ei);
        grad(i) = (fp - fm) / (2.0 * step);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (step * step);
        for (int k = 0; k < i; ++k) {
          const Vector ek = step * Vector::Unit(n, k);
          hess(i, k) = hess(k, i) =
              (f(ei + ek) - f(ei - ek) - f(ek - ei) + f(-ei - ek)) / (4.0 * step * step);
        }
      }
    };
    Vector g1, g2;
    Matrix h1, h2;
    estimate(h, g1, h1);
    estimate(2.0 * h, g2, h2);
    const double gscale = std::max(1.0, g1.norm());
    const double hscale = std::max(1.0, h1.norm());
    if ((g1 - g2).norm() > fd_.tolerance * gscale || (h1 - h2).norm() > fd_.tolerance * hscale) {
      throw NonSmoothField("finite-difference derivatives are inconsistent across step sizes");
    }
    LocalJet j;
    j.value = value(x);
    j.gradient = frame.ambient(g1);
    j.hessian = frame.axes() * h1 * frame.axes().transpose();
    return j;
  }

  std::shared_ptr<const FieldSource> source_;
  FiniteDifferenceOptions fd_;
};

inline TangentVector gradient_field(const ScalarField& f, const SpherePoint& x) {
  return f.gradient(x);
}

inline SymOperator hessian_field(const ScalarField& f, const SpherePoint& x, const TangentFrame& frame) {
  return f.hessian(x, frame);
}

/// Integral of f against the normalized measure, by the grid's quadrature.
inline double quadrature(const ScalarField& f, const SphereGrid& grid) {
  return quadrature(f.sample(grid));
}

/// Spherical-harmonic coefficients of S^2 grid samples up to degree lmax.
///
/// Exact for bandlimited data when lmax <= n_colat - 1 and 2 lmax < n_lon on
/// a Gauss-Legendre grid.
inline HarmonicExpansion harmonic_analysis(const GridFunction& samples, int lmax) {
  const auto& spec = samples.grid.spec();
  if (spec.dim != 2) throw DimensionUnsupported("harmonic_analysis: S^2 only");
  if (lmax < 0 || lmax > spec.n_colat - 1 || 2 * lmax >= spec.n_lon) {
    throw InvalidArgument("harmonic_analysis: degree exceeds what the grid resolves");
  }
  const int nc = (lmax + 1) * (lmax + 1);
  std::vector<numeric::CompensatedSum> acc(nc);
  for (int i = 0; i < samples.size(); ++i) {
    const auto y = HarmonicExpansion::basis(lmax, samples.grid.coords(i).data());
    const double wf = samples.grid.weight(i) * samples.values[i];
    for (int k = 0; k < nc; ++k) acc[k] += wf * y[k];
  }
  std::vector<double> c(nc);
  for (int k = 0; k < nc; ++k) c[k] = acc[k].value();
  return HarmonicExpansion(lmax, std::move(c));
}

/// Largest degree a grid resolves for synthesis.
inline int grid_bandlimit(const GridSpec& spec) {
  return std::min(spec.n_colat - 1, (spec.n_lon - 1) / 2);
}

/// Turns grid samples into a field defined everywhere.
inline ScalarField interpolate(const GridFunction& samples,
                               Interpolation method = Interpolation::spherical_harmonic) {
  for (double v : samples.values) {
    if (!std::isfinite(v)) throw InvalidArgument("interpolate: non-finite sample");
  }
  if (method == Interpolation::bilinear_in_angles) {
    return ScalarField(std::make_shared<BilinearGridSource>(samples));
  }
  if (samples.grid.spec().kind != GridKind::gauss_legendre_colatitude) {
    throw InvalidArgument("spherical-harmonic interpolation needs a Gauss-Legendre grid");
  }
  return ScalarField(std::make_shared<HarmonicExpansion>(
      harmonic_analysis(samples, grid_bandlimit(samples.grid.spec()))));
}

inline ScalarField harmonic_field(int lmax, std::vector<double> coeffs) {
  return ScalarField(std::make_shared<HarmonicExpansion>(lmax, std::move(coeffs)));
}

/// Psi_t(x) = exp_x(t grad psi(x)).
inline SpherePoint transport_map(const ScalarField& psi, const SpherePoint& x, double t,
                                 const GeometryConfig& cfg = {}) {
  const TangentVector g = psi.gradient(x);
  if (!(g.norm() < std::numbers::pi - cfg.cut_margin)) {
    throw CutLocusViolation("transport_map: gradient reaches the cut locus");
  }
  return exp_map(x, TangentVector(x, t * g.vec()), cfg);
}

/// d/dt Psi_t(x), a tangent vector at Psi_t(x) of length |grad psi(x)|.
inline TangentVector transport_velocity(const ScalarField& psi, const SpherePoint& x, double t,
                                        const GeometryConfig& cfg = {}) {
  const TangentVector g = psi.gradient(x);
  const double r = g.norm();
  if (!(r < std::numbers::pi - cfg.cut_margin)) {
    throw CutLocusViolation("transport_velocity: gradient reaches the cut locus");
  }
  const SpherePoint y = exp_map(x, TangentVector(x, t * g.vec()), cfg);
  Vector v = std::cos(t * r) * g.vec() - r * std::sin(t * r) * x.coords();
  v -= y.coords().dot(v) * y.coords();
  return TangentVector(y, std::move(v));
}

}  // namespace sphot
