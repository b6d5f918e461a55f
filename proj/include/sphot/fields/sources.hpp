#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <type_traits>
#include <utility>
#include <vector>

#include "sphot/fields/grid.hpp"
#include "sphot/numeric/jet.hpp"

namespace sphot {

/// Something that can be evaluated at ambient coordinates X in R^{n+1}.
///
/// Smooth sources are functions of X on a neighbourhood of the sphere; their
/// ambient jets give exact Riemannian gradients and Hessians.  Non-smooth
/// sources (grid interpolants) only provide values and are differentiated by
/// geodesic finite differences.
class FieldSource {
 public:
  virtual ~FieldSource() = default;
  virtual int dim() const = 0;
  virtual bool smooth() const { return true; }
  /// Node spacing of a sampled source, 0 for analytic sources.
  virtual double resolution() const { return 0.0; }

  virtual double eval(const double* X) const = 0;
  virtual numeric::Jet1 eval(const numeric::Jet1* X) const = 0;
  virtual numeric::Jet2 eval(const numeric::Jet2* X) const = 0;
};

/// Implements the virtual evaluators through `Derived::evaluate<T>`.
template <class Derived>
class SmoothSource : public FieldSource {
 public:
  double eval(const double* X) const final { return self().template evaluate<double>(X); }
  numeric::Jet1 eval(const numeric::Jet1* X) const final {
    return self().template evaluate<numeric::Jet1>(X);
  }
  numeric::Jet2 eval(const numeric::Jet2* X) const final {
    return self().template evaluate<numeric::Jet2>(X);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// Wraps a generic callable `f(const T* X) -> T`.
template <class F>
class LambdaSource final : public SmoothSource<LambdaSource<F>> {
 public:
  LambdaSource(int dim, F f) : dim_(dim), f_(std::move(f)) {}
  int dim() const override { return dim_; }
  template <class T>
  T evaluate(const T* X) const {
    return f_(X);
  }

 private:
  int dim_;
  F f_;
};

/// Real spherical-harmonic expansion on S^2.
///
/// Basis functions are orthonormal for the normalized area measure, so
/// Y_00 = 1 and Y_10 = sqrt(3) z.  Coefficients are stored for l = 0..lmax
/// and m = -l..l in lexicographic order (index l^2 + l + m); m > 0 selects
/// cos(m lon), m < 0 selects sin(|m| lon).  Each Y_lm is evaluated as the
/// polynomial Qbar_lm(z) Re/Im (x + i y)^m, so it extends smoothly off the
/// sphere and differentiates exactly through jets.
class HarmonicExpansion final : public SmoothSource<HarmonicExpansion> {
 public:
  HarmonicExpansion(int lmax, std::vector<double> coeffs)
      : lmax_(lmax), coeffs_(std::move(coeffs)), tables_(tables_for(lmax)) {
    if (lmax < 0) throw InvalidArgument("HarmonicExpansion: negative degree");
    if (static_cast<int>(coeffs_.size()) != (lmax + 1) * (lmax + 1)) {
      throw InvalidArgument("HarmonicExpansion: expected (lmax+1)^2 coefficients");
    }
  }

  static int index(int l, int m) { return l * l + l + m; }

  int dim() const override { return 2; }
  int lmax() const { return lmax_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(int l, int m) const { return coeffs_[index(l, m)]; }

  template <class T>
  T evaluate(const T* X) const {
    const T& x = X[0];
    const T& y = X[1];
    const T& z = X[2];
    T result(0.0);
    T re(1.0), im(0.0);  // (x + i y)^m
    for (int m = 0; m <= lmax_; ++m) {
      if (m > 0) {
        T next_re = x * re - y * im;
        im = x * im + y * re;
        re = std::move(next_re);
      }
      const double qmm = tables_->qmm[m];
      T cos_sum(coeff(m, m) * qmm);
      T sin_sum(m > 0 ? coeff(m, -m) * qmm : 0.0);
      if (m + 1 <= lmax_) {
        T q_prev(qmm);
        T q = z * (std::sqrt(2.0 * m + 3.0) * qmm);
        numeric::axpy(cos_sum, q, coeff(m + 1, m));
        if (m > 0) numeric::axpy(sin_sum, q, coeff(m + 1, -m));
        for (int l = m + 2; l <= lmax_; ++l) {
          T next = tables_->a(l, m) * (z * q) - tables_->b(l, m) * q_prev;
          q_prev = std::move(q);
          q = std::move(next);
          numeric::axpy(cos_sum, q, coeff(l, m));
          if (m > 0) numeric::axpy(sin_sum, q, coeff(l, -m));
        }
      }
      if (m == 0) {
        result += cos_sum;
      } else {
        result += cos_sum * re;
        result += sin_sum * im;
      }
    }
    return result;
  }

  /// All basis values at a point of the sphere, in coefficient order.
  static std::vector<double> basis(int lmax, const double* X) {
    std::vector<double> out((lmax + 1) * (lmax + 1), 0.0);
    const auto tables = tables_for(lmax);
    const double x = X[0], y = X[1], z = X[2];
    double re = 1.0, im = 0.0;
    for (int m = 0; m <= lmax; ++m) {
      if (m > 0) {
        const double nr = x * re - y * im;
        im = x * im + y * re;
        re = nr;
      }
      double q_prev = 0.0, q = tables->qmm[m];
      for (int l = m; l <= lmax; ++l) {
        if (l == m + 1) {
          q_prev = q;
          q = std::sqrt(2.0 * m + 3.0) * z * q;
        } else if (l > m + 1) {
          const double next = tables->a(l, m) * z * q - tables->b(l, m) * q_prev;
          q_prev = q;
          q = next;
        }
        if (m == 0) {
          out[index(l, 0)] = q;
        } else {
          out[index(l, m)] = q * re;
          out[index(l, -m)] = q * im;
        }
      }
    }
    return out;
  }

 private:
  struct Tables {
    int lmax;
    std::vector<double> qmm;
    std::vector<double> a_, b_;
    double a(int l, int m) const { return a_[l * (lmax + 1) + m]; }
    double b(int l, int m) const { return b_[l * (lmax + 1) + m]; }
  };

  static std::shared_ptr<const Tables> tables_for(int lmax) {
    auto t = std::make_shared<Tables>();
    t->lmax = lmax;
    t->qmm.assign(lmax + 1, 1.0);
    if (lmax >= 1) t->qmm[1] = std::sqrt(3.0);
    for (int m = 2; m <= lmax; ++m) {
      t->qmm[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * t->qmm[m - 1];
    }
    t->a_.assign((lmax + 1) * (lmax + 1), 0.0);
    t->b_.assign((lmax + 1) * (lmax + 1), 0.0);
    for (int m = 0; m <= lmax; ++m) {
      for (int l = m + 2; l <= lmax; ++l) {
        const double lm = double(l - m), lp = double(l + m);
        t->a_[l * (lmax + 1) + m] = std::sqrt((4.0 * l * l - 1.0) / (lm * lp));
        t->b_[l * (lmax + 1) + m] =
            std::sqrt((2.0 * l + 1.0) * (lp - 1.0) * (lm - 1.0) / (lm * lp * (2.0 * l - 3.0)));
      }
    }
    return t;
  }

  int lmax_;
  std::vector<double> coeffs_;
  std::shared_ptr<const Tables> tables_;
};

/// Sum of ridge monomials c_k <g_k, X>^{p_k} plus a constant, on any S^n.
/// A ridge monomial of degree p restricts to a harmonic polynomial sum of
/// degree at most p, so the field is bandlimited at max p_k.
class RidgePolynomial final : public SmoothSource<RidgePolynomial> {
 public:
  struct Term {
    Vector direction;
    int degree = 1;
    double coeff = 1.0;
  };

  RidgePolynomial(int dim, std::vector<Term> terms, double offset = 0.0)
      : dim_(dim), terms_(std::move(terms)), offset_(offset) {
    for (const auto& t : terms_) {
      if (t.direction.size() != dim_ + 1 || t.degree < 0) {
        throw InvalidArgument("RidgePolynomial: malformed term");
      }
    }
  }

  int dim() const override { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  int degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.degree);
    return d;
  }

  template <class T>
  T evaluate(const T* X) const {
    using std::pow;
    using numeric::pow;
    T result(offset_);
    for (const auto& t : terms_) {
      T s(0.0);
      for (int i = 0; i <= dim_; ++i) s += X[i] * t.direction(i);
      if constexpr (std::is_same_v<T, double>) {
        result += t.coeff * std::pow(s, t.degree);
      } else {
        result += t.coeff * pow(s, t.degree);
      }
    }
    return result;
  }

 private:
  int dim_;
  std::vector<Term> terms_;
  double offset_;
};

/// sum_k w_k f_k + offset.
class LinearCombination final : public FieldSource {
 public:
  LinearCombination(std::vector<std::pair<double, std::shared_ptr<const FieldSource>>> terms,
                    double offset)
      : terms_(std::move(terms)), offset_(offset) {
    if (terms_.empty()) throw InvalidArgument("LinearCombination: no terms");
    for (const auto& [w, f] : terms_) {
      if (f->dim() != terms_.front().second->dim()) {
        throw InvalidArgument("LinearCombination: sphere dimensions differ");
      }
    }
  }

  int dim() const override { return terms_.front().second->dim(); }
  bool smooth() const override {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second->smooth(); });
  }
  double resolution() const override {
    double r = 0.0;
    for (const auto& t : terms_) r = std::max(r, t.second->resolution());
    return r;
  }
  double eval(const double* X) const override { return combine(X); }
  numeric::Jet1 eval(const numeric::Jet1* X) const override { return combine(X); }
  numeric::Jet2 eval(const numeric::Jet2* X) const override { return combine(X); }

 private:
  template <class T>
  T combine(const T* X) const {
    T r(offset_);
    for (const auto& [w, f] : terms_) {
      numeric::axpy(r, f->eval(X), w);
    }
    return r;
  }

  std::vector<std::pair<double, std::shared_ptr<const FieldSource>>> terms_;
  double offset_;
};

/// x -> f(R^T x) for an orthogonal matrix R.
class RotatedSource final : public FieldSource {
 public:
  RotatedSource(std::shared_ptr<const FieldSource> inner, Matrix rotation)
      : inner_(std::move(inner)), rotation_(std::move(rotation)) {
    const int m = inner_->dim() + 1;
    if (rotation_.rows() != m || rotation_.cols() != m) {
      throw InvalidArgument("RotatedSource: rotation size mismatch");
    }
  }
  int dim() const override { return inner_->dim(); }
  bool smooth() const override { return inner_->smooth(); }
  double resolution() const override { return inner_->resolution(); }
  double eval(const double* X) const override { return apply(X); }
  numeric::Jet1 eval(const numeric::Jet1* X) const override { return apply(X); }
  numeric::Jet2 eval(const numeric::Jet2* X) const override { return apply(X); }

 private:
  template <class T>
  T apply(const T* X) const {
    const int m = dim() + 1;
    std::array<T, numeric::kMaxJetDim> Y{};
    for (int i = 0; i < m; ++i) {
      Y[i] = T(0.0);
      for (int j = 0; j < m; ++j) {
        numeric::axpy(Y[i], X[j], rotation_(j, i));
      }
    }
    return inner_->eval(Y.data());
  }

  std::shared_ptr<const FieldSource> inner_;
  Matrix rotation_;
};

/// Bilinear interpolation in (colatitude, longitude) of S^2 grid samples.
/// Values only; derivatives are taken by finite differences.
class BilinearGridSource final : public FieldSource {
 public:
  explicit BilinearGridSource(GridFunction samples) : samples_(std::move(samples)) {
    if (samples_.grid.dim() != 2) {
      throw DimensionUnsupported("bilinear interpolation is provided on S^2 only");
    }
    const auto& s = samples_.grid.spec();
    colat_.resize(s.n_colat);
    for (int i = 0; i < s.n_colat; ++i) {
      const auto p = samples_.grid.coords(i * s.n_lon);
      colat_[i] = std::atan2(std::hypot(p(0), p(1)), p(2));
    }
    // Pole values: ring averages of the outermost rows.
    north_ = south_ = 0.0;
    for (int j = 0; j < s.n_lon; ++j) {
      north_ += samples_.values[j] / s.n_lon;
      south_ += samples_.values[(s.n_colat - 1) * s.n_lon + j] / s.n_lon;
    }
  }

  int dim() const override { return 2; }
  bool smooth() const override { return false; }
  double resolution() const override { return samples_.grid.spacing(); }

  double eval(const double* X) const override {
    const auto& s = samples_.grid.spec();
    const double theta = std::atan2(std::hypot(X[0], X[1]), X[2]);
    double lon = std::atan2(X[1], X[0]);
    if (lon < 0) lon += 2.0 * std::numbers::pi;
    const double fl = lon / (2.0 * std::numbers::pi) * s.n_lon;
    const int j0 = static_cast<int>(std::floor(fl)) % s.n_lon;
    const int j1 = (j0 + 1) % s.n_lon;
    const double tl = fl - std::floor(fl);
    auto ring = [&](int i) {
      return (1.0 - tl) * samples_.values[i * s.n_lon + j0] + tl * samples_.values[i * s.n_lon + j1];
    };
    if (theta <= colat_.front()) {
      const double t = theta / colat_.front();
      return (1.0 - t) * north_ + t * ring(0);
    }
    if (theta >= colat_.back()) {
      const double t = (theta - colat_.back()) / (std::numbers::pi - colat_.back());
      return (1.0 - t) * ring(s.n_colat - 1) + t * south_;
    }
    const int i1 = static_cast<int>(std::upper_bound(colat_.begin(), colat_.end(), theta) - colat_.begin());
    const int i0 = i1 - 1;
    const double t = (theta - colat_[i0]) / (colat_[i1] - colat_[i0]);
    return (1.0 - t) * ring(i0) + t * ring(i1);
  }
  numeric::Jet1 eval(const numeric::Jet1*) const override {
    throw NonSmoothField("bilinear interpolant has no exact derivatives");
  }
  numeric::Jet2 eval(const numeric::Jet2*) const override {
    throw NonSmoothField("bilinear interpolant has no exact derivatives");
  }

 private:
  GridFunction samples_;
  std::vector<double> colat_;
  double north_, south_;
};

}  // namespace sphot
