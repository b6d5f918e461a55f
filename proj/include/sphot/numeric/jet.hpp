#pragma once

#include <array>
#include <cmath>

namespace sphot::numeric {

/// Largest ambient dimension a jet can differentiate in (S^5 in R^6).
inline constexpr int kMaxJetDim = 6;

/// Truncated Taylor jet in up to kMaxJetDim variables.
///
/// `Order == 1` carries value and gradient, `Order == 2` adds the Hessian.
/// Jets built from plain doubles have `dim == 0`; binary operations take the
/// larger of the two dimensions, so constants mix freely with variables.
template <int Order>
struct Jet {
  static_assert(Order == 1 || Order == 2);
  static constexpr int kHessSize = Order == 2 ? kMaxJetDim * kMaxJetDim : 1;

  double v = 0.0;
  int dim = 0;
  std::array<double, kMaxJetDim> g{};
  std::array<double, kHessSize> h{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

  static Jet variable(double value, int index, int d) {
    Jet j(value);
    j.dim = d;
    j.g[index] = 1.0;
    return j;
  }

  double hess(int i, int k) const {
    if constexpr (Order == 2) {
      return h[i * kMaxJetDim + k];
    } else {
      return 0.0;
    }
  }

  Jet& operator+=(const Jet& o) {
    dim = dim > o.dim ? dim : o.dim;
    v += o.v;
    for (int i = 0; i < dim; ++i) g[i] += o.g[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) h[i * kMaxJetDim + k] += o.h[i * kMaxJetDim + k];
    }
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    dim = dim > o.dim ? dim : o.dim;
    v -= o.v;
    for (int i = 0; i < dim; ++i) g[i] -= o.g[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) h[i * kMaxJetDim + k] -= o.h[i * kMaxJetDim + k];
    }
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    for (int i = 0; i < dim; ++i) g[i] *= s;
    if constexpr (Order == 2) {
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) h[i * kMaxJetDim + k] *= s;
    }
    return *this;
  }
  Jet& operator+=(double s) {
    v += s;
    return *this;
  }

  /// this += a * b, the inner loop of every polynomial evaluation.
  void add_product(const Jet& a, const Jet& b) {
    const int d = a.dim > b.dim ? a.dim : b.dim;
    dim = dim > d ? dim : d;
    v += a.v * b.v;
    for (int i = 0; i < d; ++i) g[i] += a.v * b.g[i] + b.v * a.g[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
          const int ik = i * kMaxJetDim + k;
          h[ik] += a.v * b.h[ik] + b.v * a.h[ik] + a.g[i] * b.g[k] + b.g[i] * a.g[k];
        }
    }
  }
  void add_scaled(const Jet& a, double s) {
    dim = dim > a.dim ? dim : a.dim;
    v += s * a.v;
    for (int i = 0; i < a.dim; ++i) g[i] += s * a.g[i];
    if constexpr (Order == 2) {
      for (int i = 0; i < a.dim; ++i)
        for (int k = 0; k < a.dim; ++k) h[i * kMaxJetDim + k] += s * a.h[i * kMaxJetDim + k];
    }
  }
};

template <int O>
Jet<O> operator+(Jet<O> a, const Jet<O>& b) { return a += b; }
template <int O>
Jet<O> operator-(Jet<O> a, const Jet<O>& b) { return a -= b; }
template <int O>
Jet<O> operator+(Jet<O> a, double s) { return a += s; }
template <int O>
Jet<O> operator+(double s, Jet<O> a) { return a += s; }
template <int O>
Jet<O> operator-(Jet<O> a, double s) { return a += -s; }
template <int O>
Jet<O> operator-(double s, Jet<O> a) {
  a *= -1.0;
  return a += s;
}
template <int O>
Jet<O> operator-(Jet<O> a) {
  a *= -1.0;
  return a;
}
template <int O>
Jet<O> operator*(Jet<O> a, double s) { return a *= s; }
template <int O>
Jet<O> operator*(double s, Jet<O> a) { return a *= s; }
template <int O>
Jet<O> operator*(const Jet<O>& a, const Jet<O>& b) {
  Jet<O> r;
  r.add_product(a, b);
  return r;
}

/// Applies a scalar function given its value and first two derivatives.
template <int O>
Jet<O> chain(const Jet<O>& a, double f0, double f1, double f2) {
  Jet<O> r(f0);
  r.dim = a.dim;
  for (int i = 0; i < a.dim; ++i) r.g[i] = f1 * a.g[i];
  if constexpr (O == 2) {
    for (int i = 0; i < a.dim; ++i)
      for (int k = 0; k < a.dim; ++k) {
        const int ik = i * kMaxJetDim + k;
        r.h[ik] = f1 * a.h[ik] + f2 * a.g[i] * a.g[k];
      }
  }
  return r;
}

template <int O>
Jet<O> operator/(const Jet<O>& a, const Jet<O>& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}
template <int O>
Jet<O> operator/(Jet<O> a, double s) { return a *= 1.0 / s; }

template <int O>
Jet<O> sqrt(const Jet<O>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
template <int O>
Jet<O> sin(const Jet<O>& a) {
  const double s = std::sin(a.v);
  return chain(a, s, std::cos(a.v), -s);
}
template <int O>
Jet<O> cos(const Jet<O>& a) {
  const double c = std::cos(a.v);
  return chain(a, c, -std::sin(a.v), -c);
}
template <int O>
Jet<O> exp(const Jet<O>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
template <int O>
Jet<O> log(const Jet<O>& a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

/// Integer power, exact for polynomial evaluation.
template <int O>
Jet<O> pow(const Jet<O>& a, int n) {
  if (n == 0) return Jet<O>(1.0);
  const double pn1 = std::pow(a.v, n - 1);
  const double pn2 = n >= 2 ? std::pow(a.v, n - 2) : 0.0;
  return chain(a, pn1 * a.v, n * pn1, double(n) * (n - 1) * pn2);
}

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

inline double value_of(double x) { return x; }

/// acc += s * a for doubles and jets alike.
inline void axpy(double& acc, double a, double s) { acc += s * a; }
template <int O>
void axpy(Jet<O>& acc, const Jet<O>& a, double s) { acc.add_scaled(a, s); }

template <int O>
double value_of(const Jet<O>& j) { return j.v; }

}  // namespace sphot::numeric
