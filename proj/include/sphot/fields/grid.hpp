#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "sphot/numeric/gauss_legendre.hpp"
#include "sphot/numeric/special.hpp"
#include "sphot/sphere/types.hpp"

namespace sphot {

enum class GridKind { gauss_legendre_colatitude, uniform_lonlat };

inline std::string to_string(GridKind k) {
  return k == GridKind::gauss_legendre_colatitude ? "gauss_legendre_colatitude" : "uniform_lonlat";
}

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "gauss_legendre_colatitude") return GridKind::gauss_legendre_colatitude;
  if (s == "uniform_lonlat") return GridKind::uniform_lonlat;
  throw InvalidArgument("unknown grid kind '" + s + "'");
}

/// Structured quadrature grid description.
///
/// On S^2 the nodes are (colatitude, longitude) pairs.  On S^3 the grid uses
/// Hopf coordinates x = (sqrt(1-u) e^{i a}, sqrt(u) e^{i b}), in which the
/// invariant measure is du da db / (4 pi^2); `n_colat` nodes are placed in u
/// and `n_lon` uniform nodes in each of the angles a and b.
struct GridSpec {
  GridKind kind = GridKind::gauss_legendre_colatitude;
  int n_colat = 32;
  int n_lon = 64;
  int dim = 2;

  bool operator==(const GridSpec&) const = default;
};

/// Quadrature nodes and positive weights summing to one (the normalized
/// invariant measure).  Nodes are stored colatitude-major.  Copies share the
/// underlying storage.
class SphereGrid {
 public:
  explicit SphereGrid(GridSpec spec) : data_(std::make_shared<Data>()) {
    if (spec.n_colat < 1 || spec.n_lon < 1) {
      throw InvalidArgument("SphereGrid: grid sizes must be positive");
    }
    data_->spec = spec;
    if (spec.dim == 2) {
      build_s2();
    } else if (spec.dim == 3) {
      build_s3();
    } else {
      throw DimensionUnsupported("SphereGrid: grids are provided for S^2 and S^3");
    }
    numeric::CompensatedSum total;
    for (double w : data_->weights) total += w;
    for (double& w : data_->weights) w /= total.value();
  }

  const GridSpec& spec() const { return data_->spec; }
  int dim() const { return data_->spec.dim; }
  int size() const { return static_cast<int>(data_->weights.size()); }
  const std::vector<double>& weights() const { return data_->weights; }
  double weight(int i) const { return data_->weights[i]; }

  /// Ambient coordinates of node i (column i of an (n+1) x N matrix).
  auto coords(int i) const { return data_->points.col(i); }
  const Matrix& points() const { return data_->points; }
  SpherePoint point(int i) const { return SpherePoint(data_->points.col(i)); }

  /// Typical spacing between neighbouring nodes, in radians.
  double spacing() const {
    const double base = std::numbers::pi / data_->spec.n_colat;
    return data_->spec.dim == 2 ? base : 0.5 * base;
  }

  bool same_nodes(const SphereGrid& o) const { return data_ == o.data_ || spec() == o.spec(); }

 private:
  struct Data {
    GridSpec spec;
    Matrix points;
    std::vector<double> weights;
  };

  void build_s2() {
    const GridSpec& s = data_->spec;
    std::vector<double> cos_colat(s.n_colat), colat_weight(s.n_colat);
    if (s.kind == GridKind::gauss_legendre_colatitude) {
      const auto rule = numeric::gauss_legendre(s.n_colat);
      // Nodes ordered by increasing colatitude, i.e. decreasing z.
      for (int i = 0; i < s.n_colat; ++i) {
        cos_colat[i] = rule.nodes[s.n_colat - 1 - i];
        colat_weight[i] = rule.weights[s.n_colat - 1 - i];
      }
    } else {
      const double dtheta = std::numbers::pi / s.n_colat;
      for (int i = 0; i < s.n_colat; ++i) {
        const double theta = (i + 0.5) * dtheta;
        cos_colat[i] = std::cos(theta);
        colat_weight[i] = std::sin(theta) * dtheta;
      }
    }
    const int n = s.n_colat * s.n_lon;
    data_->points.resize(3, n);
    data_->weights.resize(n);
    for (int i = 0; i < s.n_colat; ++i) {
      const double z = cos_colat[i];
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int j = 0; j < s.n_lon; ++j) {
        const double lon = 2.0 * std::numbers::pi * j / s.n_lon;
        const int k = i * s.n_lon + j;
        data_->points(0, k) = r * std::cos(lon);
        data_->points(1, k) = r * std::sin(lon);
        data_->points(2, k) = z;
        data_->weights[k] = colat_weight[i] / s.n_lon;
      }
    }
  }

  void build_s3() {
    const GridSpec& s = data_->spec;
    std::vector<double> u(s.n_colat), uw(s.n_colat);
    if (s.kind == GridKind::gauss_legendre_colatitude) {
      const auto rule = numeric::gauss_legendre(s.n_colat, 0.0, 1.0);
      u = rule.nodes;
      uw = rule.weights;
    } else {
      for (int i = 0; i < s.n_colat; ++i) {
        u[i] = (i + 0.5) / s.n_colat;
        uw[i] = 1.0 / s.n_colat;
      }
    }
    const long n = static_cast<long>(s.n_colat) * s.n_lon * s.n_lon;
    data_->points.resize(4, n);
    data_->weights.resize(n);
    long k = 0;
    for (int i = 0; i < s.n_colat; ++i) {
      const double r1 = std::sqrt(1.0 - u[i]);
      const double r2 = std::sqrt(u[i]);
      for (int j = 0; j < s.n_lon; ++j) {
        const double a = 2.0 * std::numbers::pi * j / s.n_lon;
        for (int l = 0; l < s.n_lon; ++l, ++k) {
          const double b = 2.0 * std::numbers::pi * l / s.n_lon;
          data_->points(0, k) = r1 * std::cos(a);
          data_->points(1, k) = r1 * std::sin(a);
          data_->points(2, k) = r2 * std::cos(b);
          data_->points(3, k) = r2 * std::sin(b);
          data_->weights[k] = uw[i] / (double(s.n_lon) * s.n_lon);
        }
      }
    }
  }

  std::shared_ptr<Data> data_;
};

/// Values sampled on the nodes of a grid.
struct GridFunction {
  SphereGrid grid;
  std::vector<double> values;

  explicit GridFunction(SphereGrid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
  GridFunction(SphereGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.size()) {
      throw InvalidArgument("GridFunction: value count does not match the grid");
    }
  }

  int size() const { return grid.size(); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

/// Integral against the normalized invariant measure.
inline double quadrature(const GridFunction& f) {
  numeric::CompensatedSum s;
  for (int i = 0; i < f.size(); ++i) s += f.grid.weight(i) * f.values[i];
  return s.value();
}

}  // namespace sphot
