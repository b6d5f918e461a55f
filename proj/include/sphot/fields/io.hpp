#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "sphot/fields/scalar_field.hpp"

namespace sphot {

inline nlohmann::json grid_to_json(const GridSpec& g) {
  return {{"kind", to_string(g.kind)}, {"n_colat", g.n_colat}, {"n_lon", g.n_lon}, {"dim", g.dim}};
}

inline GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.kind = grid_kind_from_string(j.value("kind", to_string(g.kind)));
  g.n_colat = j.at("n_colat").get<int>();
  g.n_lon = j.at("n_lon").get<int>();
  g.dim = j.value("dim", 2);
  return g;
}

/// Reads either {"grid": {...}, "values": [...], "interpolation"?: "..."}
/// or {"lmax": L, "coeffs": [...]} (real spherical-harmonic coefficients).
inline ScalarField field_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("lmax")) {
      return harmonic_field(j.at("lmax").get<int>(), j.at("coeffs").get<std::vector<double>>());
    }
    SphereGrid grid(grid_from_json(j.at("grid")));
    GridFunction samples(grid, j.at("values").get<std::vector<double>>());
    const auto interp = interpolation_from_string(j.value("interpolation", std::string("spherical_harmonic")));
    return interpolate(samples, interp);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed field JSON: ") + e.what());
  }
}

inline nlohmann::json field_to_json(const HarmonicExpansion& h) {
  return {{"lmax", h.lmax()}, {"coeffs", h.coeffs()}};
}

inline nlohmann::json field_to_json(const GridFunction& f) {
  return {{"grid", grid_to_json(f.grid.spec())}, {"values", f.values}};
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("cannot parse '" + path + "': " + e.what());
  }
}

inline ScalarField load_field(const std::string& path) { return field_from_json(read_json_file(path)); }

}  // namespace sphot
