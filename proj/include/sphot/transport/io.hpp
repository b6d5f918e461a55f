#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sphot/fields/io.hpp"
#include "sphot/transport/measure.hpp"

namespace sphot {

/// {"dim": n, "points": [[x0, ..., xn], ...], "weights": [...]}
inline DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const auto pts = j.at("points").get<std::vector<std::vector<double>>>();
    auto w = j.at("weights").get<std::vector<double>>();
    Matrix p(dim + 1, static_cast<long>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (static_cast<int>(pts[k].size()) != dim + 1) {
        throw InvalidArgument("measure JSON: point " + std::to_string(k) + " has the wrong length");
      }
      for (int i = 0; i <= dim; ++i) p(i, static_cast<long>(k)) = pts[k][i];
    }
    return DiscreteMeasure(std::move(p), std::move(w));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed measure JSON: ") + e.what());
  }
}

inline nlohmann::json measure_to_json(const DiscreteMeasure& mu) {
  nlohmann::json pts = nlohmann::json::array();
  for (int k = 0; k < mu.size(); ++k) {
    std::vector<double> p(mu.points().col(k).data(), mu.points().col(k).data() + mu.dim() + 1);
    pts.push_back(p);
  }
  return {{"dim", mu.dim()}, {"points", pts}, {"weights", mu.weights()}};
}

inline DiscreteMeasure load_measure(const std::string& path) { return measure_from_json(read_json_file(path)); }

}  // namespace sphot
