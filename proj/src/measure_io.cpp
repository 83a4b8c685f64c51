#include "potlab/measure_io.hpp"

#include <cmath>

#include "potlab/errors.hpp"

namespace potlab {

const Json& json_child(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + "." + key, "missing field");
  return *it;
}

double json_number(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = json_child(j, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key, "must be finite");
  return d;
}

double json_number_or(const Json& j, const std::string& key, double fallback,
                      const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return json_number(j, key, where);
}

long json_integer(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = json_child(j, key, where);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key, "expected an integer");
  return v.get<long>();
}

Json rect_to_json(const Rect& r) { return Json::array({r.x_min, r.x_max, r.y_min, r.y_max}); }

Rect rect_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4)
    throw ConfigError(where, "expected [x_min, x_max, y_min, y_max]");
  for (const auto& v : j)
    if (!v.is_number()) throw ConfigError(where, "rectangle entries must be numbers");
  Rect r{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!r.valid()) throw ConfigError(where, "rectangle has min > max");
  return r;
}

Json measure_to_json(const PlanarMeasure& m) {
  Json out;
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) atoms.push_back(Json::array({a.at.x, a.at.y, a.mass}));
  out["atoms"] = std::move(atoms);
  if (m.has_density()) {
    const auto& g = m.grid();
    out["density"] = {{"rect", rect_to_json(g.rect)}, {"nx", g.nx}, {"ny", g.ny}, {"cells", g.cells}};
  }
  out["bounding"] = rect_to_json(m.bounding());
  if (m.window()) out["window"] = rect_to_json(*m.window());
  return out;
}

PlanarMeasure measure_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const Json& arr = j["atoms"];
    if (!arr.is_array()) throw ConfigError(where + ".atoms", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string w = where + ".atoms[" + std::to_string(i) + "]";
      const Json& a = arr[i];
      if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() ||
          !a[2].is_number())
        throw ConfigError(w, "expected [x, y, mass]");
      const double mass = a[2].get<double>();
      if (!(mass > 0.0)) throw ConfigError(w, "atom mass must be positive");
      atoms.push_back({{a[0].get<double>(), a[1].get<double>()}, mass});
    }
  }
  std::optional<DensityGrid> grid;
  if (j.contains("density") && !j["density"].is_null()) {
    const std::string w = where + ".density";
    const Json& d = j["density"];
    DensityGrid g;
    g.rect = rect_from_json(json_child(d, "rect", w), w + ".rect");
    g.nx = static_cast<int>(json_integer(d, "nx", w));
    g.ny = static_cast<int>(json_integer(d, "ny", w));
    if (g.nx <= 0 || g.ny <= 0) throw ConfigError(w, "nx and ny must be positive");
    if (g.rect.degenerate()) throw ConfigError(w + ".rect", "must have positive area");
    const Json& cells = json_child(d, "cells", w);
    if (!cells.is_array()) throw ConfigError(w + ".cells", "expected an array");
    if (cells.size() != static_cast<std::size_t>(g.nx) * g.ny)
      throw ConfigError(w + ".cells", "expected nx*ny = " + std::to_string(g.nx * g.ny) +
                                          " entries, got " + std::to_string(cells.size()));
    g.cells.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!cells[i].is_number() || !(cells[i].get<double>() >= 0.0))
        throw ConfigError(w + ".cells[" + std::to_string(i) + "]", "expected a nonnegative number");
      g.cells.push_back(cells[i].get<double>());
    }
    grid = std::move(g);
  }
  std::optional<Rect> bounding;
  if (j.contains("bounding")) bounding = rect_from_json(j["bounding"], where + ".bounding");
  try {
    PlanarMeasure m(std::move(atoms), std::move(grid), bounding);
    if (j.contains("window")) m = m.with_window(rect_from_json(j["window"], where + ".window"));
    return m;
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  }
}

}  // namespace potlab
