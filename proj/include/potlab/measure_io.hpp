#pragma once

#include <string>

#include "json.hpp"
#include "potlab/measure.hpp"

namespace potlab {

using Json = nlohmann::ordered_json;

Json rect_to_json(const Rect& r);
Rect rect_from_json(const Json& j, const std::string& where);

/// {atoms: [[x, y, mass]...], density: {rect, nx, ny, cells}, bounding?, window?}
Json measure_to_json(const PlanarMeasure& m);
PlanarMeasure measure_from_json(const Json& j, const std::string& where = "measure");

/// Typed field access that throws ConfigError naming the field path.
double json_number(const Json& j, const std::string& key, const std::string& where);
double json_number_or(const Json& j, const std::string& key, double fallback, const std::string& where);
long json_integer(const Json& j, const std::string& key, const std::string& where);
const Json& json_child(const Json& j, const std::string& key, const std::string& where);

}  // namespace potlab
