#include <json.hpp>

#include "uuvnav/geo.hpp"

namespace uuvnav::geo {

namespace {

using nlohmann::json;

const json& find_polygon_geometry(const json& doc) {
  const std::string type = doc.value("type", "");
  if (type == "Polygon") return doc;
  if (type == "Feature") {
    if (!doc.contains("geometry") || doc["geometry"].is_null()) {
      throw GeoError("GeoJSON feature has no geometry");
    }
    return find_polygon_geometry(doc["geometry"]);
  }
  if (type == "FeatureCollection") {
    const auto& features = doc.at("features");
    if (!features.is_array() || features.empty()) {
      throw GeoError("GeoJSON FeatureCollection has no features");
    }
    return find_polygon_geometry(features.front());
  }
  if (type == "MultiPolygon") {
    throw GeoError("MultiPolygon missions are not supported; supply a single Polygon");
  }
  throw GeoError("expected a GeoJSON Polygon, got type '" + type + "'");
}

}  // namespace

MissionPolygon load_polygon_geojson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GeoError(std::string("invalid GeoJSON: ") + e.what());
  }
  const json& geometry = find_polygon_geometry(doc);
  const auto& rings = geometry.at("coordinates");
  if (!rings.is_array() || rings.empty()) {
    throw GeoError("GeoJSON Polygon has no rings");
  }
  if (rings.size() > 1) {
    throw GeoError("GeoJSON Polygon has " + std::to_string(rings.size() - 1) +
                   " hole(s); holes are not supported");
  }
  std::vector<Point2D> vertices;
  for (const auto& c : rings.front()) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw GeoError("GeoJSON Polygon coordinate must be [x, y]");
    }
    vertices.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  // GeoJSON rings repeat the first vertex at the end.
  if (vertices.size() > 1 && vertices.front() == vertices.back()) vertices.pop_back();
  return MissionPolygon(std::move(vertices));
}

}  // namespace uuvnav::geo
