#include "uuvnav/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace uuvnav::io {

using nlohmann::json;

std::vector<BeaconRecord> name_beacons(const deploy::DeploymentResult& result, int first_id) {
  const auto& pos = result.beacon_positions;
  std::vector<std::size_t> order(pos.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pos[a].x != pos[b].x) return pos[a].x < pos[b].x;
    return pos[a].y < pos[b].y;
  });
  std::vector<BeaconRecord> out;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank];
    BeaconRecord r;
    r.id = "b" + std::to_string(first_id + static_cast<int>(rank));
    r.position = pos[i];
    if (i < result.depth_kinds.size()) r.depth = result.depth_kinds[i];
    if (i < result.beacon_depths.size()) r.water_depth = result.beacon_depths[i];
    if (i < result.cell_volumes.size()) r.volume = result.cell_volumes[i];
    out.push_back(std::move(r));
  }
  return out;
}

json beacons_to_geojson(const std::vector<BeaconRecord>& beacons) {
  json features = json::array();
  for (const auto& b : beacons) {
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {b.position.x, b.position.y}}}},
                        {"properties",
                         {{"id", b.id},
                          {"depth", deploy::to_string(b.depth)},
                          {"water_depth", b.water_depth},
                          {"volume", b.volume}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::vector<BeaconRecord> beacons_from_geojson(const json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw InputError("beacons: expected a GeoJSON FeatureCollection");
  }
  std::vector<BeaconRecord> out;
  std::size_t k = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = "beacons: feature " + std::to_string(k++);
    try {
      const auto& g = f.at("geometry");
      if (g.at("type") != "Point") throw InputError(where + ": geometry must be a Point");
      const auto& c = g.at("coordinates");
      if (!c.is_array() || c.size() < 2) throw InputError(where + ": bad coordinates");
      BeaconRecord r;
      r.position = {c[0].get<double>(), c[1].get<double>()};
      if (!std::isfinite(r.position.x) || !std::isfinite(r.position.y)) {
        throw InputError(where + ": non-finite coordinates");
      }
      const auto& props = f.at("properties");
      r.id = props.at("id").get<std::string>();
      r.depth = deploy::beacon_depth_from_string(props.value("depth", std::string("seafloor")));
      r.water_depth = props.value("water_depth", 0.0);
      r.volume = props.value("volume", 0.0);
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    } catch (const deploy::DeployError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i].id == out[j].id) throw InputError("beacons: duplicate id '" + out[i].id + "'");
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace uuvnav::io
