#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uuvnav/deploy.hpp"
#include "uuvnav/geo.hpp"

namespace uuvnav::io {

/// Bad or missing input file. The message names the file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BeaconRecord {
  std::string id;
  geo::Point2D position;
  deploy::BeaconDepth depth = deploy::BeaconDepth::seafloor;
  double water_depth = 0.0;
  double volume = 0.0;  // water volume of the beacon's region

  friend bool operator==(const BeaconRecord&, const BeaconRecord&) = default;
};

/// Names deployed beacons "b<first_id>", "b<first_id+1>", ... from west to
/// east (ties south to north), so ids do not depend on site numbering.
std::vector<BeaconRecord> name_beacons(const deploy::DeploymentResult& result, int first_id = 1);

nlohmann::json beacons_to_geojson(const std::vector<BeaconRecord>& beacons);
std::vector<BeaconRecord> beacons_from_geojson(const nlohmann::json& doc);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace uuvnav::io
