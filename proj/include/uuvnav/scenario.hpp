#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uuvnav/deploy.hpp"
#include "uuvnav/htn.hpp"
#include "uuvnav/io.hpp"
#include "uuvnav/monitor.hpp"
#include "uuvnav/sim.hpp"

namespace uuvnav::scenario {

/// Scenario could not run (for example a vehicle's mission is unsolvable
/// from the start).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UuvSpec {
  std::string id;
  std::filesystem::path problem;
  geo::Point2D start;
  double speed = 2.0;
  double uncertainty = 0.0;
};

struct BeaconSwitch {
  std::string beacon;
  double time = 0.0;
};

struct DeploymentSpec {
  std::optional<std::filesystem::path> bathymetry;
  std::optional<std::filesystem::path> polygon;
  std::size_t n_beacons = 0;
  std::size_t max_iterations = 100;
  double volume_tolerance = 0.05;
  int first_id = 1;
  double link_distance = deploy::kDefaultLinkDistance;
  deploy::BeaconDepth depth = deploy::BeaconDepth::seafloor;
};

/// Paths are resolved against the directory of the config file.
struct ScenarioConfig {
  std::filesystem::path source;  // the config file itself
  std::uint64_t seed = 0;
  DeploymentSpec deployment;
  std::optional<std::filesystem::path> beacons;
  std::optional<std::filesystem::path> domain;
  std::vector<UuvSpec> uuvs;
  sim::WorldParams world;
  double acoustic_range = sim::kDefaultAcousticRange;
  double pulse_period = sim::kDefaultPulsePeriod;
  double margin = monitor::kDefaultMargin;
  std::uint64_t step_cap = 100000;
  std::size_t max_decompositions = 10000;
  std::vector<std::string> silenced;      // inactive from the start
  std::vector<BeaconSwitch> deactivate;   // switched off at a given time
  std::optional<std::filesystem::path> output;
};

/// Reads a YAML scenario file. Every referenced path must exist.
/// Throws io::InputError.
ScenarioConfig load_config(const std::filesystem::path& file);

deploy::DeploymentProblem deployment_problem(const ScenarioConfig& config);

/// Beacons from the configured file, or from running the deployment.
std::vector<io::BeaconRecord> scenario_beacons(const ScenarioConfig& config);

struct Track {
  std::string id;
  std::vector<geo::Point2D> true_path;
  std::vector<geo::Point2D> estimated_path;
};

struct VehicleSummary {
  std::string id;
  sim::MissionStatus status = sim::MissionStatus::idle;
  std::size_t replans = 0;
  double uncertainty = 0.0;
  geo::Point2D true_position;
  geo::Point2D estimated_position;
};

struct ScenarioResult {
  std::vector<sim::Event> events;
  std::vector<Track> tracks;
  std::vector<monitor::DivergenceRecord> divergences;
  std::vector<monitor::Expectation> expectations;  // every expectation opened
  std::vector<VehicleSummary> vehicles;
  std::vector<htn::Plan> initial_plans;
  std::size_t replan_count = 0;
  std::uint64_t ticks = 0;
  double sim_time = 0.0;
  bool step_cap_hit = false;
};

ScenarioResult run_scenario(const ScenarioConfig& config,
                            const std::vector<io::BeaconRecord>& beacons);

std::string events_jsonl(const ScenarioResult& result);
nlohmann::json tracks_geojson(const ScenarioResult& result);
nlohmann::json summary_json(const ScenarioResult& result);

}  // namespace uuvnav::scenario
