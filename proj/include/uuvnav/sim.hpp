#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "uuvnav/deploy.hpp"
#include "uuvnav/geo.hpp"
#include "uuvnav/ground.hpp"

namespace uuvnav::sim {

using geo::Point2D;
using hddl::GroundTask;

struct WorldParams {
  double tick = 1.0;
  double comm_range = 2000.0;
  /// Dead-reckoning error growth, meters of 1-sigma per meter travelled.
  double drift_rate = 0.02;
  double standoff = 50.0;
  double localization_floor = 5.0;
  Point2D current{0.0, 0.0};  // constant drift, m/s
};

inline constexpr double kDefaultAcousticRange = 2000.0;
inline constexpr double kDefaultPulsePeriod = 10.0;

struct BeaconState {
  std::string id;
  Point2D position;
  deploy::BeaconDepth depth = deploy::BeaconDepth::seafloor;
  double acoustic_range = kDefaultAcousticRange;
  bool active = true;
  double pulse_period = kDefaultPulsePeriod;
};

/// How the simulator executes a primitive action, chosen by action name.
enum class ActionKind {
  navigate,   // navigate-to-beacon: go to the beacon standoff point, listening
  sense,      // sense-beacon: wait for a detection
  circle,     // circle-localize: orbit the beacon, then reset uncertainty
  broadcast,  // broadcast: send estimated position and effect atoms
  transit,    // transit-leg: go to the beacon standoff point, deaf
  await,      // await-broadcast: wait for a message from the named peer
  join,       // join-broadcaster: go to the peer's broadcast position
  instant,    // anything else: completes at once
};
ActionKind action_kind(const std::string& action_name);
std::string to_string(ActionKind kind);

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct ActiveAction {
  GroundTask task;
  ActionKind kind = ActionKind::instant;
  double start_time = 0.0;
  std::size_t beacon = kNone;  // world beacon index, when the action names one
  std::size_t peer = kNone;    // world UUV index, when the action names one
  Point2D target;
  bool detected = false;
  // circle-localize
  Point2D orbit_center;
  double orbit_radius = 0.0;
  double orbit_angle = 0.0;
  std::uint64_t orbit_ticks = 0;
  std::uint64_t orbit_ticks_needed = 0;
};

enum class MissionStatus { idle, running, completed, failed };
std::string to_string(MissionStatus s);

struct UUVState {
  std::string id;
  Point2D true_position;
  Point2D estimated_position;
  double uncertainty = 0.0;  // 1-sigma radius, meters
  double heading = 0.0;      // radians, counterclockwise from east
  double speed = 0.0;        // m/s through the water
  std::deque<GroundTask> queue;
  std::optional<ActiveAction> current;
  std::size_t steps_done = 0;  // steps of the active plan already completed
  MissionStatus status = MissionStatus::idle;

  hddl::State belief;
  std::shared_ptr<const hddl::GroundTables> tables;
  std::set<std::string> known_objects;  // object names valid in `belief`
  /// Broadcast positions received, by sender id.
  std::map<std::string, Point2D> rally;
  /// Beacons to report detections of besides the current action's one.
  std::set<std::size_t> listening;
  /// Tick of the last detection reported per beacon index.
  std::map<std::size_t, std::uint64_t> last_detection;
};

struct Event {
  double time = 0.0;
  std::string kind;
  std::size_t subject = kNone;  // UUV index
  std::string subject_id;
  nlohmann::json payload = nlohmann::json::object();
};

nlohmann::json event_to_json(const Event& e);
inline constexpr int kEventSchemaVersion = 1;

struct World {
  std::uint64_t ticks = 0;
  double time = 0.0;  // always ticks * params.tick
  WorldParams params;
  std::vector<BeaconState> beacons;
  std::vector<UUVState> uuvs;  // sorted by id
  std::uint64_t rng_seed = 0;

  std::size_t beacon_index(const std::string& id) const;
  std::size_t uuv_index(const std::string& id) const;
};

bool is_pulse_instant(double time, double period);

/// Binary detection: beacon active, within range of the true position, and
/// the current time is one of the beacon's pulse instants.
bool sense_beacon(const World& world, const UUVState& uuv, const BeaconState& beacon);

/// Replaces the UUV's action queue, aborting any action in progress.
void assign_plan(UUVState& uuv, const std::vector<GroundTask>& steps);

/// Processes the current instant without moving anything: starts actions,
/// completes instantaneous ones, emits detections. Used once at time zero.
std::vector<Event> settle(World& world);

/// Moves every UUV over one tick, advances time, then processes the new
/// instant. Events come back ordered by (time, UUV index, emission order).
std::vector<Event> step(World& world);

/// Point `standoff` meters short of `beacon` on the line from `from`.
Point2D standoff_point(Point2D from, Point2D beacon, double standoff);

/// Seconds needed to fly one full circle of radius `standoff` at `speed`.
double circle_duration(double standoff, double speed);

}  // namespace uuvnav::sim
