#include "uuvnav/scenario.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include <yaml-cpp/yaml.h>

#include "uuvnav/geo.hpp"
#include "uuvnav/hddl.hpp"

namespace uuvnav::scenario {

namespace fs = std::filesystem;
using io::InputError;
using nlohmann::json;

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(fs::path file) : file_(std::move(file)), base_(file_.parent_path()) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(file_.string() + ": " + msg);
  }

  void only_keys(const YAML::Node& node, const std::string& where,
                 std::initializer_list<const char*> allowed) const {
    if (!node.IsMap()) fail(where + " must be a mapping");
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&](const char* a) { return key == a; })) {
        fail("unknown key '" + key + "' in " + where);
      }
    }
  }

  template <typename T>
  T get(const YAML::Node& node, const char* key, T fallback) const {
    const YAML::Node v = node[key];
    if (!v) return fallback;
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  fs::path path(const YAML::Node& node, const char* key) const {
    const fs::path p = (base_ / get<std::string>(node, key, "")).lexically_normal();
    if (!fs::exists(p)) fail(std::string("'") + key + "' refers to a missing file: " + p.string());
    return p;
  }

  std::optional<fs::path> optional_path(const YAML::Node& node, const char* key) const {
    if (!node[key]) return std::nullopt;
    return path(node, key);
  }

  geo::Point2D point(const YAML::Node& node, const char* key, geo::Point2D fallback) const {
    const YAML::Node v = node[key];
    if (!v) return fallback;
    if (!v.IsSequence() || v.size() != 2) fail(std::string("'") + key + "' must be [x, y]");
    try {
      return {v[0].as<double>(), v[1].as<double>()};
    } catch (const YAML::Exception&) {
      fail(std::string("bad coordinates for '") + key + "'");
    }
  }

  const fs::path& base() const { return base_; }

 private:
  fs::path file_;
  fs::path base_;
};

json point_json(geo::Point2D p) { return json::array({p.x, p.y}); }

template <typename F>
auto with_file_context(const fs::path& file, F&& f) {
  try {
    return f();
  } catch (const hddl::ParseError& e) {
    throw InputError(file.string() + ":" + e.what());
  } catch (const geo::GeoError& e) {
    throw InputError(file.string() + ": " + e.what());
  }
}

}  // namespace

ScenarioConfig load_config(const fs::path& file) {
  ScenarioConfig c;
  c.source = file;
  ConfigReader r(file);
  YAML::Node root;
  try {
    root = YAML::Load(io::read_text_file(file));
  } catch (const YAML::Exception& e) {
    r.fail(e.what());
  }
  if (!root || !root.IsMap()) r.fail("expected a mapping at top level");
  r.only_keys(root, "the scenario",
              {"seed", "deployment", "beacons", "planning", "uuvs", "world", "monitor", "output"});
  if (!root["seed"]) r.fail("'seed' is required");
  c.seed = r.get<std::uint64_t>(root, "seed", 0);

  if (const YAML::Node d = root["deployment"]) {
    r.only_keys(d, "deployment",
                {"bathymetry", "polygon", "n_beacons", "max_iterations", "volume_tolerance",
                 "first_id", "link_distance", "depth"});
    c.deployment.bathymetry = r.optional_path(d, "bathymetry");
    c.deployment.polygon = r.optional_path(d, "polygon");
    c.deployment.n_beacons = r.get<std::size_t>(d, "n_beacons", 0);
    c.deployment.max_iterations = r.get<std::size_t>(d, "max_iterations", 100);
    c.deployment.volume_tolerance = r.get<double>(d, "volume_tolerance", 0.05);
    c.deployment.first_id = r.get<int>(d, "first_id", 1);
    c.deployment.link_distance = r.get<double>(d, "link_distance", deploy::kDefaultLinkDistance);
    try {
      c.deployment.depth =
          deploy::beacon_depth_from_string(r.get<std::string>(d, "depth", "seafloor"));
    } catch (const deploy::DeployError& e) {
      r.fail(e.what());
    }
  }
  c.beacons = r.optional_path(root, "beacons");

  if (const YAML::Node p = root["planning"]) {
    r.only_keys(p, "planning", {"domain", "max_decompositions"});
    c.domain = r.optional_path(p, "domain");
    c.max_decompositions = r.get<std::size_t>(p, "max_decompositions", 10000);
  }

  if (const YAML::Node us = root["uuvs"]) {
    if (!us.IsSequence()) r.fail("'uuvs' must be a list");
    std::set<std::string> ids;
    for (const auto& u : us) {
      r.only_keys(u, "a uuv entry", {"id", "problem", "start", "speed", "uncertainty"});
      UuvSpec s;
      s.id = r.get<std::string>(u, "id", "");
      if (s.id.empty()) r.fail("every uuv needs an 'id'");
      if (!ids.insert(s.id).second) r.fail("duplicate uuv id '" + s.id + "'");
      if (!u["problem"]) r.fail("uuv '" + s.id + "' has no 'problem'");
      s.problem = r.path(u, "problem");
      if (!u["start"]) r.fail("uuv '" + s.id + "' has no 'start'");
      s.start = r.point(u, "start", {});
      s.speed = r.get<double>(u, "speed", 2.0);
      s.uncertainty = r.get<double>(u, "uncertainty", 0.0);
      if (!(s.speed >= 0.0) || !(s.uncertainty >= 0.0)) {
        r.fail("uuv '" + s.id + "': speed and uncertainty must be nonnegative");
      }
      c.uuvs.push_back(std::move(s));
    }
  }

  if (const YAML::Node w = root["world"]) {
    r.only_keys(w, "world",
                {"tick", "pulse_period", "acoustic_range", "comm_range", "drift_rate", "standoff",
                 "localization_floor", "current", "step_cap", "silenced", "deactivate"});
    c.world.tick = r.get<double>(w, "tick", c.world.tick);
    c.pulse_period = r.get<double>(w, "pulse_period", c.pulse_period);
    c.acoustic_range = r.get<double>(w, "acoustic_range", c.acoustic_range);
    c.world.comm_range = r.get<double>(w, "comm_range", c.world.comm_range);
    c.world.drift_rate = r.get<double>(w, "drift_rate", c.world.drift_rate);
    c.world.standoff = r.get<double>(w, "standoff", c.world.standoff);
    c.world.localization_floor = r.get<double>(w, "localization_floor", c.world.localization_floor);
    c.world.current = r.point(w, "current", c.world.current);
    c.step_cap = r.get<std::uint64_t>(w, "step_cap", c.step_cap);
    c.silenced = r.get<std::vector<std::string>>(w, "silenced", {});
    if (const YAML::Node list = w["deactivate"]) {
      if (!list.IsSequence()) r.fail("'deactivate' must be a list");
      for (const auto& item : list) {
        r.only_keys(item, "a deactivate entry", {"beacon", "time"});
        c.deactivate.push_back({r.get<std::string>(item, "beacon", ""),
                                r.get<double>(item, "time", 0.0)});
      }
    }
    if (!(c.world.tick > 0.0)) r.fail("'tick' must be positive");
    if (!(c.pulse_period > 0.0)) r.fail("'pulse_period' must be positive");
    if (!(c.acoustic_range > 0.0)) r.fail("'acoustic_range' must be positive");
  }
  if (const YAML::Node m = root["monitor"]) {
    r.only_keys(m, "monitor", {"margin"});
    c.margin = r.get<double>(m, "margin", c.margin);
  }
  if (root["output"]) c.output = r.base() / r.get<std::string>(root, "output", "");
  return c;
}

deploy::DeploymentProblem deployment_problem(const ScenarioConfig& c) {
  const auto& d = c.deployment;
  if (!d.bathymetry || !d.polygon) {
    throw InputError(c.source.string() +
                     ": deployment needs both 'bathymetry' and 'polygon' paths");
  }
  if (d.n_beacons == 0) {
    throw InputError(c.source.string() + ": 'n_beacons' must be at least 1");
  }
  const std::string grid_text = io::read_text_file(*d.bathymetry);
  const std::string poly_text = io::read_text_file(*d.polygon);
  deploy::DeploymentProblem p{
      with_file_context(*d.bathymetry, [&] { return geo::load_ascii_grid(grid_text); }),
      with_file_context(*d.polygon, [&] { return geo::load_polygon_geojson(poly_text); })};
  p.n_beacons = d.n_beacons;
  p.max_iterations = d.max_iterations;
  p.volume_tolerance = d.volume_tolerance;
  p.rng_seed = c.seed;
  return p;
}

std::vector<io::BeaconRecord> scenario_beacons(const ScenarioConfig& c) {
  if (c.beacons) return io::beacons_from_geojson(io::read_json_file(*c.beacons));
  auto result = deploy::lloyd_deploy(deployment_problem(c));
  result.depth_kinds.assign(result.beacon_positions.size(), c.deployment.depth);
  return io::name_beacons(result, c.deployment.first_id);
}

ScenarioResult run_scenario(const ScenarioConfig& config,
                            const std::vector<io::BeaconRecord>& beacons) {
  if (!config.domain) throw InputError(config.source.string() + ": no planning domain given");
  const hddl::Domain domain = with_file_context(
      *config.domain, [&] { return hddl::parse_domain(io::read_text_file(*config.domain)); });

  sim::World world;
  world.params = config.world;
  world.rng_seed = config.seed;
  for (const auto& b : beacons) {
    sim::BeaconState s;
    s.id = b.id;
    s.position = b.position;
    s.depth = b.depth;
    s.acoustic_range = config.acoustic_range;
    s.pulse_period = config.pulse_period;
    world.beacons.push_back(std::move(s));
  }
  for (const auto& id : config.silenced) {
    const std::size_t b = world.beacon_index(id);
    if (b == sim::kNone) throw InputError(config.source.string() + ": unknown beacon '" + id + "'");
    world.beacons[b].active = false;
  }
  for (const auto& sw : config.deactivate) {
    if (world.beacon_index(sw.beacon) == sim::kNone) {
      throw InputError(config.source.string() + ": unknown beacon '" + sw.beacon + "'");
    }
  }

  std::vector<UuvSpec> specs = config.uuvs;
  std::sort(specs.begin(), specs.end(),
            [](const UuvSpec& a, const UuvSpec& b) { return a.id < b.id; });

  ScenarioResult result;
  const htn::PlannerOptions options{config.max_decompositions};
  std::vector<monitor::AgentPlan> plans;
  for (const auto& spec : specs) {
    const hddl::Problem problem = with_file_context(spec.problem, [&] {
      return hddl::parse_problem(io::read_text_file(spec.problem), domain);
    });
    sim::UUVState u;
    u.id = spec.id;
    u.true_position = u.estimated_position = spec.start;
    u.speed = spec.speed;
    u.uncertainty = spec.uncertainty;
    u.tables = std::make_shared<const hddl::GroundTables>(hddl::ground(domain, problem));
    for (const auto& c : domain.constants) u.known_objects.insert(c.name);
    for (const auto& o : problem.objects) u.known_objects.insert(o.name);
    u.belief = hddl::initial_state(problem);
    const auto goal = hddl::ground_goal(problem);
    const auto planned = htn::plan(*u.tables, u.belief, hddl::initial_network(problem), goal, options);
    if (!planned.solved) {
      throw ScenarioError(spec.id + ": no plan for " + spec.problem.string() + ": " +
                          planned.reason);
    }
    std::vector<hddl::GroundTask> steps;
    for (const auto& s : planned.plan.steps) steps.push_back(s.action);
    sim::assign_plan(u, steps);
    result.initial_plans.push_back(planned.plan);
    plans.push_back({planned.plan, goal});
    world.uuvs.push_back(std::move(u));
  }
  result.tracks.resize(world.uuvs.size());
  for (std::size_t i = 0; i < world.uuvs.size(); ++i) result.tracks[i].id = world.uuvs[i].id;

  monitor::Monitor mon(config.margin);
  std::vector<std::size_t> replans(world.uuvs.size(), 0);

  auto record_tracks = [&] {
    for (std::size_t i = 0; i < world.uuvs.size(); ++i) {
      result.tracks[i].true_path.push_back(world.uuvs[i].true_position);
      result.tracks[i].estimated_path.push_back(world.uuvs[i].estimated_position);
    }
  };

  auto handle = [&](std::vector<sim::Event> batch) {
    mon.observe(world, batch);
    std::vector<monitor::ReplanTrigger> triggers;
    for (const auto& ev : batch) {
      if (ev.kind != "action-failed") continue;
      const auto& args = ev.payload.at("args");
      const std::size_t b =
          args.size() >= 2 ? world.beacon_index(args[1].get<std::string>()) : sim::kNone;
      triggers.push_back({ev.subject, b, "action-failed"});
    }
    for (auto& d : mon.take_divergences(world)) {
      const auto& e = d.expectation;
      batch.push_back({world.time, "divergence", e.uuv, e.uuv_id,
                       {{"beacon", e.beacon_id},
                        {"expected", e.kind},
                        {"leg_start", e.leg_start},
                        {"earliest", e.earliest},
                        {"latest", e.latest},
                        {"observed", d.observed}}});
      triggers.push_back({e.uuv, e.beacon, "divergence"});
      result.divergences.push_back(std::move(d));
    }
    for (const auto& t : triggers) {
      auto outcome = monitor::replan_episode(t, world, plans, mon, options);
      for (auto& ev : outcome.events) {
        if (ev.kind == "replan-triggered") {
          ++result.replan_count;
          ++replans[ev.subject];
        }
        batch.push_back(std::move(ev));
      }
    }
    std::stable_sort(batch.begin(), batch.end(),
                     [](const sim::Event& a, const sim::Event& b) { return a.subject < b.subject; });
    for (auto& ev : batch) result.events.push_back(std::move(ev));
  };

  auto apply_switches = [&](double until) {
    for (const auto& sw : config.deactivate) {
      if (sw.time <= until) world.beacons[world.beacon_index(sw.beacon)].active = false;
    }
  };

  apply_switches(0.0);
  record_tracks();
  handle(sim::settle(world));
  auto busy = [&] {
    const bool running = std::any_of(world.uuvs.begin(), world.uuvs.end(), [](const auto& u) {
      return u.status == sim::MissionStatus::running;
    });
    return running || !mon.open().empty();
  };
  while (busy() && world.ticks < config.step_cap) {
    // A switch scheduled for time t takes effect at the instant t itself.
    apply_switches(world.time + world.params.tick * (1.0 + 1e-9));
    handle(sim::step(world));
    record_tracks();
  }
  result.step_cap_hit = busy();
  result.ticks = world.ticks;
  result.sim_time = world.time;
  result.expectations = mon.history();
  for (const auto& e : mon.open()) result.expectations.push_back(e);
  for (std::size_t i = 0; i < world.uuvs.size(); ++i) {
    const auto& u = world.uuvs[i];
    result.vehicles.push_back(
        {u.id, u.status, replans[i], u.uncertainty, u.true_position, u.estimated_position});
  }
  return result;
}

std::string events_jsonl(const ScenarioResult& result) {
  std::string out;
  for (const auto& e : result.events) out += sim::event_to_json(e).dump() + "\n";
  return out;
}

json tracks_geojson(const ScenarioResult& result) {
  json features = json::array();
  for (const auto& t : result.tracks) {
    for (const bool estimated : {false, true}) {
      const auto& path = estimated ? t.estimated_path : t.true_path;
      json coords = json::array();
      for (const auto& p : path) coords.push_back(point_json(p));
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                          {"properties",
                           {{"uuv", t.id}, {"track", estimated ? "estimated" : "true"}}}});
    }
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

json summary_json(const ScenarioResult& result) {
  json vehicles = json::array();
  bool all = true;
  for (const auto& v : result.vehicles) {
    const bool ok = v.status == sim::MissionStatus::completed;
    all = all && ok;
    vehicles.push_back({{"id", v.id},
                        {"success", ok},
                        {"status", sim::to_string(v.status)},
                        {"replans", v.replans},
                        {"uncertainty", v.uncertainty},
                        {"true_position", point_json(v.true_position)},
                        {"estimated_position", point_json(v.estimated_position)}});
  }
  return {{"version", sim::kEventSchemaVersion},
          {"sim_time", result.sim_time},
          {"ticks", result.ticks},
          {"step_cap_hit", result.step_cap_hit},
          {"replan_count", result.replan_count},
          {"divergence_count", result.divergences.size()},
          {"all_success", all},
          {"uuvs", vehicles}};
}

}  // namespace uuvnav::scenario
