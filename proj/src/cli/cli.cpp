#include "uuvnav/cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uuvnav/deploy.hpp"
#include "uuvnav/geo.hpp"
#include "uuvnav/ground.hpp"
#include "uuvnav/hddl.hpp"
#include "uuvnav/htn.hpp"
#include "uuvnav/io.hpp"
#include "uuvnav/scenario.hpp"

namespace uuvnav::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Maps library exceptions onto exit codes. The most specific types come first.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const hddl::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const io::InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const geo::GeoError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const deploy::DeployError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const scenario::ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return kUnsolvable;
  } catch (const hddl::GroundingError& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

template <typename T, typename F>
T in_file(const fs::path& file, F&& f) {
  try {
    return f();
  } catch (const hddl::ParseError& e) {
    throw io::InputError(file.string() + ":" + e.what());
  }
}

hddl::Domain load_domain(const fs::path& file) {
  const std::string text = io::read_text_file(file);
  return in_file<hddl::Domain>(file, [&] { return hddl::parse_domain(text); });
}

hddl::Problem load_problem(const fs::path& file, const hddl::Domain& domain) {
  const std::string text = io::read_text_file(file);
  return in_file<hddl::Problem>(file, [&] { return hddl::parse_problem(text, domain); });
}

json verdict_json(const htn::Verdict& v) {
  json j = {{"valid", v.valid}, {"message", v.message}};
  if (v.step != htn::kNoIndex) j["step"] = v.step;
  return j;
}

}  // namespace

int cmd_deploy(const scenario::ScenarioConfig& config, const fs::path& output_dir,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto problem = scenario::deployment_problem(config);
    auto result = deploy::lloyd_deploy(problem);
    result.depth_kinds.assign(result.beacon_positions.size(), config.deployment.depth);
    const auto beacons = io::name_beacons(result, config.deployment.first_id);

    json volumes = json::array();
    for (const auto& b : beacons) volumes.push_back({{"id", b.id}, {"volume", b.volume}});
    const json report = {{"n_beacons", beacons.size()},
                         {"seed", config.seed},
                         {"total_volume", result.total_volume},
                         {"target_volume", result.total_volume / static_cast<double>(beacons.size())},
                         {"volumes", volumes},
                         {"objective", result.objective},
                         {"iterations", result.iterations_used},
                         {"converged", result.converged}};
    io::write_text_file(output_dir / "beacons.geojson", io::dump_json(io::beacons_to_geojson(beacons)));
    io::write_text_file(output_dir / "deploy-report.json", io::dump_json(report));
    out << "deployed " << beacons.size() << " beacons in " << result.iterations_used
        << " iterations (" << (result.converged ? "converged" : "not converged") << ")\n";
    return kOk;
  });
}

int cmd_deploy(const fs::path& config_file, const fs::path& output_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    return cmd_deploy(scenario::load_config(config_file), output_dir, out, err);
  });
}

int cmd_route(const RouteRequest& req, const fs::path& output_dir, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    std::vector<io::BeaconRecord> beacons;
    double link = deploy::kDefaultLinkDistance;
    if (req.config) {
      const auto config = scenario::load_config(*req.config);
      link = config.deployment.link_distance;
      if (!req.beacons) beacons = scenario::scenario_beacons(config);
    }
    if (req.beacons) beacons = io::beacons_from_geojson(io::read_json_file(*req.beacons));
    if (!req.config && !req.beacons) throw io::InputError("route needs --beacons or --config");
    if (req.link_distance) link = *req.link_distance;

    auto index_of = [&](const std::string& id) {
      const auto it = std::find_if(beacons.begin(), beacons.end(),
                                   [&](const io::BeaconRecord& b) { return b.id == id; });
      if (it == beacons.end()) throw io::InputError("unknown beacon id '" + id + "'");
      return static_cast<std::size_t>(it - beacons.begin());
    };
    const std::size_t from = index_of(req.from);
    const std::size_t to = index_of(req.to);
    std::vector<geo::Point2D> positions;
    for (const auto& b : beacons) positions.push_back(b.position);
    const auto graph = deploy::build_beacon_graph(positions, link);
    const auto route = deploy::astar_route(graph, from, to);

    json ids = json::array();
    for (std::size_t n : route.nodes) ids.push_back(beacons[n].id);
    const json doc = {{"from", req.from},
                      {"to", req.to},
                      {"link_distance", link},
                      {"reachable", route.reachable()},
                      {"route", ids},
                      {"length", route.length}};
    io::write_text_file(output_dir / "route.json", io::dump_json(doc));
    if (!route.reachable()) {
      err << "no route from " << req.from << " to " << req.to << "\n";
      return kUnreachable;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? " -> " : "") << ids[i].get<std::string>();
    out << " (" << route.length << " m)\n";
    return kOk;
  });
}

int cmd_plan(const fs::path& domain_file, const fs::path& problem_file,
             std::size_t max_decompositions, const fs::path& output_dir, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    const auto domain = load_domain(domain_file);
    const auto problem = load_problem(problem_file, domain);
    const auto tables = hddl::ground(domain, problem);
    const auto s0 = hddl::initial_state(problem);
    const auto w0 = hddl::initial_network(problem);
    const auto goal = hddl::ground_goal(problem);
    const auto result = htn::plan(tables, s0, w0, goal, {max_decompositions});

    json doc = {{"domain", domain.name}, {"problem", problem.name}, {"solved", result.solved}};
    if (!result.solved) {
      doc["reason"] = result.reason;
      io::write_text_file(output_dir / "plan.json", io::dump_json(doc));
      err << "unsolvable: " << result.reason << "\n";
      return kUnsolvable;
    }
    const auto verdict = htn::validate(tables, s0, w0, result.plan, goal);
    doc.update(htn::plan_to_json(result.plan));
    doc["verdict"] = verdict_json(verdict);
    io::write_text_file(output_dir / "plan.json", io::dump_json(doc));
    out << htn::plan_to_text(result.plan);
    out << (verdict.valid ? "valid" : "INVALID: " + verdict.message) << "\n";
    return verdict.valid ? kOk : kRuntimeFailure;
  });
}

int cmd_validate(const fs::path& domain_file, const fs::path& problem_file,
                 const fs::path& plan_file, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto domain = load_domain(domain_file);
    const auto problem = load_problem(problem_file, domain);
    const json doc = io::read_json_file(plan_file);
    htn::Plan plan;
    try {
      plan = htn::plan_from_json(doc);
    } catch (const std::exception& e) {
      throw io::InputError(plan_file.string() + ": not a plan: " + e.what());
    }
    const auto tables = hddl::ground(domain, problem);
    const auto verdict = htn::validate(tables, hddl::initial_state(problem),
                                       hddl::initial_network(problem), plan,
                                       hddl::ground_goal(problem));
    out << verdict_json(verdict).dump() << "\n";
    return verdict.valid ? kOk : kUnsolvable;
  });
}

int cmd_simulate(const fs::path& config_file, const fs::path& output_dir, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const auto config = scenario::load_config(config_file);
    const auto beacons = scenario::scenario_beacons(config);
    const auto result = scenario::run_scenario(config, beacons);
    io::write_text_file(output_dir / "events.jsonl", scenario::events_jsonl(result));
    io::write_text_file(output_dir / "tracks.geojson", io::dump_json(scenario::tracks_geojson(result)));
    io::write_text_file(output_dir / "summary.json", io::dump_json(scenario::summary_json(result)));
    out << "simulated " << result.sim_time << " s, " << result.events.size() << " events, "
        << result.replan_count << " replans\n";
    if (result.step_cap_hit) {
      err << "step cap of " << config.step_cap << " ticks reached with missions still running\n";
      return kRuntimeFailure;
    }
    return kOk;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beacon deployment, HTN mission planning and fleet simulation"};
  app.require_subcommand(1);

  fs::path config, output, domain, problem, plan_file, beacons;
  std::string uuv, from, to;
  std::size_t n_beacons = 0;
  double link = 0.0;
  std::size_t max_decompositions = 10000;

  auto* deploy_cmd = app.add_subcommand("deploy", "Place beacons over the bathymetry");
  deploy_cmd->add_option("-c,--config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
  deploy_cmd->add_option("-o,--output", output, "Output directory");
  deploy_cmd->add_option("-n,--n-beacons", n_beacons, "Override the beacon count")
      ->check(CLI::Validator(
          [](std::string& v) -> std::string {
            return v.find_first_not_of("0123456789") == std::string::npos &&
                           v.find_first_not_of('0') != std::string::npos
                       ? ""
                       : "the beacon count must be a positive integer";
          },
          "N>=1"));

  auto* route_cmd = app.add_subcommand("route", "Shortest beacon-to-beacon route");
  route_cmd->add_option("-c,--config", config, "Scenario YAML")->check(CLI::ExistingFile);
  route_cmd->add_option("-b,--beacons", beacons, "Beacon GeoJSON")->check(CLI::ExistingFile);
  route_cmd->add_option("--from", from, "Start beacon id")->required();
  route_cmd->add_option("--to", to, "Goal beacon id")->required();
  route_cmd->add_option("--link-distance", link, "Longest usable leg, meters")
      ->check(CLI::PositiveNumber);
  route_cmd->add_option("-o,--output", output, "Output directory");

  auto* plan_cmd = app.add_subcommand("plan", "Plan one vehicle's mission");
  auto* validate_cmd = app.add_subcommand("validate", "Check a plan against its problem");
  for (auto* cmd : {plan_cmd, validate_cmd}) {
    cmd->add_option("-c,--config", config, "Scenario YAML")->check(CLI::ExistingFile);
    cmd->add_option("--uuv", uuv, "Vehicle whose problem to use from the config");
    cmd->add_option("-d,--domain", domain, "HDDL domain")->check(CLI::ExistingFile);
    cmd->add_option("-p,--problem", problem, "HDDL problem")->check(CLI::ExistingFile);
  }
  plan_cmd->add_option("--max-decompositions", max_decompositions, "Search bound")
      ->check(CLI::PositiveNumber);
  plan_cmd->add_option("-o,--output", output, "Output directory");
  validate_cmd->add_option("--plan", plan_file, "plan.json to check")
      ->required()
      ->check(CLI::ExistingFile);

  auto* sim_cmd = app.add_subcommand("simulate", "Run the closed-loop fleet scenario");
  sim_cmd->add_option("-c,--config", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("-o,--output", output, "Output directory");

  std::vector<std::string> argv(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  std::optional<scenario::ScenarioConfig> loaded;
  auto load = [&]() -> const scenario::ScenarioConfig& {
    if (!loaded) loaded = scenario::load_config(config);
    return *loaded;
  };
  auto output_dir = [&]() -> fs::path {
    if (!output.empty()) return output;
    if (!config.empty() && load().output) return *load().output;
    throw io::InputError("no output directory: pass --output or set 'output' in the config");
  };

  return guarded(err, [&]() -> int {
    if (*deploy_cmd) {
      auto c = load();
      if (n_beacons != 0) c.deployment.n_beacons = n_beacons;
      return cmd_deploy(c, output_dir(), out, err);
    }
    if (*route_cmd) {
      RouteRequest req;
      if (!config.empty()) req.config = config;
      if (!beacons.empty()) req.beacons = beacons;
      req.from = from;
      req.to = to;
      if (link > 0.0) req.link_distance = link;
      return cmd_route(req, output_dir(), out, err);
    }
    if (*plan_cmd || *validate_cmd) {
      if (!config.empty()) {
        const auto& c = load();
        if (domain.empty() && c.domain) domain = *c.domain;
        if (problem.empty()) {
          if (uuv.empty()) throw io::InputError("--uuv is needed to pick a problem from the config");
          const auto it = std::find_if(c.uuvs.begin(), c.uuvs.end(),
                                       [&](const scenario::UuvSpec& s) { return s.id == uuv; });
          if (it == c.uuvs.end()) throw io::InputError("no uuv '" + uuv + "' in " + config.string());
          problem = it->problem;
        }
        if (plan_cmd->count("--max-decompositions") == 0) max_decompositions = c.max_decompositions;
      }
      if (domain.empty() || problem.empty()) {
        throw io::InputError("a domain and a problem are required (--domain/--problem or --config)");
      }
      if (*plan_cmd) return cmd_plan(domain, problem, max_decompositions, output_dir(), out, err);
      return cmd_validate(domain, problem, plan_file, out, err);
    }
    return cmd_simulate(config, output_dir(), out, err);
  });
}

}  // namespace uuvnav::cli
