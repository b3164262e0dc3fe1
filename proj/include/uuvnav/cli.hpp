#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uuvnav/scenario.hpp"

namespace uuvnav::cli {

/// Process exit codes. Scripts depend on these values.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kUnreachable = 2,
  kUnsolvable = 3,
  kRuntimeFailure = 4,
};

/// Each command writes only fixed file names inside `output_dir` and
/// reports progress and errors on the given streams.
int cmd_deploy(const std::filesystem::path& config, const std::filesystem::path& output_dir,
               std::ostream& out, std::ostream& err);
int cmd_deploy(const scenario::ScenarioConfig& config, const std::filesystem::path& output_dir,
               std::ostream& out, std::ostream& err);

struct RouteRequest {
  std::optional<std::filesystem::path> config;   // supplies beacons and link distance
  std::optional<std::filesystem::path> beacons;  // overrides the config's
  std::string from;
  std::string to;
  std::optional<double> link_distance;
};
int cmd_route(const RouteRequest& request, const std::filesystem::path& output_dir,
              std::ostream& out, std::ostream& err);

int cmd_plan(const std::filesystem::path& domain, const std::filesystem::path& problem,
             std::size_t max_decompositions, const std::filesystem::path& output_dir,
             std::ostream& out, std::ostream& err);

/// Checks a plan.json against a domain and problem. Exit 3 when invalid.
int cmd_validate(const std::filesystem::path& domain, const std::filesystem::path& problem,
                 const std::filesystem::path& plan, std::ostream& out, std::ostream& err);

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& output_dir,
                 std::ostream& out, std::ostream& err);

/// Parses a full command line (args[0] is the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uuvnav::cli
