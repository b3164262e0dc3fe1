#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uuvnav/ground.hpp"

namespace uuvnav::htn {

using hddl::GroundCondition;
using hddl::GroundTables;
using hddl::GroundTask;
using hddl::State;

inline constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

/// Node of the decomposition tree. Primitive nodes carry the index of the
/// plan step they produced; abstract nodes carry the method applied.
struct PlanNode {
  GroundTask task;
  std::string method;  // empty for primitive nodes
  std::vector<std::string> method_args;
  std::vector<std::size_t> children;
  std::size_t step = kNoIndex;
  std::size_t parent = kNoIndex;

  bool primitive() const { return method.empty(); }
  friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

struct PlanStep {
  GroundTask action;
  std::size_t node = kNoIndex;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct PlanStats {
  std::size_t nodes_expanded = 0;
  std::size_t decompositions = 0;
  std::size_t backtracks = 0;
  double elapsed_seconds = 0.0;
};

struct Plan {
  std::vector<PlanStep> steps;
  std::vector<PlanNode> nodes;
  std::vector<std::size_t> roots;
  PlanStats stats;

  /// Action names in execution order.
  std::vector<std::string> action_names() const;
};

struct PlannerOptions {
  std::size_t max_decompositions = 10'000;
};

struct PlanResult {
  bool solved = false;
  Plan plan;           // on failure holds only statistics
  std::string reason;  // why no plan was found
};

/// Depth-first forward decomposition. Methods are tried in domain source
/// order; the bound counts method applications over the whole search.
PlanResult plan(const GroundTables& tables, const State& s0, const std::vector<GroundTask>& w0,
                const std::optional<GroundCondition>& goal = std::nullopt,
                const PlannerOptions& options = {});

struct Verdict {
  bool valid = true;
  std::size_t step = kNoIndex;  // offending step, when the violation has one
  std::string message;
};

/// Checks a plan without trusting the planner: re-executes the steps, then
/// re-derives the decomposition tree from w0 against the ground tables.
Verdict validate(const GroundTables& tables, const State& s0, const std::vector<GroundTask>& w0,
                 const Plan& plan, const std::optional<GroundCondition>& goal = std::nullopt);

/// Statistics other than wall time are serialized so output stays
/// byte-identical between runs.
nlohmann::json plan_to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& j);
std::string plan_to_text(const Plan& plan);

}  // namespace uuvnav::htn
