#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uuvnav/ground.hpp"
#include "uuvnav/htn.hpp"
#include "uuvnav/sim.hpp"

namespace uuvnav::monitor {

inline constexpr double kDefaultMargin = 0.5;

struct Window {
  double earliest = 0.0;
  double latest = 0.0;
};

/// Detection window of a leg, in seconds after the leg starts:
/// [t(1 - m), t(1 + m) + pulse] with t = distance / speed and
/// m = margin * (1 + uncertainty / distance). Earliest is clamped at zero.
/// Throws std::invalid_argument for a nonzero distance at zero speed.
Window detection_window(double distance, double speed, double uncertainty, double pulse_period,
                        double margin = kDefaultMargin);

struct Expectation {
  std::size_t uuv = sim::kNone;
  std::string uuv_id;
  std::string kind = "detection";
  std::size_t beacon = sim::kNone;
  std::string beacon_id;
  std::size_t step = 0;  // plan step that created it
  double leg_start = 0.0;
  double earliest = 0.0;  // absolute times
  double latest = 0.0;
  bool met = false;
};

struct DivergenceRecord {
  Expectation expectation;
  double time = 0.0;
  std::string observed;  // what the vehicle believed when the window closed
};

/// One expectation per navigate-to-beacon step of `plan`, with times
/// relative to the start of the plan. Legs chain from the vehicle's
/// estimated position; uncertainty grows along the way and drops to the
/// localization floor after each circle.
std::vector<Expectation> derive_expectations(const htn::Plan& plan, const sim::UUVState& uuv,
                                             const sim::World& world,
                                             double margin = kDefaultMargin);

/// A record for every unmet expectation whose window closed before now.
std::vector<DivergenceRecord> check(const sim::World& world,
                                    const std::vector<Expectation>& expectations);

/// Tracks expectations of running legs against the event stream.
class Monitor {
 public:
  explicit Monitor(double margin = kDefaultMargin) : margin_(margin) {}

  /// Opens an expectation for every navigate-to-beacon start in `events`
  /// and closes those satisfied by a detection.
  void observe(sim::World& world, const std::vector<sim::Event>& events);

  /// Expired expectations become divergences and are closed.
  std::vector<DivergenceRecord> take_divergences(const sim::World& world);

  /// Drops the open expectations of a vehicle whose plan was replaced.
  void forget(sim::World& world, std::size_t uuv);

  const std::vector<Expectation>& open() const { return open_; }
  const std::vector<Expectation>& history() const { return history_; }

 private:
  double margin_;
  std::vector<Expectation> open_;
  std::vector<Expectation> history_;
};

/// The part of `plan` still to do when `steps_done` steps are complete and
/// step `steps_done` may be under way. Finished subtrees are skipped,
/// untouched ones are emitted as their task, and a compound task whose
/// primitive child was interrupted is emitted whole so it gets decomposed
/// again.
std::vector<hddl::GroundTask> remaining_network(const htn::Plan& plan, std::size_t steps_done,
                                                bool step_in_progress);

struct AgentPlan {
  htn::Plan plan;
  std::optional<hddl::GroundCondition> goal;
};

struct ReplanTrigger {
  std::size_t uuv = sim::kNone;
  std::size_t beacon = sim::kNone;
  std::string cause;  // "divergence" or "action-failed"
};

/// Replans the triggering vehicle and every vehicle within communication
/// range of it. Each one gets the beacon-unreachable fact, then is planned
/// from its belief over its remaining network. Returns the emitted events
/// and the indices of the vehicles that were replanned.
struct ReplanOutcome {
  std::vector<sim::Event> events;
  std::vector<std::size_t> replanned;
};
ReplanOutcome replan_episode(const ReplanTrigger& trigger, sim::World& world,
                             std::vector<AgentPlan>& plans, Monitor& monitor,
                             const htn::PlannerOptions& options = {});

}  // namespace uuvnav::monitor
