#include "uuvnav/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace uuvnav::monitor {

using nlohmann::json;

Window detection_window(double distance, double speed, double uncertainty, double pulse_period,
                        double margin) {
  if (distance <= 0.0) return {0.0, pulse_period};
  if (!(speed > 0.0)) {
    throw std::invalid_argument("inexecutable leg: " + std::to_string(distance) +
                                " m to cover at zero speed");
  }
  const double t = distance / speed;
  const double m = margin * (1.0 + uncertainty / distance);
  return {std::max(0.0, t * (1.0 - m)), t * (1.0 + m) + pulse_period};
}

std::vector<Expectation> derive_expectations(const htn::Plan& plan, const sim::UUVState& uuv,
                                             const sim::World& world, double margin) {
  std::vector<Expectation> out;
  geo::Point2D pos = uuv.estimated_position;
  double sigma = uuv.uncertainty;
  double t = 0.0;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& task = plan.steps[i].action;
    const sim::ActionKind kind = sim::action_kind(task.name);
    const std::size_t b =
        task.args.size() >= 2 ? world.beacon_index(task.args[1]) : sim::kNone;
    if ((kind == sim::ActionKind::navigate || kind == sim::ActionKind::transit) &&
        b != sim::kNone) {
      const auto& beacon = world.beacons[b];
      const geo::Point2D target = sim::standoff_point(pos, beacon.position, world.params.standoff);
      const double d = geo::distance(pos, target);
      if (kind == sim::ActionKind::navigate) {
        const Window w = detection_window(d, uuv.speed, sigma, beacon.pulse_period, margin);
        Expectation e;
        e.uuv = world.uuv_index(uuv.id);
        e.uuv_id = uuv.id;
        e.beacon = b;
        e.beacon_id = beacon.id;
        e.step = i;
        e.leg_start = t;
        e.earliest = t + w.earliest;
        e.latest = t + w.latest;
        out.push_back(std::move(e));
      }
      if (d > 0.0) t += d / uuv.speed;
      sigma += world.params.drift_rate * d;
      pos = target;
    } else if (kind == sim::ActionKind::circle && uuv.speed > 0.0) {
      t += sim::circle_duration(world.params.standoff, uuv.speed);
      sigma = world.params.localization_floor;
    }
  }
  return out;
}

std::vector<DivergenceRecord> check(const sim::World& world,
                                    const std::vector<Expectation>& expectations) {
  std::vector<DivergenceRecord> out;
  for (const auto& e : expectations) {
    if (e.met || world.time <= e.latest) continue;
    DivergenceRecord r;
    r.expectation = e;
    r.time = world.time;
    if (e.uuv < world.uuvs.size()) {
      const auto& u = world.uuvs[e.uuv];
      std::ostringstream s;
      s << "no detection of " << e.beacon_id << "; estimated position (" << u.estimated_position.x
        << ", " << u.estimated_position.y << "), uncertainty " << u.uncertainty << " m";
      r.observed = s.str();
    }
    out.push_back(std::move(r));
  }
  return out;
}

void Monitor::observe(sim::World& world, const std::vector<sim::Event>& events) {
  for (const auto& ev : events) {
    if (ev.kind != "action-started" || ev.payload.value("action", "") != "navigate-to-beacon") {
      continue;
    }
    const auto& args = ev.payload.at("args");
    if (args.size() < 2) continue;
    const std::size_t b = world.beacon_index(args[1].get<std::string>());
    if (b == sim::kNone) continue;
    const auto& u = world.uuvs[ev.subject];
    const double d = ev.payload.value("distance", 0.0);
    const Window w =
        detection_window(d, u.speed, u.uncertainty, world.beacons[b].pulse_period, margin_);
    Expectation e;
    e.uuv = ev.subject;
    e.uuv_id = u.id;
    e.beacon = b;
    e.beacon_id = world.beacons[b].id;
    e.step = ev.payload.value("step", std::size_t{0});
    e.leg_start = ev.time;
    e.earliest = ev.time + w.earliest;
    e.latest = ev.time + w.latest;
    open_.push_back(std::move(e));
  }
  // Any detection since the leg started satisfies it, early ones included:
  // the vehicle heard the beacon it was heading for.
  for (const auto& ev : events) {
    if (ev.kind != "detection") continue;
    const std::string beacon = ev.payload.value("beacon", "");
    for (auto& e : open_) {
      if (!e.met && e.uuv == ev.subject && e.beacon_id == beacon && ev.time >= e.leg_start &&
          ev.time <= e.latest) {
        e.met = true;
      }
    }
  }
  for (auto it = open_.begin(); it != open_.end();) {
    if (it->met) {
      history_.push_back(*it);
      it = open_.erase(it);
    } else {
      world.uuvs[it->uuv].listening.insert(it->beacon);
      ++it;
    }
  }
}

std::vector<DivergenceRecord> Monitor::take_divergences(const sim::World& world) {
  auto records = check(world, open_);
  for (const auto& r : records) {
    auto it = std::find_if(open_.begin(), open_.end(), [&](const Expectation& e) {
      return e.uuv == r.expectation.uuv && e.beacon == r.expectation.beacon &&
             e.leg_start == r.expectation.leg_start;
    });
    if (it != open_.end()) {
      history_.push_back(*it);
      open_.erase(it);
    }
  }
  return records;
}

void Monitor::forget(sim::World& world, std::size_t uuv) {
  std::erase_if(open_, [&](const Expectation& e) { return e.uuv == uuv; });
  world.uuvs[uuv].listening.clear();
}

namespace {

struct Span {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

class Remaining {
 public:
  Remaining(const htn::Plan& p, std::size_t done, bool in_progress)
      : plan_(p), done_(done), started_(done + (in_progress ? 1 : 0)), in_progress_(in_progress) {
    spans_.resize(p.nodes.size());
    std::size_t counter = 0;
    for (std::size_t r : p.roots) measure(r, counter);
  }

  std::vector<hddl::GroundTask> run() {
    for (std::size_t r : plan_.roots) walk(r);
    return std::move(out_);
  }

 private:
  void measure(std::size_t n, std::size_t& counter) {
    spans_[n].lo = counter;
    if (plan_.nodes[n].primitive()) {
      ++counter;
    } else {
      for (std::size_t c : plan_.nodes[n].children) measure(c, counter);
    }
    spans_[n].hi = counter;
  }

  bool interrupted(std::size_t n) const {
    return in_progress_ && plan_.nodes[n].primitive() && spans_[n].lo == done_;
  }

  void walk(std::size_t n) {
    const Span s = spans_[n];
    const auto& node = plan_.nodes[n];
    if (s.lo == s.hi) {
      if (s.lo >= started_) out_.push_back(node.task);
      return;
    }
    if (s.hi <= done_) return;
    if (s.lo >= started_) {
      out_.push_back(node.task);
      return;
    }
    if (node.primitive()) {
      out_.push_back(node.task);
      return;
    }
    const bool redo = std::any_of(node.children.begin(), node.children.end(),
                                  [&](std::size_t c) { return interrupted(c); });
    if (redo) {
      out_.push_back(node.task);
      return;
    }
    for (std::size_t c : node.children) walk(c);
  }

  const htn::Plan& plan_;
  std::size_t done_;
  std::size_t started_;
  bool in_progress_;
  std::vector<Span> spans_;
  std::vector<hddl::GroundTask> out_;
};

json tasks_json(const std::vector<hddl::GroundTask>& tasks) {
  json out = json::array();
  for (const auto& t : tasks) out.push_back(to_string(t));
  return out;
}

}  // namespace

std::vector<hddl::GroundTask> remaining_network(const htn::Plan& plan, std::size_t steps_done,
                                                bool step_in_progress) {
  return Remaining(plan, steps_done, step_in_progress).run();
}

ReplanOutcome replan_episode(const ReplanTrigger& trigger, sim::World& world,
                             std::vector<AgentPlan>& plans, Monitor& monitor,
                             const htn::PlannerOptions& options) {
  ReplanOutcome result;
  const auto& origin = world.uuvs.at(trigger.uuv);
  std::vector<std::size_t> affected;
  for (std::size_t j = 0; j < world.uuvs.size(); ++j) {
    if (j == trigger.uuv ||
        geo::distance(origin.true_position, world.uuvs[j].true_position) <=
            world.params.comm_range) {
      affected.push_back(j);
    }
  }
  const std::string beacon_id =
      trigger.beacon < world.beacons.size() ? world.beacons[trigger.beacon].id : "";
  auto emit = [&](std::size_t j, std::string kind, json payload) {
    result.events.push_back({world.time, std::move(kind), j, world.uuvs[j].id, std::move(payload)});
  };

  for (std::size_t j : affected) {
    sim::UUVState& u = world.uuvs[j];
    const bool interrupted = u.current.has_value() || u.status == sim::MissionStatus::failed;
    const auto remaining = remaining_network(plans[j].plan, u.steps_done, interrupted);
    if (remaining.empty()) {
      emit(j, "warning",
           {{"message", "replanning skipped: no remaining tasks"},
            {"trigger", origin.id},
            {"beacon", beacon_id}});
      continue;
    }
    if (!beacon_id.empty() && u.known_objects.count(u.id) && u.known_objects.count(beacon_id)) {
      u.belief.insert({"beacon-unreachable", {u.id, beacon_id}});
    }
    const auto planned = htn::plan(*u.tables, u.belief, remaining, plans[j].goal, options);
    json payload = {{"trigger", origin.id},
                    {"beacon", beacon_id},
                    {"cause", trigger.cause},
                    {"network", tasks_json(remaining)},
                    {"solved", planned.solved}};
    monitor.forget(world, j);
    result.replanned.push_back(j);
    if (planned.solved) {
      const auto verdict =
          htn::validate(*u.tables, u.belief, remaining, planned.plan, plans[j].goal);
      std::vector<hddl::GroundTask> steps;
      for (const auto& s : planned.plan.steps) steps.push_back(s.action);
      payload["steps"] = tasks_json(steps);
      payload["valid"] = verdict.valid;
      plans[j].plan = planned.plan;
      sim::assign_plan(u, steps);
      emit(j, "replan-triggered", std::move(payload));
    } else {
      emit(j, "replan-triggered", std::move(payload));
      u.queue.clear();
      u.current.reset();
      u.status = sim::MissionStatus::failed;
      emit(j, "mission-failed", {{"reason", planned.reason}});
    }
  }
  return result;
}

}  // namespace uuvnav::monitor
