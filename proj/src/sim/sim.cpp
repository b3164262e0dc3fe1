#include "uuvnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uuvnav::sim {

using nlohmann::json;

ActionKind action_kind(const std::string& name) {
  if (name == "navigate-to-beacon") return ActionKind::navigate;
  if (name == "sense-beacon") return ActionKind::sense;
  if (name == "circle-localize") return ActionKind::circle;
  if (name == "broadcast") return ActionKind::broadcast;
  if (name == "transit-leg") return ActionKind::transit;
  if (name == "await-broadcast") return ActionKind::await;
  if (name == "join-broadcaster") return ActionKind::join;
  return ActionKind::instant;
}

std::string to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::navigate: return "navigate";
    case ActionKind::sense: return "sense";
    case ActionKind::circle: return "circle";
    case ActionKind::broadcast: return "broadcast";
    case ActionKind::transit: return "transit";
    case ActionKind::await: return "await";
    case ActionKind::join: return "join";
    case ActionKind::instant: return "instant";
  }
  return "instant";
}

std::string to_string(MissionStatus s) {
  switch (s) {
    case MissionStatus::idle: return "idle";
    case MissionStatus::running: return "running";
    case MissionStatus::completed: return "completed";
    case MissionStatus::failed: return "failed";
  }
  return "idle";
}

json event_to_json(const Event& e) {
  json j = e.payload;
  j["v"] = kEventSchemaVersion;
  j["t"] = e.time;
  j["kind"] = e.kind;
  j["subject"] = e.subject_id;
  return j;
}

std::size_t World::beacon_index(const std::string& id) const {
  for (std::size_t i = 0; i < beacons.size(); ++i) {
    if (beacons[i].id == id) return i;
  }
  return kNone;
}

std::size_t World::uuv_index(const std::string& id) const {
  for (std::size_t i = 0; i < uuvs.size(); ++i) {
    if (uuvs[i].id == id) return i;
  }
  return kNone;
}

bool is_pulse_instant(double time, double period) {
  const double r = std::fmod(time, period);
  const double eps = 1e-9 * std::max(1.0, period);
  return r <= eps || period - r <= eps;
}

bool sense_beacon(const World& world, const UUVState& uuv, const BeaconState& beacon) {
  return beacon.active && geo::distance(uuv.true_position, beacon.position) <= beacon.acoustic_range &&
         is_pulse_instant(world.time, beacon.pulse_period);
}

void assign_plan(UUVState& uuv, const std::vector<GroundTask>& steps) {
  uuv.queue.assign(steps.begin(), steps.end());
  uuv.current.reset();
  uuv.steps_done = 0;
  uuv.status = MissionStatus::running;
}

Point2D standoff_point(Point2D from, Point2D beacon, double standoff) {
  const double d = geo::distance(from, beacon);
  if (d <= standoff) return from;
  return beacon + (standoff / d) * (from - beacon);
}

double circle_duration(double standoff, double speed) {
  return 2.0 * std::numbers::pi * standoff / speed;
}

namespace {

json point_json(Point2D p) { return json::array({p.x, p.y}); }

json args_json(const GroundTask& t) { return t.args; }

enum class Progress { waiting, completed, failed };

bool moving(ActionKind k) {
  return k == ActionKind::navigate || k == ActionKind::transit || k == ActionKind::join;
}

class Instant {
 public:
  explicit Instant(World& w) : w_(w) {}

  std::vector<Event> run() {
    for (std::size_t i = 0; i < w_.uuvs.size(); ++i) process(i);
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.subject < b.subject; });
    return std::move(events_);
  }

 private:
  void emit(std::size_t subject, std::string kind, json payload) {
    events_.push_back({w_.time, std::move(kind), subject, w_.uuvs[subject].id, std::move(payload)});
  }

  // Reports a detection unless one for the same beacon was already reported
  // at this instant.
  void detect(std::size_t i, std::size_t b) {
    UUVState& u = w_.uuvs[i];
    auto it = u.last_detection.find(b);
    if (it != u.last_detection.end() && it->second == w_.ticks) return;
    u.last_detection[b] = w_.ticks;
    u.listening.erase(b);
    emit(i, "detection",
         {{"beacon", w_.beacons[b].id},
          {"distance", geo::distance(u.true_position, w_.beacons[b].position)}});
  }

  void listen(std::size_t i) {
    UUVState& u = w_.uuvs[i];
    std::set<std::size_t> candidates = u.listening;
    ActiveAction* a = u.current ? &*u.current : nullptr;
    const bool action_listens =
        a && (a->kind == ActionKind::navigate || a->kind == ActionKind::sense) && !a->detected &&
        a->beacon != kNone;
    if (action_listens) candidates.insert(a->beacon);
    for (std::size_t b : candidates) {
      if (!sense_beacon(w_, u, w_.beacons[b])) continue;
      detect(i, b);
      if (a && a->beacon == b) a->detected = true;
    }
  }

  void fail(std::size_t i, const std::string& reason) {
    UUVState& u = w_.uuvs[i];
    emit(i, "action-failed",
         {{"action", u.current->task.name}, {"args", args_json(u.current->task)}, {"reason", reason}});
    u.current.reset();
    u.queue.clear();
    u.status = MissionStatus::failed;
  }

  // Returns false when the action failed to start.
  bool start(std::size_t i) {
    UUVState& u = w_.uuvs[i];
    ActiveAction a;
    a.task = u.queue.front();
    u.queue.pop_front();
    a.kind = action_kind(a.task.name);
    a.start_time = w_.time;
    const auto& args = a.task.args;
    std::string problem;
    switch (a.kind) {
      case ActionKind::navigate:
      case ActionKind::sense:
      case ActionKind::circle:
      case ActionKind::transit:
        a.beacon = args.size() >= 2 ? w_.beacon_index(args[1]) : kNone;
        if (a.beacon == kNone) problem = "unknown beacon";
        break;
      case ActionKind::await:
      case ActionKind::join:
        a.peer = args.size() >= 2 ? w_.uuv_index(args[1]) : kNone;
        if (a.peer == kNone) problem = "unknown vehicle";
        break;
      default:
        break;
    }
    json payload = {{"action", a.task.name}, {"args", args_json(a.task)}, {"step", u.steps_done}};
    if (problem.empty()) {
      if (a.kind == ActionKind::navigate || a.kind == ActionKind::transit) {
        a.target = standoff_point(u.estimated_position, w_.beacons[a.beacon].position,
                                  w_.params.standoff);
      } else if (a.kind == ActionKind::join) {
        auto it = u.rally.find(w_.uuvs[a.peer].id);
        if (it == u.rally.end()) {
          problem = "no broadcast received from " + w_.uuvs[a.peer].id;
        } else {
          a.target = it->second;
        }
      } else if (a.kind == ActionKind::circle) {
        a.orbit_center = w_.beacons[a.beacon].position;
        a.orbit_radius = geo::distance(u.true_position, a.orbit_center);
        const Point2D rel = u.true_position - a.orbit_center;
        a.orbit_angle = a.orbit_radius > 0.0 ? std::atan2(rel.y, rel.x) : 0.0;
        if (u.speed > 0.0) {
          const double ticks = circle_duration(w_.params.standoff, u.speed) / w_.params.tick;
          a.orbit_ticks_needed = static_cast<std::uint64_t>(std::ceil(ticks - 1e-9));
        }
      }
      if (moving(a.kind)) {
        payload["target"] = point_json(a.target);
        payload["distance"] = geo::distance(u.estimated_position, a.target);
      }
    }
    emit(i, "action-started", std::move(payload));
    u.current = std::move(a);
    if (!problem.empty()) {
      fail(i, problem);
      return false;
    }
    return true;
  }

  void broadcast(std::size_t i) {
    UUVState& s = w_.uuvs[i];
    std::vector<hddl::GroundAtom> atoms;
    if (s.tables) {
      if (const auto* act = s.tables->find_action(s.current->task)) atoms = act->add;
    }
    json atom_text = json::array();
    for (const auto& a : atoms) atom_text.push_back(to_string(a));
    json receivers = json::array();
    std::vector<std::size_t> in_range;
    for (std::size_t j = 0; j < w_.uuvs.size(); ++j) {
      if (j == i) continue;
      if (geo::distance(s.true_position, w_.uuvs[j].true_position) <= w_.params.comm_range) {
        in_range.push_back(j);
        receivers.push_back(w_.uuvs[j].id);
      }
    }
    emit(i, "broadcast-sent",
         {{"position", point_json(s.estimated_position)}, {"atoms", atom_text},
          {"receivers", receivers}});
    for (std::size_t j : in_range) {
      UUVState& r = w_.uuvs[j];
      r.rally[s.id] = s.estimated_position;
      json merged = json::array();
      for (const auto& a : atoms) {
        const bool known = std::all_of(a.args.begin(), a.args.end(), [&](const std::string& o) {
          return r.known_objects.count(o) != 0;
        });
        if (!known) continue;
        r.belief.insert(a);
        merged.push_back(to_string(a));
      }
      emit(j, "broadcast-received",
           {{"from", s.id}, {"position", point_json(s.estimated_position)}, {"atoms", merged}});
    }
  }

  Progress progress(std::size_t i) {
    UUVState& u = w_.uuvs[i];
    ActiveAction& a = *u.current;
    switch (a.kind) {
      case ActionKind::navigate:
      case ActionKind::transit:
      case ActionKind::join:
        if (u.estimated_position == a.target) {
          emit(i, "waypoint-reached",
               {{"action", a.task.name}, {"position", point_json(u.estimated_position)}});
          return Progress::completed;
        }
        return Progress::waiting;
      case ActionKind::sense:
        if (!a.detected && sense_beacon(w_, u, w_.beacons[a.beacon])) {
          detect(i, a.beacon);
          a.detected = true;
        }
        return a.detected ? Progress::completed : Progress::waiting;
      case ActionKind::circle: {
        if (a.orbit_ticks_needed == 0) {
          fail(i, "cannot circle at zero speed");
          return Progress::failed;
        }
        const BeaconState& b = w_.beacons[a.beacon];
        if (is_pulse_instant(w_.time, b.pulse_period) && !sense_beacon(w_, u, b)) {
          fail(i, "beacon signal lost");
          return Progress::failed;
        }
        if (a.orbit_ticks < a.orbit_ticks_needed) return Progress::waiting;
        // The beacon's charted position plus the orbit geometry fixes the
        // vehicle's position.
        u.estimated_position = b.position + (u.true_position - b.position);
        u.uncertainty = w_.params.localization_floor;
        return Progress::completed;
      }
      case ActionKind::broadcast:
        broadcast(i);
        return Progress::completed;
      case ActionKind::await:
        return u.rally.count(w_.uuvs[a.peer].id) ? Progress::completed : Progress::waiting;
      case ActionKind::instant:
        return Progress::completed;
    }
    return Progress::waiting;
  }

  void complete(std::size_t i) {
    UUVState& u = w_.uuvs[i];
    const GroundTask task = u.current->task;
    if (u.tables) {
      if (const auto* act = u.tables->find_action(task)) act->apply(u.belief);
    }
    json payload = {{"action", task.name}, {"args", args_json(task)}};
    if (u.current->kind == ActionKind::circle) payload["uncertainty"] = u.uncertainty;
    emit(i, "action-completed", std::move(payload));
    u.current.reset();
    ++u.steps_done;
  }

  void process(std::size_t i) {
    listen(i);
    UUVState& u = w_.uuvs[i];
    if (u.status != MissionStatus::running) return;
    // Several instantaneous actions may finish within one instant.
    for (std::size_t guard = 0; guard < 1024; ++guard) {
      if (!u.current) {
        if (u.queue.empty()) {
          u.status = MissionStatus::completed;
          emit(i, "mission-completed", {{"steps", u.steps_done}});
          return;
        }
        if (!start(i)) return;
      }
      const Progress p = progress(i);
      if (p == Progress::failed) return;
      if (p == Progress::waiting) return;
      complete(i);
    }
  }

  World& w_;
  std::vector<Event> events_;
};

void move(World& w, UUVState& u) {
  const double dt = w.params.tick;
  const Point2D drift = dt * w.params.current;
  ActiveAction* a = (u.status == MissionStatus::running && u.current) ? &*u.current : nullptr;
  if (a && moving(a->kind)) {
    const Point2D to = a->target - u.estimated_position;
    const double remaining = std::hypot(to.x, to.y);
    if (remaining > 0.0) {
      const double d = std::min(u.speed * dt, remaining);
      const Point2D unit = (1.0 / remaining) * to;
      u.heading = std::atan2(unit.y, unit.x);
      u.estimated_position = d == remaining ? a->target : u.estimated_position + d * unit;
      u.true_position = u.true_position + d * unit + drift;
      u.uncertainty += w.params.drift_rate * d;
      return;
    }
  } else if (a && a->kind == ActionKind::circle && a->orbit_ticks_needed > 0) {
    // Closed-loop standoff: the orbit holds its radius against the current
    // and one revolution takes the nominal circle time. Ranging on the beacon
    // keeps the error from growing while circling.
    const double omega = 2.0 * std::numbers::pi / static_cast<double>(a->orbit_ticks_needed);
    a->orbit_angle += omega;
    const Point2D next = a->orbit_center + a->orbit_radius * Point2D{std::cos(a->orbit_angle),
                                                                     std::sin(a->orbit_angle)};
    const Point2D delta = next - u.true_position;
    u.heading = a->orbit_angle + std::numbers::pi / 2.0;
    u.true_position = next;
    u.estimated_position = u.estimated_position + delta;
    ++a->orbit_ticks;
    return;
  }
  u.true_position = u.true_position + drift;
}

}  // namespace

std::vector<Event> settle(World& world) { return Instant(world).run(); }

std::vector<Event> step(World& world) {
  for (auto& u : world.uuvs) move(world, u);
  ++world.ticks;
  world.time = static_cast<double>(world.ticks) * world.params.tick;
  return Instant(world).run();
}

}  // namespace uuvnav::sim
