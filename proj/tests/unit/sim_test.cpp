#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uuvnav/sim.hpp"

using namespace uuvnav;
using namespace uuvnav::sim;

namespace {

BeaconState beacon(std::string id, Point2D at) {
  BeaconState b;
  b.id = std::move(id);
  b.position = at;
  return b;
}

UUVState vehicle(std::string id, Point2D at, double speed) {
  UUVState u;
  u.id = std::move(id);
  u.true_position = u.estimated_position = at;
  u.speed = speed;
  return u;
}

GroundTask task(std::string name, std::vector<std::string> args) {
  return {std::move(name), std::move(args)};
}

std::vector<Event> of_kind(const std::vector<Event>& events, const std::string& kind) {
  std::vector<Event> out;
  for (const auto& e : events) {
    if (e.kind == kind) out.push_back(e);
  }
  return out;
}

std::vector<Event> run_until_idle(World& w, std::uint64_t cap = 100000) {
  auto events = settle(w);
  auto busy = [&] {
    for (const auto& u : w.uuvs) {
      if (u.status == MissionStatus::running) return true;
    }
    return false;
  };
  while (busy() && w.ticks < cap) {
    auto more = step(w);
    events.insert(events.end(), more.begin(), more.end());
  }
  return events;
}

}  // namespace

TEST(Kinematics, IdleVehicleWithoutCurrentStaysPut) {
  World w;
  w.uuvs.push_back(vehicle("u", {3, 4}, 0.0));
  EXPECT_TRUE(settle(w).empty());
  EXPECT_TRUE(step(w).empty());
  EXPECT_EQ(w.uuvs[0].true_position, (Point2D{3, 4}));
  EXPECT_EQ(w.uuvs[0].estimated_position, (Point2D{3, 4}));
  EXPECT_EQ(w.time, 1.0);
}

TEST(Kinematics, OneTickEastWithoutCurrent) {
  World w;
  w.beacons.push_back(beacon("b", {1000, 0}));
  w.uuvs.push_back(vehicle("u", {0, 0}, 1.0));
  assign_plan(w.uuvs[0], {task("transit-leg", {"u", "b"})});
  settle(w);
  step(w);
  EXPECT_EQ(w.uuvs[0].true_position, (Point2D{1, 0}));
  EXPECT_EQ(w.uuvs[0].estimated_position, (Point2D{1, 0}));
  EXPECT_DOUBLE_EQ(w.uuvs[0].uncertainty, 0.02);
}

TEST(Kinematics, CurrentMovesTruthButNotEstimate) {
  World w;
  w.params.current = {0.0, 0.5};
  w.beacons.push_back(beacon("b", {1000, 0}));
  w.uuvs.push_back(vehicle("u", {0, 0}, 1.0));
  assign_plan(w.uuvs[0], {task("transit-leg", {"u", "b"})});
  settle(w);
  step(w);
  EXPECT_EQ(w.uuvs[0].true_position, (Point2D{1, 0.5}));
  EXPECT_EQ(w.uuvs[0].estimated_position, (Point2D{1, 0}));
  EXPECT_DOUBLE_EQ(w.uuvs[0].uncertainty, w.params.drift_rate * 1.0);
}

TEST(Kinematics, TrueDisplacementIsWaterVelocityPlusCurrent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-5000, 5000), spd(0.1, 4.0), cur(-1.0, 1.0),
      tick(0.1, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    World w;
    w.params.tick = tick(rng);
    w.params.current = {cur(rng), cur(rng)};
    const Point2D target{coord(rng), coord(rng)};
    w.beacons.push_back(beacon("b", target));
    const Point2D start{coord(rng), coord(rng)};
    const double speed = spd(rng);
    w.uuvs.push_back(vehicle("u", start, speed));
    assign_plan(w.uuvs[0], {task("transit-leg", {"u", "b"})});
    settle(w);
    const double dx = target.x - start.x, dy = target.y - start.y;
    const double len = std::sqrt(dx * dx + dy * dy);
    if (len < speed * w.params.tick + 2 * w.params.standoff) continue;  // would arrive
    step(w);
    const Point2D moved = w.uuvs[0].true_position - start;
    const double ex = speed * w.params.tick * dx / len + w.params.current.x * w.params.tick;
    const double ey = speed * w.params.tick * dy / len + w.params.current.y * w.params.tick;
    EXPECT_NEAR(moved.x, ex, 1e-9) << trial;
    EXPECT_NEAR(moved.y, ey, 1e-9) << trial;
  }
}

TEST(Kinematics, ArrivesExactlyAtStandoffPoint) {
  World w;
  w.params.standoff = 50;
  w.beacons.push_back(beacon("b", {0, 1000}));
  w.uuvs.push_back(vehicle("u", {0, 0}, 3.0));
  assign_plan(w.uuvs[0], {task("transit-leg", {"u", "b"})});
  const auto events = run_until_idle(w);
  EXPECT_EQ(w.uuvs[0].estimated_position, (Point2D{0, 950}));
  EXPECT_EQ(w.ticks, 317u);  // 950 m at 3 m/s, last tick partial
  ASSERT_EQ(of_kind(events, "waypoint-reached").size(), 1u);
  EXPECT_EQ(of_kind(events, "mission-completed").size(), 1u);
}

TEST(StandoffPoint, Examples) {
  EXPECT_EQ(standoff_point({0, 0}, {100, 0}, 50), (Point2D{50, 0}));
  EXPECT_EQ(standoff_point({30, 0}, {0, 0}, 50), (Point2D{30, 0}));  // already inside
  EXPECT_NEAR(circle_duration(50, 2), 157.07963267948966, 1e-12);
}

TEST(SenseBeacon, RangeAndPulseExamples) {
  World w;
  w.beacons.push_back(beacon("b", {0, 0}));
  UUVState u = vehicle("u", {1999, 0}, 1.0);
  EXPECT_TRUE(sense_beacon(w, u, w.beacons[0]));
  u.true_position = {2001, 0};
  EXPECT_FALSE(sense_beacon(w, u, w.beacons[0]));
  u.true_position = {2000, 0};
  EXPECT_TRUE(sense_beacon(w, u, w.beacons[0]));
  u.true_position = {10, 0};
  w.beacons[0].active = false;
  EXPECT_FALSE(sense_beacon(w, u, w.beacons[0]));
  w.beacons[0].active = true;
  w.time = 5.0;
  EXPECT_FALSE(sense_beacon(w, u, w.beacons[0]));
  w.time = 20.0;
  EXPECT_TRUE(sense_beacon(w, u, w.beacons[0]));
}

TEST(SenseBeacon, DetectionUsesTruePositionNotEstimate) {
  World w;
  w.beacons.push_back(beacon("b", {0, 0}));
  UUVState u = vehicle("u", {2500, 0}, 1.0);
  u.estimated_position = {100, 0};
  EXPECT_FALSE(sense_beacon(w, u, w.beacons[0]));
}

// Recomputes the detection rule with integer time arithmetic.
TEST(SenseBeacon, MatchesDirectRecomputation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-3000, 3000);
  std::uniform_int_distribution<int> ticks(0, 500), period(1, 30), range(100, 3000), coin(0, 3);
  for (int trial = 0; trial < 5000; ++trial) {
    World w;
    const int t = ticks(rng);
    w.ticks = static_cast<std::uint64_t>(t);
    w.time = t * w.params.tick;
    BeaconState b = beacon("b", {coord(rng), coord(rng)});
    b.pulse_period = period(rng);
    b.acoustic_range = range(rng);
    b.active = coin(rng) != 0;
    const UUVState u = vehicle("u", {coord(rng), coord(rng)}, 1.0);
    const double dx = u.true_position.x - b.position.x, dy = u.true_position.y - b.position.y;
    const bool expected = b.active && dx * dx + dy * dy <= b.acoustic_range * b.acoustic_range &&
                          t % static_cast<int>(b.pulse_period) == 0;
    EXPECT_EQ(sense_beacon(w, u, b), expected) << trial;
  }
}

TEST(PulseInstant, SurvivesAccumulatedTickError) {
  for (std::uint64_t k = 0; k <= 1000; ++k) {
    const double t = static_cast<double>(k) * 0.1;
    EXPECT_EQ(is_pulse_instant(t, 10.0), k % 100 == 0) << k;
  }
}

TEST(Navigate, DetectsTargetBeaconOnEnteringRangeAtPulse) {
  World w;
  w.beacons.push_back(beacon("b", {3000, 0}));
  w.uuvs.push_back(vehicle("u", {0, 0}, 2.0));
  assign_plan(w.uuvs[0], {task("navigate-to-beacon", {"u", "b"})});
  const auto events = run_until_idle(w);
  const auto det = of_kind(events, "detection");
  ASSERT_FALSE(det.empty());
  // In range from x = 1000, reached at t = 500, a pulse instant.
  EXPECT_EQ(det[0].time, 500.0);
  EXPECT_EQ(det[0].payload["beacon"], "b");
}

TEST(Navigate, FastVehicleCanCrossRangeDiskBetweenPulses) {
  World w;
  BeaconState b = beacon("b", {0, 100});
  b.acoustic_range = 150;
  w.beacons.push_back(b);
  w.beacons.push_back(beacon("far", {1000, 0}));
  // Listening to b while driving past it; it is in range for x in [-111, 111].
  w.uuvs.push_back(vehicle("u", {-115, 0}, 25.0));
  w.uuvs[0].listening.insert(0);
  assign_plan(w.uuvs[0], {task("transit-leg", {"u", "far"})});
  const auto events = run_until_idle(w);
  EXPECT_TRUE(of_kind(events, "detection").empty());
}

TEST(Circle, ResetsUncertaintyToFloor) {
  World w;
  w.beacons.push_back(beacon("b", {0, 0}));
  w.uuvs.push_back(vehicle("u", {50, 0}, 2.0));
  w.uuvs[0].uncertainty = 500;
  assign_plan(w.uuvs[0], {task("circle-localize", {"u", "b"})});
  const auto events = run_until_idle(w);
  const auto done = of_kind(events, "action-completed");
  ASSERT_EQ(done.size(), 1u);
  EXPECT_EQ(w.uuvs[0].uncertainty, 5.0);
  EXPECT_EQ(done[0].payload["uncertainty"], 5.0);
  EXPECT_EQ(done[0].time, std::ceil(circle_duration(50, 2.0)));
  // One full revolution brings the vehicle back to where it started.
  EXPECT_NEAR(w.uuvs[0].true_position.x, 50, 1e-6);
  EXPECT_NEAR(w.uuvs[0].true_position.y, 0, 1e-6);
  EXPECT_EQ(w.uuvs[0].estimated_position, w.uuvs[0].true_position);
}

TEST(Circle, CurrentDoesNotChangeCompletionTimeOrReset) {
  World calm, drift;
  drift.params.current = {0.3, -0.4};
  for (World* w : {&calm, &drift}) {
    w->beacons.push_back(beacon("b", {0, 0}));
    w->uuvs.push_back(vehicle("u", {0, 50}, 2.0));
    w->uuvs[0].uncertainty = 80;
    assign_plan(w->uuvs[0], {task("circle-localize", {"u", "b"})});
  }
  const auto a = run_until_idle(calm);
  const auto b = run_until_idle(drift);
  EXPECT_EQ(of_kind(a, "action-completed")[0].time, of_kind(b, "action-completed")[0].time);
  EXPECT_EQ(drift.uuvs[0].uncertainty, 5.0);
}

TEST(Circle, BeaconLostMidCircleFailsAndKeepsUncertainty) {
  World w;
  w.beacons.push_back(beacon("b", {0, 0}));
  w.uuvs.push_back(vehicle("u", {50, 0}, 2.0));
  w.uuvs[0].uncertainty = 300;
  assign_plan(w.uuvs[0], {task("circle-localize", {"u", "b"}), task("broadcast", {"u"})});
  settle(w);
  std::vector<Event> events;
  for (int i = 0; i < 40; ++i) {
    if (w.ticks == 25) w.beacons[0].active = false;
    auto more = step(w);
    events.insert(events.end(), more.begin(), more.end());
  }
  const auto failed = of_kind(events, "action-failed");
  ASSERT_EQ(failed.size(), 1u);
  EXPECT_EQ(failed[0].time, 30.0);  // first pulse after the switch-off
  EXPECT_EQ(failed[0].payload["reason"], "beacon signal lost");
  EXPECT_EQ(w.uuvs[0].uncertainty, 300.0);
  EXPECT_EQ(w.uuvs[0].status, MissionStatus::failed);
  EXPECT_TRUE(w.uuvs[0].queue.empty());
  EXPECT_TRUE(of_kind(events, "broadcast-sent").empty());
}

TEST(Circle, ZeroSpeedFails) {
  World w;
  w.beacons.push_back(beacon("b", {0, 0}));
  w.uuvs.push_back(vehicle("u", {50, 0}, 0.0));
  assign_plan(w.uuvs[0], {task("circle-localize", {"u", "b"})});
  const auto events = settle(w);
  ASSERT_EQ(of_kind(events, "action-failed").size(), 1u);
}

TEST(Broadcast, ReachesOnlyVehiclesWithinCommRange) {
  World w;
  w.uuvs.push_back(vehicle("a", {0, 0}, 1.0));
  w.uuvs.push_back(vehicle("b", {1500, 0}, 1.0));
  w.uuvs.push_back(vehicle("c", {0, 2500}, 1.0));
  assign_plan(w.uuvs[0], {task("broadcast", {"a"})});
  const auto events = settle(w);
  const auto got = of_kind(events, "broadcast-received");
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].subject_id, "b");
  EXPECT_EQ(of_kind(events, "broadcast-sent")[0].payload["receivers"], nlohmann::json({"b"}));
  EXPECT_EQ(w.uuvs[1].rally.at("a"), (Point2D{0, 0}));
  EXPECT_TRUE(w.uuvs[2].rally.empty());
}

TEST(Broadcast, TwoReceiversInIdOrderCarryingEstimatedPosition) {
  World w;
  w.uuvs.push_back(vehicle("a", {0, 0}, 1.0));
  w.uuvs.push_back(vehicle("b", {0, 900}, 1.0));
  w.uuvs.push_back(vehicle("c", {900, 0}, 1.0));
  w.uuvs[0].estimated_position = {12, 34};
  assign_plan(w.uuvs[0], {task("broadcast", {"a"})});
  const auto got = of_kind(settle(w), "broadcast-received");
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].subject_id, "b");
  EXPECT_EQ(got[1].subject_id, "c");
  EXPECT_EQ(got[0].payload["position"], nlohmann::json({12.0, 34.0}));
}

TEST(Broadcast, MergesEffectAtomsIntoReceiverBelief) {
  auto tables = std::make_shared<hddl::GroundTables>();
  hddl::GroundAction act;
  act.head = task("broadcast", {"a"});
  act.add = {{"broadcast-from", {"a"}}};
  tables->actions.push_back(act);
  tables->action_index[act.head] = 0;
  World w;
  w.uuvs.push_back(vehicle("a", {0, 0}, 1.0));
  w.uuvs.push_back(vehicle("b", {100, 0}, 1.0));
  w.uuvs.push_back(vehicle("c", {200, 0}, 1.0));
  w.uuvs[0].tables = tables;
  w.uuvs[1].known_objects = {"a", "b"};
  w.uuvs[2].known_objects = {"c"};  // does not know the sender's name
  assign_plan(w.uuvs[0], {act.head});
  settle(w);
  EXPECT_EQ(w.uuvs[0].belief.count({"broadcast-from", {"a"}}), 1u);
  EXPECT_EQ(w.uuvs[1].belief.count({"broadcast-from", {"a"}}), 1u);
  EXPECT_TRUE(w.uuvs[2].belief.empty());
}

TEST(Rendezvous, AwaitThenJoinHeadsForBroadcastPosition) {
  World w;
  w.beacons.push_back(beacon("b", {0, 0}));
  w.uuvs.push_back(vehicle("a", {0, 0}, 1.0));
  w.uuvs.push_back(vehicle("z", {400, 300}, 2.0));
  assign_plan(w.uuvs[0], {task("transit-leg", {"a", "b"}), task("broadcast", {"a"})});
  assign_plan(w.uuvs[1], {task("await-broadcast", {"z", "a"}), task("join-broadcaster", {"z", "a"})});
  const auto events = run_until_idle(w);
  EXPECT_EQ(w.uuvs[1].status, MissionStatus::completed);
  EXPECT_EQ(w.uuvs[1].estimated_position, (Point2D{0, 0}));
  const auto joins = of_kind(events, "waypoint-reached");
  EXPECT_EQ(joins.back().time, 250.0);  // 500 m at 2 m/s
}

TEST(Actions, UnknownBeaconFailsAtStart) {
  World w;
  w.uuvs.push_back(vehicle("a", {0, 0}, 1.0));
  assign_plan(w.uuvs[0], {task("navigate-to-beacon", {"a", "nope"})});
  const auto events = settle(w);
  ASSERT_EQ(of_kind(events, "action-failed").size(), 1u);
  EXPECT_EQ(w.uuvs[0].status, MissionStatus::failed);
}

namespace {

// A random fleet with random beacon missions. Some beacons are silent.
World random_world(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-4000, 4000), spd(0.5, 3.0), cur(-0.3, 0.3);
  std::uniform_int_distribution<int> nb(1, 5), nu(1, 5), len(1, 6), coin(0, 4);
  World w;
  w.params.current = {cur(rng), cur(rng)};
  const int beacons = nb(rng);
  for (int i = 0; i < beacons; ++i) {
    BeaconState b = beacon("b" + std::to_string(i), {coord(rng), coord(rng)});
    b.active = coin(rng) != 0;
    w.beacons.push_back(b);
  }
  const int vehicles = nu(rng);
  for (int i = 0; i < vehicles; ++i) {
    UUVState u = vehicle("u" + std::to_string(i), {coord(rng), coord(rng)}, spd(rng));
    u.uncertainty = coin(rng) * 10.0;
    std::vector<GroundTask> plan;
    const char* kinds[] = {"navigate-to-beacon", "sense-beacon", "circle-localize", "transit-leg"};
    std::uniform_int_distribution<int> pick_b(0, beacons - 1), pick_k(0, 3);
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      const int b = pick_b(rng);
      const int kind = pick_k(rng);
      if (kind == 1 || kind == 2) {
        // sense and circle only make sense next to the beacon
        plan.push_back(task("navigate-to-beacon", {u.id, "b" + std::to_string(b)}));
      }
      plan.push_back(task(kinds[kind], {u.id, "b" + std::to_string(b)}));
    }
    if (coin(rng) == 0) plan.push_back(task("broadcast", {u.id}));
    assign_plan(u, plan);
    w.uuvs.push_back(std::move(u));
  }
  return w;
}

}  // namespace

TEST(SimProperties, UncertaintyOnlyDropsAtCompletedCircle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    World w = random_world(seed);
    settle(w);
    std::vector<double> before;
    for (int t = 0; t < 3000; ++t) {
      before.clear();
      for (const auto& u : w.uuvs) before.push_back(u.uncertainty);
      const auto events = step(w);
      for (std::size_t i = 0; i < w.uuvs.size(); ++i) {
        if (w.uuvs[i].uncertainty >= before[i]) continue;
        bool circled = false;
        for (const auto& e : events) {
          circled = circled || (e.subject == i && e.kind == "action-completed" &&
                                e.payload["action"] == "circle-localize");
        }
        EXPECT_TRUE(circled) << "seed " << seed << " tick " << w.ticks;
        EXPECT_EQ(w.uuvs[i].uncertainty, w.params.localization_floor);
      }
    }
  }
}

TEST(SimProperties, FleetSizeIsConserved) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    World w = random_world(seed);
    const auto nu = w.uuvs.size(), nb = w.beacons.size();
    settle(w);
    for (int t = 0; t < 1000; ++t) step(w);
    EXPECT_EQ(w.uuvs.size(), nu);
    EXPECT_EQ(w.beacons.size(), nb);
  }
}

TEST(SimProperties, EventsOrderedByTimeThenSubject) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    World w = random_world(seed);
    const auto events = run_until_idle(w, 5000);
    for (std::size_t i = 1; i < events.size(); ++i) {
      const auto& a = events[i - 1];
      const auto& b = events[i];
      EXPECT_TRUE(a.time < b.time || (a.time == b.time && a.subject <= b.subject))
          << "seed " << seed << " at " << i;
    }
  }
}

TEST(SimProperties, DeterministicForIdenticalInput) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    World a = random_world(seed), b = random_world(seed);
    const auto ea = run_until_idle(a, 5000);
    const auto eb = run_until_idle(b, 5000);
    ASSERT_EQ(ea.size(), eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
      EXPECT_EQ(event_to_json(ea[i]).dump(), event_to_json(eb[i]).dump());
    }
  }
}

TEST(Events, JsonCarriesVersionTimeKindSubject) {
  const Event e{12.5, "detection", 0, "uuv1", {{"beacon", "b6"}}};
  const auto j = event_to_json(e);
  EXPECT_EQ(j["v"], 1);
  EXPECT_EQ(j["t"], 12.5);
  EXPECT_EQ(j["kind"], "detection");
  EXPECT_EQ(j["subject"], "uuv1");
  EXPECT_EQ(j["beacon"], "b6");
}
