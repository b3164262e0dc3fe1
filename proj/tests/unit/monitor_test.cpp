#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "uuvnav/hddl.hpp"
#include "uuvnav/monitor.hpp"

namespace fs = std::filesystem;
using namespace uuvnav;
using namespace uuvnav::monitor;
using hddl::GroundTask;
using sim::Point2D;

namespace {

const fs::path kRoot = UUVNAV_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A vehicle of the bundled fleet: its tables, belief and planned mission.
struct Agent {
  sim::UUVState state;
  AgentPlan plan;
};

Agent bundled_agent(const std::string& id, Point2D at) {
  static const hddl::Domain domain = hddl::parse_domain(slurp(kRoot / "domains/uuv-nav.hddl"));
  const auto problem =
      hddl::parse_problem(slurp(kRoot / "scenarios/fleet/problems" / (id + ".hddl")), domain);
  Agent a;
  a.state.id = id;
  a.state.true_position = a.state.estimated_position = at;
  a.state.speed = 2.0;
  a.state.tables = std::make_shared<const hddl::GroundTables>(hddl::ground(domain, problem));
  for (const auto& o : problem.objects) a.state.known_objects.insert(o.name);
  a.state.belief = hddl::initial_state(problem);
  a.plan.goal = hddl::ground_goal(problem);
  const auto r = htn::plan(*a.state.tables, a.state.belief, hddl::initial_network(problem),
                           a.plan.goal);
  EXPECT_TRUE(r.solved) << r.reason;
  a.plan.plan = r.plan;
  std::vector<GroundTask> steps;
  for (const auto& s : r.plan.steps) steps.push_back(s.action);
  sim::assign_plan(a.state, steps);
  return a;
}

sim::World beacon_world() {
  sim::World w;
  for (int i = 4; i <= 8; ++i) {
    sim::BeaconState b;
    b.id = "b" + std::to_string(i);
    b.position = {1000.0 * (i - 4), 0.0};
    w.beacons.push_back(b);
  }
  return w;
}

std::vector<std::string> names(const std::vector<GroundTask>& tasks) {
  std::vector<std::string> out;
  for (const auto& t : tasks) out.push_back(hddl::to_string(t));
  return out;
}

}  // namespace

TEST(DetectionWindow, ThousandMetresAtOneMetrePerSecond) {
  const Window w = detection_window(1000, 1.0, 0.0, 10.0, 0.5);
  EXPECT_DOUBLE_EQ(w.earliest, 500.0);
  EXPECT_DOUBLE_EQ(w.latest, 1510.0);
}

TEST(DetectionWindow, UncertaintyWidensMargin) {
  // margin 0.5 * (1 + 200/1000) = 0.6
  const Window w = detection_window(1000, 1.0, 200.0, 10.0, 0.5);
  EXPECT_DOUBLE_EQ(w.earliest, 400.0);
  EXPECT_DOUBLE_EQ(w.latest, 1610.0);
  // Margin above one clamps the start at zero.
  EXPECT_EQ(detection_window(100, 1.0, 500.0, 10.0, 0.5).earliest, 0.0);
}

TEST(DetectionWindow, ZeroDistanceAndZeroSpeed) {
  const Window w = detection_window(0, 0.0, 50.0, 10.0);
  EXPECT_EQ(w.earliest, 0.0);
  EXPECT_EQ(w.latest, 10.0);
  EXPECT_THROW(detection_window(10, 0.0, 0.0, 10.0), std::invalid_argument);
}

TEST(DetectionWindow, OrderedAndMonotoneInUncertainty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(1, 10000), v(0.1, 5), s(0, 2000), p(1, 30), m(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double dist = d(rng), speed = v(rng), sigma = s(rng), pulse = p(rng), margin = m(rng);
    const Window a = detection_window(dist, speed, sigma, pulse, margin);
    const Window b = detection_window(dist, speed, sigma + 10, pulse, margin);
    EXPECT_LE(a.earliest, a.latest);
    EXPECT_GE(a.earliest, 0.0);
    EXPECT_LE(b.earliest, a.earliest);
    EXPECT_GE(b.latest, a.latest);
  }
}

TEST(DeriveExpectations, NoNavigateStepsGiveNone) {
  const auto w = beacon_world();
  Agent a = bundled_agent("uuv2", {0, 0});  // await + join only
  EXPECT_TRUE(derive_expectations(a.plan.plan, a.state, w).empty());
}

TEST(DeriveExpectations, BundledMissionChainsLegs) {
  auto w = beacon_world();
  Agent a = bundled_agent("uuv1", {-1000, 0});
  a.state.uncertainty = 20;
  const auto exps = derive_expectations(a.plan.plan, a.state, w);
  ASSERT_EQ(exps.size(), 2u);
  // Leg 1: start to b6's standoff point, 2950 m.
  const double d1 = 2950, t1 = d1 / 2.0;
  const Window w1 = detection_window(d1, 2.0, 20, 10.0);
  EXPECT_EQ(exps[0].beacon_id, "b6");
  EXPECT_EQ(exps[0].step, 0u);
  EXPECT_EQ(exps[0].leg_start, 0.0);
  EXPECT_DOUBLE_EQ(exps[0].latest, w1.latest);
  // Circling resets uncertainty to the floor, then leg 2 is 2000 m to b8.
  const double circle = sim::circle_duration(50, 2.0);
  const Window w2 = detection_window(2000, 2.0, 5.0, 10.0);
  EXPECT_EQ(exps[1].beacon_id, "b8");
  EXPECT_EQ(exps[1].step, 4u);
  EXPECT_DOUBLE_EQ(exps[1].leg_start, t1 + circle);
  EXPECT_DOUBLE_EQ(exps[1].earliest, t1 + circle + w2.earliest);
  EXPECT_DOUBLE_EQ(exps[1].latest, t1 + circle + w2.latest);
  EXPECT_LT(exps[0].leg_start, exps[1].leg_start);
}

TEST(Check, DetectionInsideWindowGivesNoRecord) {
  auto w = beacon_world();
  w.uuvs.push_back(bundled_agent("uuv1", {0, 0}).state);
  Expectation e;
  e.uuv = 0;
  e.beacon = 2;
  e.beacon_id = "b6";
  e.earliest = 100;
  e.latest = 200;
  e.met = true;
  w.time = 500;
  EXPECT_TRUE(check(w, {e}).empty());
}

TEST(Check, ExpiredWindowGivesOneRecordOpenWindowNone) {
  auto w = beacon_world();
  w.uuvs.push_back(bundled_agent("uuv1", {0, 0}).state);
  Expectation e;
  e.uuv = 0;
  e.beacon = 2;
  e.beacon_id = "b6";
  e.earliest = 100;
  e.latest = 200;
  w.time = 200;
  EXPECT_TRUE(check(w, {e}).empty());
  w.time = 201;
  const auto r = check(w, {e});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].time, 201);
  EXPECT_NE(r[0].observed.find("b6"), std::string::npos);
}

TEST(MonitorLoop, SilencedBeaconDivergesOneTickAfterWindow) {
  auto w = beacon_world();
  w.beacons[2].active = false;  // b6
  w.uuvs.push_back(bundled_agent("uuv1", {-1000, 0}).state);
  Monitor m;
  m.observe(w, sim::settle(w));
  ASSERT_EQ(m.open().size(), 1u);
  const double latest = m.open()[0].latest;
  std::vector<DivergenceRecord> found;
  while (found.empty() && w.ticks < 10000) {
    m.observe(w, sim::step(w));
    found = m.take_divergences(w);
  }
  ASSERT_EQ(found.size(), 1u);
  EXPECT_GT(found[0].time, latest);
  EXPECT_LE(found[0].time, latest + w.params.tick);
  EXPECT_TRUE(m.open().empty());
}

TEST(MonitorLoop, NominalRunHasNoDivergence) {
  auto w = beacon_world();
  w.uuvs.push_back(bundled_agent("uuv1", {-1000, 0}).state);
  Monitor m;
  m.observe(w, sim::settle(w));
  while (w.uuvs[0].status == sim::MissionStatus::running || !m.open().empty()) {
    m.observe(w, sim::step(w));
    EXPECT_TRUE(m.take_divergences(w).empty()) << w.time;
    ASSERT_LT(w.ticks, 10000u);
  }
  EXPECT_EQ(m.history().size(), 2u);
}

TEST(RemainingNetwork, CutsAtStepBoundaries) {
  const Agent a = bundled_agent("uuv1", {0, 0});
  const auto& p = a.plan.plan;
  EXPECT_EQ(names(remaining_network(p, 0, false)), (std::vector<std::string>{"(mission uuv1 b6 b8)"}));
  EXPECT_EQ(names(remaining_network(p, 1, true)),
            (std::vector<std::string>{"(localize uuv1 b6)", "(share uuv1)", "(goto uuv1 b8)"}));
  EXPECT_EQ(names(remaining_network(p, 3, false)),
            (std::vector<std::string>{"(share uuv1)", "(goto uuv1 b8)"}));
  EXPECT_EQ(names(remaining_network(p, 4, true)), (std::vector<std::string>{"(goto uuv1 b8)"}));
  EXPECT_TRUE(remaining_network(p, 5, false).empty());
}

namespace {

// Bundled uuv1 heading for b6 plus uuv2 and uuv5 at the given spots.
struct Fleet {
  sim::World world;
  std::vector<AgentPlan> plans;
  Monitor monitor;
};

Fleet fleet(Point2D uuv2_at, Point2D uuv5_at) {
  Fleet f;
  f.world = beacon_world();
  for (auto [id, at] : {std::pair<std::string, Point2D>{"uuv1", {-1000, 0}},
                        {"uuv2", uuv2_at},
                        {"uuv5", uuv5_at}}) {
    Agent a = bundled_agent(id, at);
    f.world.uuvs.push_back(a.state);
    f.plans.push_back(a.plan);
  }
  sim::settle(f.world);
  return f;
}

std::vector<std::string> replanned(const ReplanOutcome& o) {
  std::vector<std::string> out;
  for (const auto& e : o.events) {
    if (e.kind == "replan-triggered") out.push_back(e.subject_id);
  }
  return out;
}

}  // namespace

TEST(ReplanEpisode, ReplansTriggerAndInRangeOnly) {
  Fleet f = fleet({-1000, 1500}, {4000, 0});
  const auto out = replan_episode({0, 2, "divergence"}, f.world, f.plans, f.monitor);
  EXPECT_EQ(replanned(out), (std::vector<std::string>{"uuv1", "uuv2"}));
  EXPECT_EQ(out.replanned, (std::vector<std::size_t>{0, 1}));
  // uuv1 falls back on dead reckoning for b6, then shares and goes on to b8.
  std::vector<std::string> steps;
  for (const auto& t : f.world.uuvs[0].queue) steps.push_back(hddl::to_string(t));
  EXPECT_EQ(steps, (std::vector<std::string>{"(transit-leg uuv1 b6)", "(broadcast uuv1)",
                                             "(navigate-to-beacon uuv1 b8)"}));
  EXPECT_EQ(f.world.uuvs[1].belief.count({"beacon-unreachable", {"uuv2", "b6"}}), 1u);
  EXPECT_EQ(f.world.uuvs[2].belief.count({"beacon-unreachable", {"uuv5", "b6"}}), 0u);
  EXPECT_EQ(f.world.uuvs[2].status, sim::MissionStatus::running);
}

TEST(ReplanEpisode, NobodyInRangeReplansExactlyOne) {
  Fleet f = fleet({-1000, 2500}, {4000, 0});
  const auto out = replan_episode({0, 2, "divergence"}, f.world, f.plans, f.monitor);
  EXPECT_EQ(replanned(out), (std::vector<std::string>{"uuv1"}));
}

TEST(ReplanEpisode, FinishedVehicleOnlyWarns) {
  Fleet f = fleet({-1000, 2500}, {4000, 0});
  auto& u = f.world.uuvs[0];
  u.queue.clear();
  u.current.reset();
  u.steps_done = f.plans[0].plan.steps.size();
  u.status = sim::MissionStatus::completed;
  const auto before = u.belief;
  const auto out = replan_episode({0, 4, "divergence"}, f.world, f.plans, f.monitor);
  ASSERT_EQ(out.events.size(), 1u);
  EXPECT_EQ(out.events[0].kind, "warning");
  EXPECT_TRUE(out.replanned.empty());
  EXPECT_EQ(u.belief, before);
  EXPECT_EQ(u.status, sim::MissionStatus::completed);
}

TEST(ReplanEpisode, UnsolvableReplanFailsThatVehicleOnly) {
  // uuv5 is circling b8. Marking b8 unreachable rules out the beacon method,
  // and the dead-reckoning method is disabled in its tables.
  Fleet f = fleet({-1000, 1500}, {4000, 0});
  auto tables = std::make_shared<hddl::GroundTables>(*f.world.uuvs[2].tables);
  for (auto& m : tables->methods) {
    if (m.name == "m-localize-dead-reckon") m.pre.statically_false = true;
  }
  f.world.uuvs[2].tables = tables;
  const auto out = replan_episode({2, 4, "divergence"}, f.world, f.plans, f.monitor);
  ASSERT_EQ(replanned(out), (std::vector<std::string>{"uuv5"}));
  EXPECT_EQ(f.world.uuvs[2].status, sim::MissionStatus::failed);
  EXPECT_EQ(out.events.back().kind, "mission-failed");
  EXPECT_EQ(f.world.uuvs[0].status, sim::MissionStatus::running);
}

TEST(ReplanEpisode, ReplannedPlansValidateFromBeliefAtTriggerTime) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(-3000, 3000);
  std::uniform_int_distribution<std::size_t> beacon(0, 4), who(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    Fleet f = fleet({coord(rng), coord(rng)}, {coord(rng), coord(rng)});
    const std::size_t trigger = who(rng);
    const auto out = replan_episode({trigger, beacon(rng), "divergence"}, f.world, f.plans, f.monitor);
    for (const auto& e : out.events) {
      if (e.kind != "replan-triggered" || !e.payload["solved"].get<bool>()) continue;
      EXPECT_TRUE(e.payload["valid"].get<bool>());
      const auto& u = f.world.uuvs[e.subject];
      // The belief after the episode is the one the new plan was built from,
      // and the new plan's roots are the remaining network it was given.
      const auto v = htn::validate(*u.tables, u.belief,
                                   remaining_network(f.plans[e.subject].plan, 0, false),
                                   f.plans[e.subject].plan, f.plans[e.subject].goal);
      EXPECT_TRUE(v.valid) << v.message;
    }
  }
}
