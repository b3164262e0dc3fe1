#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "uuvnav/deploy.hpp"

namespace uuvnav::deploy {
namespace {

using geo::Point2D;

constexpr double kInf = std::numeric_limits<double>::infinity();

double edge_length(const BeaconGraph& g, std::size_t a, std::size_t b) {
  for (std::size_t e : g.adjacency[a]) {
    if (g.neighbor(e, a) == b) return g.edges[e].length;
  }
  return kInf;
}

double route_cost(const BeaconGraph& g, const std::vector<std::size_t>& nodes) {
  double cost = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) cost += edge_length(g, nodes[i - 1], nodes[i]);
  return cost;
}

// Bellman-Ford over the undirected edge list.
double bellman_ford(const BeaconGraph& g, std::size_t start, std::size_t goal) {
  std::vector<double> dist(g.nodes.size(), kInf);
  dist[start] = 0.0;
  for (std::size_t round = 0; round + 1 < g.nodes.size(); ++round) {
    for (const auto& e : g.edges) {
      if (dist[e.a] + e.length < dist[e.b]) dist[e.b] = dist[e.a] + e.length;
      if (dist[e.b] + e.length < dist[e.a]) dist[e.a] = dist[e.b] + e.length;
    }
  }
  return dist[goal];
}

// Every simple path, cost accumulated from the start.
void simple_paths(const BeaconGraph& g, std::size_t v, std::size_t goal, double cost,
                  std::vector<bool>& seen, double& best) {
  if (v == goal) {
    best = std::min(best, cost);
    return;
  }
  for (std::size_t e : g.adjacency[v]) {
    const std::size_t w = g.neighbor(e, v);
    if (seen[w]) continue;
    seen[w] = true;
    simple_paths(g, w, goal, cost + g.edges[e].length, seen, best);
    seen[w] = false;
  }
}

double exhaustive(const BeaconGraph& g, std::size_t start, std::size_t goal) {
  std::vector<bool> seen(g.nodes.size(), false);
  seen[start] = true;
  double best = kInf;
  simple_paths(g, start, goal, 0.0, seen, best);
  return best;
}

TEST(BeaconGraph, LinkRule) {
  const std::vector<Point2D> near{{0, 0}, {3000, 0}};
  EXPECT_EQ(build_beacon_graph(near, 4000).edges.size(), 1u);
  const std::vector<Point2D> far{{0, 0}, {5000, 0}};
  EXPECT_EQ(build_beacon_graph(far, 4000).edges.size(), 0u);
  const std::vector<Point2D> chain{{0, 0}, {2000, 0}, {4000, 0}};
  const auto g = build_beacon_graph(chain, 2500);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.adjacency[1].size(), 2u);
  EXPECT_THROW(build_beacon_graph(chain, 0.0), DeployError);
}

TEST(BeaconGraph, EdgesIffWithinLinkDistance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 10000.0);
  std::vector<Point2D> pts(15);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const auto g = build_beacon_graph(pts, 3500);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(edge_length(g, i, i), kInf);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const bool linked = edge_length(g, i, j) != kInf;
      EXPECT_EQ(linked, geo::distance(pts[i], pts[j]) <= 3500);
      EXPECT_EQ(edge_length(g, i, j), edge_length(g, j, i));
    }
  }
}

TEST(AStar, StartEqualsGoal) {
  const std::vector<Point2D> pts{{0, 0}, {100, 0}};
  const auto r = astar_route(build_beacon_graph(pts), 1, 1);
  EXPECT_EQ(r.nodes, (std::vector<std::size_t>{1}));
  EXPECT_EQ(r.length, 0.0);
}

TEST(AStar, PathGraph) {
  const std::vector<Point2D> chain{{0, 0}, {2000, 0}, {4000, 0}};
  const auto r = astar_route(build_beacon_graph(chain, 2500), 0, 2);
  EXPECT_EQ(r.nodes, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(r.length, 4000.0);
}

TEST(AStar, UnreachableAndUnknownNode) {
  const std::vector<Point2D> pts{{0, 0}, {9000, 0}};
  const auto g = build_beacon_graph(pts);
  EXPECT_FALSE(astar_route(g, 0, 1).reachable());
  EXPECT_THROW(astar_route(g, 0, 2), DeployError);
}

TEST(AStar, MatchesExhaustiveSearchOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 2 + rng() % 11;
    std::vector<Point2D> pts(n);
    for (auto& p : pts) p = {10000 * u(rng), 10000 * u(rng)};
    const auto g = build_beacon_graph(pts, 2000 + 5000 * u(rng));
    const std::size_t start = rng() % n;
    const std::size_t goal = rng() % n;
    const auto r = astar_route(g, start, goal);
    const double oracle = exhaustive(g, start, goal);
    EXPECT_EQ(bellman_ford(g, start, goal), oracle) << "seed " << seed;
    if (oracle == kInf) {
      EXPECT_FALSE(r.reachable()) << "seed " << seed;
      continue;
    }
    ASSERT_TRUE(r.reachable()) << "seed " << seed;
    EXPECT_EQ(r.nodes.front(), start);
    EXPECT_EQ(r.nodes.back(), goal);
    EXPECT_EQ(route_cost(g, r.nodes), oracle) << "seed " << seed;
    EXPECT_EQ(r.length, oracle) << "seed " << seed;
  }
}

}  // namespace
}  // namespace uuvnav::deploy
