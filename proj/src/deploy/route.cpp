#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

#include "uuvnav/deploy.hpp"

namespace uuvnav::deploy {

BeaconGraph build_beacon_graph(std::span<const geo::Point2D> positions,
                               double coverage_link_distance) {
  if (!(coverage_link_distance > 0.0)) {
    throw DeployError("coverage_link_distance must be positive");
  }
  BeaconGraph graph;
  graph.nodes.assign(positions.begin(), positions.end());
  graph.coverage_link_distance = coverage_link_distance;
  graph.adjacency.resize(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      const double d = geo::distance(positions[i], positions[j]);
      if (d <= coverage_link_distance) {
        graph.adjacency[i].push_back(graph.edges.size());
        graph.adjacency[j].push_back(graph.edges.size());
        graph.edges.push_back({i, j, d});
      }
    }
  }
  return graph;
}

BeaconGraph build_beacon_graph(const DeploymentResult& result,
                               double coverage_link_distance) {
  return build_beacon_graph(result.beacon_positions, coverage_link_distance);
}

Route astar_route(const BeaconGraph& graph, std::size_t start, std::size_t goal) {
  const std::size_t n = graph.nodes.size();
  if (start >= n || goal >= n) {
    throw DeployError("route endpoint index " + std::to_string(std::max(start, goal)) +
                      " is not a node of the " + std::to_string(n) + "-node beacon graph");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> g(n, kInf);
  std::vector<std::size_t> parent(n, kNone);
  auto h = [&](std::size_t v) { return geo::distance(graph.nodes[v], graph.nodes[goal]); };

  // (f, node); std::greater on pairs breaks f ties by lower node index.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[start] = 0.0;
  open.push({h(start), start});

  Route route;
  while (!open.empty()) {
    const auto [f, v] = open.top();
    open.pop();
    if (f > g[v] + h(v)) continue;  // stale entry
    ++route.expanded;
    if (v == goal) break;
    for (std::size_t e : graph.adjacency[v]) {
      const std::size_t w = graph.neighbor(e, v);
      const double cand = g[v] + graph.edges[e].length;
      if (cand < g[w]) {
        g[w] = cand;
        parent[w] = v;
        open.push({cand + h(w), w});
      }
    }
  }
  if (g[goal] == kInf) return route;
  for (std::size_t v = goal; v != kNone; v = parent[v]) route.nodes.push_back(v);
  std::reverse(route.nodes.begin(), route.nodes.end());
  route.length = g[goal];
  return route;
}

}  // namespace uuvnav::deploy
