#include <sstream>

#include "uuvnav/htn.hpp"

namespace uuvnav::htn {

using nlohmann::json;

namespace {

json index_or_null(std::size_t i) { return i == kNoIndex ? json(nullptr) : json(i); }

std::size_t index_from(const json& j) {
  return j.is_null() ? kNoIndex : j.get<std::size_t>();
}

void print_node(const Plan& p, std::size_t index, int depth, std::ostringstream& out) {
  const PlanNode& n = p.nodes[index];
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ');
  if (n.primitive()) {
    out << '[' << n.step << "] " << to_string(n.task) << '\n';
    return;
  }
  out << to_string(n.task) << " by " << n.method;
  for (const auto& a : n.method_args) out << ' ' << a;
  out << '\n';
  for (std::size_t c : n.children) print_node(p, c, depth + 1, out);
}

}  // namespace

json plan_to_json(const Plan& plan) {
  json steps = json::array();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    steps.push_back({{"index", i}, {"action", s.action.name}, {"args", s.action.args},
                     {"node", index_or_null(s.node)}});
  }
  json nodes = json::array();
  for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
    const auto& n = plan.nodes[i];
    json node = {{"id", i},
                 {"task", n.task.name},
                 {"args", n.task.args},
                 {"children", n.children},
                 {"parent", index_or_null(n.parent)}};
    if (n.primitive()) {
      node["step"] = index_or_null(n.step);
    } else {
      node["method"] = n.method;
      node["method_args"] = n.method_args;
    }
    nodes.push_back(std::move(node));
  }
  return {{"steps", steps},
          {"tree", {{"roots", plan.roots}, {"nodes", nodes}}},
          {"stats",
           {{"nodes_expanded", plan.stats.nodes_expanded},
            {"decompositions", plan.stats.decompositions},
            {"backtracks", plan.stats.backtracks}}}};
}

Plan plan_from_json(const json& j) {
  Plan p;
  for (const auto& s : j.at("steps")) {
    p.steps.push_back({{s.at("action").get<std::string>(),
                        s.at("args").get<std::vector<std::string>>()},
                       index_from(s.value("node", json(nullptr)))});
  }
  const json& tree = j.at("tree");
  p.roots = tree.at("roots").get<std::vector<std::size_t>>();
  for (const auto& n : tree.at("nodes")) {
    PlanNode node;
    node.task = {n.at("task").get<std::string>(), n.at("args").get<std::vector<std::string>>()};
    node.children = n.at("children").get<std::vector<std::size_t>>();
    node.parent = index_from(n.value("parent", json(nullptr)));
    if (n.contains("method")) {
      node.method = n.at("method").get<std::string>();
      node.method_args = n.value("method_args", std::vector<std::string>{});
    } else {
      node.step = index_from(n.value("step", json(nullptr)));
    }
    p.nodes.push_back(std::move(node));
  }
  if (j.contains("stats")) {
    const json& s = j.at("stats");
    p.stats.nodes_expanded = s.value("nodes_expanded", std::size_t{0});
    p.stats.decompositions = s.value("decompositions", std::size_t{0});
    p.stats.backtracks = s.value("backtracks", std::size_t{0});
  }
  return p;
}

std::string plan_to_text(const Plan& plan) {
  std::ostringstream out;
  for (std::size_t r : plan.roots) print_node(plan, r, 0, out);
  return out.str();
}

}  // namespace uuvnav::htn
