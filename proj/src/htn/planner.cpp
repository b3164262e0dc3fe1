#include <chrono>

#include "uuvnav/htn.hpp"

namespace uuvnav::htn {

std::vector<std::string> Plan::action_names() const {
  std::vector<std::string> out;
  for (const auto& s : steps) out.push_back(s.action.name);
  return out;
}

namespace {

struct AgendaItem {
  GroundTask task;
  std::size_t parent = kNoIndex;
};

// Agenda kept reversed: back() is the next task to execute.
using Agenda = std::vector<AgendaItem>;

struct ChoicePoint {
  State state;
  Agenda agenda;
  std::size_t steps_len = 0;
  std::size_t nodes_len = 0;
  std::size_t node = kNoIndex;  // the abstract node being decomposed
  const std::vector<std::size_t>* candidates = nullptr;
  std::size_t next = 0;
};

class Search {
 public:
  Search(const GroundTables& t, const PlannerOptions& o) : tables_(t), options_(o) {}

  PlanResult run(const State& s0, const std::vector<GroundTask>& w0,
                 const std::optional<GroundCondition>& goal) {
    const auto start = std::chrono::steady_clock::now();
    state_ = s0;
    for (auto it = w0.rbegin(); it != w0.rend(); ++it) agenda_.push_back({*it, kNoIndex});

    PlanResult result;
    bool goal_failed = false;
    bool alive = true;
    while (alive) {
      if (agenda_.empty()) {
        if (!goal || goal->holds(state_)) {
          result.solved = true;
          break;
        }
        goal_failed = true;
        alive = backtrack();
        continue;
      }
      AgendaItem item = std::move(agenda_.back());
      agenda_.pop_back();
      const std::size_t node = plan_.nodes.size();
      plan_.nodes.push_back({item.task, {}, {}, {}, kNoIndex, item.parent});
      ++plan_.stats.nodes_expanded;

      if (const auto* action = tables_.find_action(item.task)) {
        if (!action->applicable(state_)) {
          alive = backtrack();
          continue;
        }
        action->apply(state_);
        plan_.nodes[node].step = plan_.steps.size();
        plan_.steps.push_back({item.task, node});
        continue;
      }
      stack_.push_back({state_, agenda_, plan_.steps.size(), plan_.nodes.size(), node,
                        &tables_.methods_of(item.task), 0});
      alive = resume();
    }

    result.plan.stats = plan_.stats;
    if (result.solved) {
      result.plan = std::move(plan_);
      link_children(result.plan);
    } else if (bound_hit_) {
      result.reason = "decomposition bound of " + std::to_string(options_.max_decompositions) +
                      " exceeded";
    } else if (goal_failed) {
      result.reason = "no decomposition of the initial task network reaches the goal";
    } else {
      result.reason = "no executable decomposition of the initial task network exists";
    }
    result.plan.stats.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

 private:
  // Tries the next applicable method of the top choice point, popping
  // exhausted ones. Returns false when the search space is exhausted.
  bool resume() {
    while (!stack_.empty()) {
      ChoicePoint& cp = stack_.back();
      state_ = cp.state;
      agenda_ = cp.agenda;
      plan_.steps.resize(cp.steps_len);
      plan_.nodes.resize(cp.nodes_len);
      const auto& candidates = *cp.candidates;
      while (cp.next < candidates.size()) {
        const auto& m = tables_.methods[candidates[cp.next++]];
        if (!m.pre.holds(state_)) continue;
        if (plan_.stats.decompositions >= options_.max_decompositions) {
          bound_hit_ = true;
          stack_.clear();
          return false;
        }
        ++plan_.stats.decompositions;
        plan_.nodes[cp.node].method = m.name;
        plan_.nodes[cp.node].method_args = m.args;
        for (auto it = m.subtasks.rbegin(); it != m.subtasks.rend(); ++it) {
          agenda_.push_back({*it, cp.node});
        }
        return true;
      }
      plan_.nodes[cp.node].method.clear();
      plan_.nodes[cp.node].method_args.clear();
      stack_.pop_back();
      ++plan_.stats.backtracks;
    }
    return false;
  }

  bool backtrack() { return resume(); }

  static void link_children(Plan& p) {
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
      const std::size_t parent = p.nodes[i].parent;
      if (parent == kNoIndex) {
        p.roots.push_back(i);
      } else {
        p.nodes[parent].children.push_back(i);
      }
    }
  }

  const GroundTables& tables_;
  const PlannerOptions& options_;
  State state_;
  Agenda agenda_;
  Plan plan_;
  std::vector<ChoicePoint> stack_;
  bool bound_hit_ = false;
};

}  // namespace

PlanResult plan(const GroundTables& tables, const State& s0, const std::vector<GroundTask>& w0,
                const std::optional<GroundCondition>& goal, const PlannerOptions& options) {
  return Search(tables, options).run(s0, w0, goal);
}

}  // namespace uuvnav::htn
