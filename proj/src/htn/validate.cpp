#include "uuvnav/htn.hpp"

namespace uuvnav::htn {

namespace {

Verdict invalid(std::string message, std::size_t step = kNoIndex) {
  return {false, step, std::move(message)};
}

class TreeCheck {
 public:
  TreeCheck(const GroundTables& t, const Plan& p, const std::vector<State>& states)
      : tables_(t), plan_(p), states_(states) {}

  Verdict run(const std::vector<GroundTask>& w0) {
    if (plan_.roots.size() != w0.size()) {
      return invalid("the tree has " + std::to_string(plan_.roots.size()) +
                     " root(s) but the initial task network has " + std::to_string(w0.size()));
    }
    for (std::size_t i = 0; i < w0.size(); ++i) {
      const std::size_t r = plan_.roots[i];
      if (r >= plan_.nodes.size()) return invalid("root refers to a missing node");
      if (plan_.nodes[r].task != w0[i]) {
        return invalid("root " + std::to_string(i) + " is " + to_string(plan_.nodes[r].task) +
                       " but the initial task network has " + to_string(w0[i]));
      }
      if (auto v = visit(r, 0); !v.valid) return v;
    }
    if (next_step_ < plan_.steps.size()) {
      return invalid("orphan step " + std::to_string(next_step_) + ": " +
                         to_string(plan_.steps[next_step_].action) +
                         " is not derived from the initial task network",
                     next_step_);
    }
    return {};
  }

 private:
  Verdict visit(std::size_t index, std::size_t depth) {
    if (depth > plan_.nodes.size()) return invalid("the decomposition tree has a cycle");
    const PlanNode& node = plan_.nodes[index];
    if (node.primitive()) {
      if (!tables_.is_primitive(node.task)) {
        return invalid("task " + to_string(node.task) + " is abstract but has no method");
      }
      if (!node.children.empty()) {
        return invalid("primitive task " + to_string(node.task) + " has children");
      }
      if (next_step_ >= plan_.steps.size()) {
        return invalid("tree leaf " + to_string(node.task) + " has no matching plan step");
      }
      if (plan_.steps[next_step_].action != node.task) {
        return invalid("orphan step " + std::to_string(next_step_) + ": " +
                           to_string(plan_.steps[next_step_].action) +
                           " does not match the derived task " + to_string(node.task),
                       next_step_);
      }
      ++next_step_;
      return {};
    }

    const hddl::GroundMethod* method = nullptr;
    for (std::size_t m : tables_.methods_of(node.task)) {
      const auto& candidate = tables_.methods[m];
      if (candidate.name == node.method && candidate.args == node.method_args) {
        method = &candidate;
        break;
      }
    }
    if (!method) {
      return invalid("method " + node.method + " does not decompose " + to_string(node.task));
    }
    if (!method->pre.holds(states_[next_step_])) {
      return invalid("precondition of method " + node.method + " fails before step " +
                         std::to_string(next_step_),
                     next_step_);
    }
    if (method->subtasks.size() != node.children.size()) {
      return invalid("method " + node.method + " yields " +
                     std::to_string(method->subtasks.size()) + " subtask(s), tree has " +
                     std::to_string(node.children.size()));
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const std::size_t c = node.children[i];
      if (c >= plan_.nodes.size()) return invalid("child refers to a missing node");
      if (plan_.nodes[c].task != method->subtasks[i]) {
        return invalid("subtask " + std::to_string(i) + " of " + node.method + " should be " +
                       to_string(method->subtasks[i]) + ", tree has " +
                       to_string(plan_.nodes[c].task));
      }
      if (auto v = visit(c, depth + 1); !v.valid) return v;
    }
    return {};
  }

  const GroundTables& tables_;
  const Plan& plan_;
  const std::vector<State>& states_;
  std::size_t next_step_ = 0;
};

}  // namespace

Verdict validate(const GroundTables& tables, const State& s0, const std::vector<GroundTask>& w0,
                 const Plan& plan, const std::optional<GroundCondition>& goal) {
  // states[i] is the state before step i; states.back() is the final state.
  std::vector<State> states{s0};
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto* action = tables.find_action(plan.steps[i].action);
    if (!action) {
      return invalid("step " + std::to_string(i) + " (" + to_string(plan.steps[i].action) +
                         ") is not a ground action of the domain",
                     i);
    }
    if (!action->applicable(states.back())) {
      return invalid("precondition of step " + std::to_string(i) + " (" +
                         to_string(plan.steps[i].action) + ") does not hold",
                     i);
    }
    State next = states.back();
    action->apply(next);
    states.push_back(std::move(next));
  }
  if (auto v = TreeCheck(tables, plan, states).run(w0); !v.valid) return v;
  if (goal && !goal->holds(states.back())) return invalid("the final state violates the goal");
  return {true, kNoIndex, "valid"};
}

}  // namespace uuvnav::htn
