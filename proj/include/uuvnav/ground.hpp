#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "uuvnav/hddl.hpp"

namespace uuvnav::hddl {

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
  friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
};

/// A ground task occurrence; the same shape as an atom but over task names.
struct GroundTask {
  std::string name;
  std::vector<std::string> args;

  friend auto operator<=>(const GroundTask&, const GroundTask&) = default;
  friend bool operator==(const GroundTask&, const GroundTask&) = default;
};

std::string to_string(const GroundAtom& a);
std::string to_string(const GroundTask& t);

using State = std::set<GroundAtom>;

/// Ground conjunction split by polarity. Equality literals are decided at
/// grounding time and folded into `statically_false`.
struct GroundCondition {
  std::vector<GroundAtom> positive;
  std::vector<GroundAtom> negative;
  bool statically_false = false;

  bool holds(const State& s) const;
  friend bool operator==(const GroundCondition&, const GroundCondition&) = default;
};

struct GroundAction {
  GroundTask head;  // action name + arguments
  GroundCondition pre;
  std::vector<GroundAtom> add;
  std::vector<GroundAtom> del;

  bool applicable(const State& s) const { return pre.holds(s); }
  /// Deletes first, then adds, so an atom both deleted and added survives.
  void apply(State& s) const;
};

struct GroundMethod {
  std::string name;
  std::vector<std::string> args;  // values of the method parameters
  GroundTask task;
  GroundCondition pre;
  std::vector<GroundTask> subtasks;
};

class GroundingError : public std::runtime_error {
 public:
  GroundingError(const std::string& what, std::size_t count)
      : std::runtime_error(what), count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

inline constexpr std::size_t kDefaultGroundingCap = 1'000'000;

struct GroundTables {
  std::vector<GroundAction> actions;
  std::vector<GroundMethod> methods;
  std::map<GroundTask, std::size_t> action_index;
  /// Ground abstract task -> method indices, in domain source order.
  std::map<GroundTask, std::vector<std::size_t>> methods_for;

  const GroundAction* find_action(const GroundTask& t) const;
  bool is_primitive(const GroundTask& t) const { return action_index.count(t) != 0; }
  const std::vector<std::size_t>& methods_of(const GroundTask& t) const;
};

/// Objects (domain constants first, then problem objects) whose type is `type`
/// or a subtype of it.
std::vector<std::string> objects_of_type(const Domain& d, const Problem& p,
                                         const std::string& type);

/// Number of instances `ground` would produce, without building them.
std::size_t grounding_count(const Domain& d, const Problem& p);

GroundTables ground(const Domain& d, const Problem& p,
                    std::size_t cap = kDefaultGroundingCap);

GroundAtom ground_atom(const Atom& a);  // requires a ground atom
GroundTask ground_task(const Atom& a);
State initial_state(const Problem& p);
std::vector<GroundTask> initial_network(const Problem& p);
std::optional<GroundCondition> ground_goal(const Problem& p);

}  // namespace uuvnav::hddl
