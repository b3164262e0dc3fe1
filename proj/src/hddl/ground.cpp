#include "uuvnav/ground.hpp"

#include <algorithm>
#include <limits>

namespace uuvnav::hddl {

namespace {

std::string paren(const std::string& name, const std::vector<std::string>& args) {
  std::string out = "(" + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

using Binding = std::map<std::string, std::string>;

std::string resolve(const std::string& term, const Binding& b) {
  if (!is_variable(term)) return term;
  return b.at(term);
}

std::vector<std::string> resolve_all(const std::vector<std::string>& terms, const Binding& b) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(resolve(t, b));
  return out;
}

GroundCondition ground_condition(const Conjunction& c, const Binding& b) {
  GroundCondition g;
  for (const auto& lit : c) {
    auto args = resolve_all(lit.atom.args, b);
    if (lit.atom.name == "=") {
      const bool equal = args[0] == args[1];
      if (equal == lit.negated) g.statically_false = true;
      continue;
    }
    GroundAtom atom{lit.atom.name, std::move(args)};
    (lit.negated ? g.negative : g.positive).push_back(std::move(atom));
  }
  return g;
}

// Visits every type-consistent binding of `params` in lexicographic order of
// the per-parameter object lists.
template <typename F>
void for_each_binding(const std::vector<std::vector<std::string>>& domains,
                      const std::vector<TypedName>& params, F&& f) {
  for (const auto& d : domains) {
    if (d.empty()) return;
  }
  std::vector<std::size_t> idx(params.size(), 0);
  while (true) {
    Binding b;
    std::vector<std::string> values;
    for (std::size_t i = 0; i < params.size(); ++i) {
      b[params[i].name] = domains[i][idx[i]];
      values.push_back(domains[i][idx[i]]);
    }
    f(b, values);
    std::size_t k = params.size();
    while (k > 0) {
      --k;
      if (++idx[k] < domains[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (params.empty()) return;
  }
}

std::vector<std::vector<std::string>> param_domains(const Domain& d, const Problem& p,
                                                    const std::vector<TypedName>& params) {
  std::vector<std::vector<std::string>> out;
  for (const auto& param : params) out.push_back(objects_of_type(d, p, param.type));
  return out;
}

std::size_t saturating_product(const std::vector<std::vector<std::string>>& domains) {
  std::size_t n = 1;
  for (const auto& d : domains) {
    if (d.empty()) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / d.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    n *= d.size();
  }
  return n;
}

}  // namespace

std::string to_string(const GroundAtom& a) { return paren(a.predicate, a.args); }
std::string to_string(const GroundTask& t) { return paren(t.name, t.args); }

bool GroundCondition::holds(const State& s) const {
  if (statically_false) return false;
  for (const auto& a : positive) {
    if (!s.count(a)) return false;
  }
  for (const auto& a : negative) {
    if (s.count(a)) return false;
  }
  return true;
}

void GroundAction::apply(State& s) const {
  for (const auto& a : del) s.erase(a);
  for (const auto& a : add) s.insert(a);
}

const GroundAction* GroundTables::find_action(const GroundTask& t) const {
  auto it = action_index.find(t);
  return it == action_index.end() ? nullptr : &actions[it->second];
}

const std::vector<std::size_t>& GroundTables::methods_of(const GroundTask& t) const {
  static const std::vector<std::size_t> kNone;
  auto it = methods_for.find(t);
  return it == methods_for.end() ? kNone : it->second;
}

std::vector<std::string> objects_of_type(const Domain& d, const Problem& p,
                                         const std::string& type) {
  std::vector<std::string> out;
  for (const auto& c : d.constants) {
    if (d.is_subtype(c.type, type)) out.push_back(c.name);
  }
  for (const auto& o : p.objects) {
    if (d.is_subtype(o.type, type)) out.push_back(o.name);
  }
  return out;
}

std::size_t grounding_count(const Domain& d, const Problem& p) {
  std::size_t total = 0;
  auto add = [&](std::size_t n) {
    total = (n > std::numeric_limits<std::size_t>::max() - total)
                ? std::numeric_limits<std::size_t>::max()
                : total + n;
  };
  for (const auto& a : d.actions) add(saturating_product(param_domains(d, p, a.params)));
  for (const auto& m : d.methods) add(saturating_product(param_domains(d, p, m.params)));
  return total;
}

GroundTables ground(const Domain& d, const Problem& p, std::size_t cap) {
  const std::size_t count = grounding_count(d, p);
  if (count > cap) {
    throw GroundingError("grounding would produce " + std::to_string(count) +
                             " instances, above the cap of " + std::to_string(cap),
                         count);
  }
  GroundTables t;
  for (const auto& a : d.actions) {
    for_each_binding(param_domains(d, p, a.params), a.params,
                     [&](const Binding& b, const std::vector<std::string>& values) {
                       GroundAction g;
                       g.head = {a.name, values};
                       g.pre = ground_condition(a.precondition, b);
                       for (const auto& lit : a.effect) {
                         GroundAtom atom{lit.atom.name, resolve_all(lit.atom.args, b)};
                         (lit.negated ? g.del : g.add).push_back(std::move(atom));
                       }
                       t.action_index.emplace(g.head, t.actions.size());
                       t.actions.push_back(std::move(g));
                     });
  }
  for (const auto& m : d.methods) {
    for_each_binding(param_domains(d, p, m.params), m.params,
                     [&](const Binding& b, const std::vector<std::string>& values) {
                       GroundMethod g;
                       g.name = m.name;
                       g.args = values;
                       g.task = {m.task.name, resolve_all(m.task.args, b)};
                       g.pre = ground_condition(m.precondition, b);
                       for (const auto& st : m.subtasks.tasks) {
                         g.subtasks.push_back({st.task.name, resolve_all(st.task.args, b)});
                       }
                       t.methods_for[g.task].push_back(t.methods.size());
                       t.methods.push_back(std::move(g));
                     });
  }
  return t;
}

GroundAtom ground_atom(const Atom& a) {
  for (const auto& arg : a.args) {
    if (is_variable(arg)) throw ParseError("atom " + print_atom(a) + " is not ground", a.pos);
  }
  return {a.name, a.args};
}

GroundTask ground_task(const Atom& a) {
  for (const auto& arg : a.args) {
    if (is_variable(arg)) throw ParseError("task " + print_atom(a) + " is not ground", a.pos);
  }
  return {a.name, a.args};
}

State initial_state(const Problem& p) {
  State s;
  for (const auto& a : p.init) s.insert(ground_atom(a));
  return s;
}

std::vector<GroundTask> initial_network(const Problem& p) {
  std::vector<GroundTask> w;
  for (const auto& t : p.htn.tasks) w.push_back(ground_task(t.task));
  return w;
}

std::optional<GroundCondition> ground_goal(const Problem& p) {
  if (!p.goal) return std::nullopt;
  return ground_condition(*p.goal, {});
}

}  // namespace uuvnav::hddl
