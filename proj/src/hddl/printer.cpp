#include <sstream>

#include "uuvnav/hddl.hpp"

namespace uuvnav::hddl {

namespace {

std::string typed_list(const std::vector<TypedName>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].name;
    // Group consecutive names of the same type: "?a ?b - t".
    if (i + 1 == items.size() || items[i + 1].type != items[i].type) {
      out += " - " + items[i].type;
    }
  }
  return out;
}

std::string literal(const Literal& l) {
  return l.negated ? "(not " + print_atom(l.atom) + ")" : print_atom(l.atom);
}

std::string conjunction(const Conjunction& c) {
  if (c.empty()) return "()";
  if (c.size() == 1) return literal(c[0]);
  std::string out = "(and";
  for (const auto& l : c) out += " " + literal(l);
  return out + ")";
}

std::string network(const TaskNetwork& net, const std::string& indent) {
  if (net.tasks.empty()) return "()";
  std::string out = "(and";
  for (const auto& t : net.tasks) {
    out += "\n" + indent + "  (" + t.id + " " + print_atom(t.task) + ")";
  }
  return out + ")";
}

}  // namespace

std::string print_atom(const Atom& atom) {
  std::string out = "(" + atom.name;
  for (const auto& a : atom.args) out += " " + a;
  return out + ")";
}

std::string print_domain(const Domain& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& r : d.requirements) out << ' ' << r;
    out << ")\n";
  }
  if (!d.types.empty()) {
    out << "  (:types";
    for (const auto& t : d.types) out << ' ' << t.name << " - " << t.parent;
    out << ")\n";
  }
  if (!d.constants.empty()) out << "  (:constants " << typed_list(d.constants) << ")\n";
  if (!d.predicates.empty()) {
    out << "  (:predicates";
    for (const auto& p : d.predicates) {
      out << "\n    (" << p.name;
      if (!p.params.empty()) out << ' ' << typed_list(p.params);
      out << ')';
    }
    out << ")\n";
  }
  for (const auto& t : d.tasks) {
    out << "  (:task " << t.name << " :parameters (" << typed_list(t.params) << "))\n";
  }
  for (const auto& m : d.methods) {
    out << "  (:method " << m.name << "\n"
        << "    :parameters (" << typed_list(m.params) << ")\n"
        << "    :task " << print_atom(m.task) << "\n";
    if (!m.precondition.empty()) {
      out << "    :precondition " << conjunction(m.precondition) << "\n";
    }
    out << "    :ordered-subtasks " << network(m.subtasks, "    ") << ")\n";
  }
  for (const auto& a : d.actions) {
    out << "  (:action " << a.name << "\n"
        << "    :parameters (" << typed_list(a.params) << ")\n";
    if (!a.precondition.empty()) {
      out << "    :precondition " << conjunction(a.precondition) << "\n";
    }
    out << "    :effect " << conjunction(a.effect) << ")\n";
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const Problem& p) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n"
      << "  (:domain " << p.domain_name << ")\n";
  if (!p.objects.empty()) out << "  (:objects " << typed_list(p.objects) << ")\n";
  out << "  (:htn\n"
      << "    :parameters ()\n"
      << "    :ordered-subtasks " << network(p.htn, "    ") << ")\n";
  out << "  (:init";
  for (const auto& a : p.init) out << "\n    " << print_atom(a);
  out << ")\n";
  if (p.goal) out << "  (:goal " << conjunction(*p.goal) << ")\n";
  out << ")\n";
  return out.str();
}

}  // namespace uuvnav::hddl
