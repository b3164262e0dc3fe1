#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uuvnav::hddl {

/// 1-based line and column of a node in its source text. Positions are
/// metadata: they never take part in AST equality, so reformatted text that
/// parses to the same structure compares equal.
struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourcePos pos);
  SourcePos pos() const { return pos_; }
  /// The message without the leading "line:column: ".
  const std::string& detail() const { return detail_; }

 private:
  SourcePos pos_;
  std::string detail_;
};

inline bool is_variable(std::string_view term) { return !term.empty() && term[0] == '?'; }

/// A parameter, constant, or object with its declared type.
struct TypedName {
  std::string name;
  std::string type;
  SourcePos pos;

  friend bool operator==(const TypedName&, const TypedName&) = default;
};

/// Predicate or task application. Arguments are variables (leading '?') or
/// constant/object names. The predicate "=" denotes equality.
struct Atom {
  std::string name;
  std::vector<std::string> args;
  SourcePos pos;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

/// Preconditions and goals are conjunctions of literals; effects are
/// conjunctions where negated literals delete.
using Conjunction = std::vector<Literal>;

struct TypeDecl {
  std::string name;
  std::string parent;
  SourcePos pos;

  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;
  SourcePos pos;

  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

/// Abstract (compound) task declaration.
struct TaskDecl {
  std::string name;
  std::vector<TypedName> params;
  SourcePos pos;

  friend bool operator==(const TaskDecl&, const TaskDecl&) = default;
};

struct ActionDef {
  std::string name;
  std::vector<TypedName> params;
  Conjunction precondition;
  Conjunction effect;
  SourcePos pos;

  friend bool operator==(const ActionDef&, const ActionDef&) = default;
};

/// One entry of a task network: an identifier and the task it stands for.
struct TaskRef {
  std::string id;
  Atom task;

  friend bool operator==(const TaskRef&, const TaskRef&) = default;
};

/// Totally ordered task network: list position is the execution order.
struct TaskNetwork {
  std::vector<TaskRef> tasks;

  std::size_t size() const { return tasks.size(); }
  friend bool operator==(const TaskNetwork&, const TaskNetwork&) = default;
};

struct MethodDef {
  std::string name;
  std::vector<TypedName> params;
  Atom task;
  Conjunction precondition;
  TaskNetwork subtasks;
  SourcePos pos;

  friend bool operator==(const MethodDef&, const MethodDef&) = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDecl> types;
  std::vector<TypedName> constants;
  std::vector<PredicateDecl> predicates;
  std::vector<TaskDecl> tasks;
  std::vector<ActionDef> actions;
  std::vector<MethodDef> methods;
  SourcePos pos;

  const PredicateDecl* find_predicate(std::string_view name) const;
  const TaskDecl* find_task(std::string_view name) const;
  const ActionDef* find_action(std::string_view name) const;
  /// True when `type` equals `ancestor` or inherits from it.
  bool is_subtype(std::string_view type, std::string_view ancestor) const;
  bool has_type(std::string_view type) const;
  /// |T|: abstract tasks plus primitive tasks (actions).
  std::size_t task_symbol_count() const { return tasks.size() + actions.size(); }

  friend bool operator==(const Domain&, const Domain&) = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  TaskNetwork htn;
  std::vector<Atom> init;
  std::optional<Conjunction> goal;
  SourcePos pos;

  friend bool operator==(const Problem&, const Problem&) = default;
};

Domain parse_domain(std::string_view text);
Problem parse_problem(std::string_view text, const Domain& domain);

std::string print_domain(const Domain& domain);
std::string print_problem(const Problem& problem);
std::string print_atom(const Atom& atom);

}  // namespace uuvnav::hddl
