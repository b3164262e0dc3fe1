#include <algorithm>
#include <map>
#include <set>

#include "sexpr.hpp"
#include "uuvnav/hddl.hpp"

namespace uuvnav::hddl {

using detail::SExpr;

const PredicateDecl* Domain::find_predicate(std::string_view n) const {
  for (const auto& p : predicates) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

const TaskDecl* Domain::find_task(std::string_view n) const {
  for (const auto& t : tasks) {
    if (t.name == n) return &t;
  }
  return nullptr;
}

const ActionDef* Domain::find_action(std::string_view n) const {
  for (const auto& a : actions) {
    if (a.name == n) return &a;
  }
  return nullptr;
}

bool Domain::has_type(std::string_view type) const {
  if (type == "object") return true;
  return std::any_of(types.begin(), types.end(),
                     [&](const TypeDecl& t) { return t.name == type; });
}

bool Domain::is_subtype(std::string_view type, std::string_view ancestor) const {
  std::string current(type);
  // Bounded walk; declared hierarchies are checked acyclic at parse time.
  for (std::size_t hops = 0; hops <= types.size() + 1; ++hops) {
    if (current == ancestor) return true;
    if (current == "object") return false;
    auto it = std::find_if(types.begin(), types.end(),
                           [&](const TypeDecl& t) { return t.name == current; });
    if (it == types.end()) return false;
    current = it->parent;
  }
  return false;
}

namespace {

const std::set<std::string> kSupportedRequirements{
    ":typing", ":hierarchy", ":method-preconditions", ":negative-preconditions"};

const std::set<std::string> kTemporalRequirements{
    ":durative-actions", ":duration-inequalities", ":timed-initial-literals",
    ":continuous-effects", ":time", ":temporal", ":durative-tasks"};

[[noreturn]] void temporal_out_of_scope(const std::string& construct, SourcePos pos) {
  throw ParseError("temporal construct '" + construct +
                       "' is not supported: temporal HDDL (2.1) is out of scope, only "
                       "untimed totally ordered HDDL 1.0 is accepted",
                   pos);
}

const SExpr& expect_list(const SExpr& node, const std::string& what) {
  if (!node.is_list) throw ParseError("expected a list for " + what, node.pos);
  return node;
}

const std::string& expect_symbol(const SExpr& node, const std::string& what) {
  if (node.is_list) throw ParseError("expected a name for " + what, node.pos);
  return node.symbol;
}

// Reads `:keyword value` pairs from items[start..].
std::vector<std::pair<const SExpr*, const SExpr*>> keyword_pairs(const SExpr& list,
                                                                 std::size_t start,
                                                                 const std::string& owner) {
  std::vector<std::pair<const SExpr*, const SExpr*>> out;
  for (std::size_t i = start; i < list.items.size(); i += 2) {
    const SExpr& key = list.items[i];
    if (key.is_list || key.symbol.empty() || key.symbol[0] != ':') {
      throw ParseError("expected a :keyword in " + owner, key.pos);
    }
    if (key.symbol == ":duration") temporal_out_of_scope(":duration", key.pos);
    if (i + 1 >= list.items.size()) {
      throw ParseError("keyword " + key.symbol + " in " + owner + " has no value", key.pos);
    }
    out.emplace_back(&key, &list.items[i + 1]);
  }
  return out;
}

std::vector<TypedName> parse_typed_list(const SExpr& list, std::size_t start,
                                        const std::string& what) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = start; i < list.items.size(); ++i) {
    const SExpr& item = list.items[i];
    if (item.is_list) throw ParseError("unexpected list in " + what, item.pos);
    if (item.symbol == "-") {
      if (i + 1 >= list.items.size()) throw ParseError("missing type after '-'", item.pos);
      const SExpr& type = list.items[i + 1];
      if (type.is_list) {
        if (!type.items.empty() && type.items[0].is_symbol("either")) {
          throw ParseError("'either' types are not supported", type.pos);
        }
        throw ParseError("expected a type name after '-'", type.pos);
      }
      if (pending == 0) throw ParseError("type '" + type.symbol + "' names nothing", item.pos);
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = type.symbol;
      pending = 0;
      ++i;
      continue;
    }
    out.push_back({item.symbol, "object", item.pos});
    ++pending;
  }
  return out;
}

Atom parse_atom(const SExpr& node, const std::string& what) {
  expect_list(node, what);
  if (node.items.empty()) throw ParseError("empty " + what, node.pos);
  Atom atom;
  atom.pos = node.pos;
  atom.name = expect_symbol(node.items[0], what);
  for (std::size_t i = 1; i < node.items.size(); ++i) {
    atom.args.push_back(expect_symbol(node.items[i], "argument of " + atom.name));
  }
  return atom;
}

void reject_unsupported_connective(const SExpr& head, const SExpr& node) {
  static const std::set<std::string> kUnsupported{"or", "imply", "forall", "exists", "when"};
  if (!head.is_list && kUnsupported.count(head.symbol)) {
    throw ParseError("'" + head.symbol +
                         "' is not supported: formulas must be conjunctions of literals",
                     node.pos);
  }
  // (at <time-spec> <formula>) and (over ...) wrap a formula; a predicate
  // that happens to be named "at" only has symbol arguments.
  const bool wraps_formula = node.items.size() == 3 && node.items[2].is_list;
  if (!head.is_list && (head.symbol == "at" || head.symbol == "over") && wraps_formula) {
    temporal_out_of_scope(head.symbol, node.pos);
  }
}

void parse_conjunction_into(const SExpr& node, Conjunction& out, const std::string& what) {
  expect_list(node, what);
  if (node.items.empty()) return;
  const SExpr& head = node.items[0];
  reject_unsupported_connective(head, node);
  if (head.is_symbol("and")) {
    for (std::size_t i = 1; i < node.items.size(); ++i) {
      parse_conjunction_into(node.items[i], out, what);
    }
    return;
  }
  if (head.is_symbol("not")) {
    if (node.items.size() != 2) throw ParseError("'not' takes exactly one literal", node.pos);
    const SExpr& inner = expect_list(node.items[1], "negated literal");
    if (!inner.items.empty()) reject_unsupported_connective(inner.items[0], inner);
    if (!inner.items.empty() && (inner.items[0].is_symbol("and") ||
                                 inner.items[0].is_symbol("not"))) {
      throw ParseError("only atoms may be negated", inner.pos);
    }
    out.push_back({parse_atom(inner, "negated atom"), true});
    return;
  }
  out.push_back({parse_atom(node, what), false});
}

Conjunction parse_conjunction(const SExpr& node, const std::string& what) {
  Conjunction out;
  parse_conjunction_into(node, out, what);
  return out;
}

TaskNetwork parse_subtasks(const SExpr& node, const std::string& owner) {
  expect_list(node, "subtasks of " + owner);
  TaskNetwork net;
  std::vector<const SExpr*> entries;
  if (!node.items.empty() && node.items[0].is_symbol("and")) {
    for (std::size_t i = 1; i < node.items.size(); ++i) entries.push_back(&node.items[i]);
  } else if (!node.items.empty()) {
    entries.push_back(&node);
  }
  for (const SExpr* e : entries) {
    expect_list(*e, "subtask of " + owner);
    TaskRef ref;
    if (e->items.size() == 2 && !e->items[0].is_list && e->items[1].is_list) {
      ref.id = e->items[0].symbol;
      ref.task = parse_atom(e->items[1], "subtask of " + owner);
    } else {
      ref.task = parse_atom(*e, "subtask of " + owner);
    }
    net.tasks.push_back(std::move(ref));
  }
  std::set<std::string> used;
  for (const auto& t : net.tasks) {
    if (!t.id.empty()) used.insert(t.id);
  }
  std::size_t counter = 0;
  for (auto& t : net.tasks) {
    if (!t.id.empty()) continue;
    std::string id;
    do {
      id = "task" + std::to_string(counter++);
    } while (used.count(id));
    used.insert(id);
    t.id = id;
  }
  std::set<std::string> seen;
  for (const auto& t : net.tasks) {
    if (!seen.insert(t.id).second) {
      throw ParseError("duplicate task identifier '" + t.id + "' in " + owner, t.task.pos);
    }
  }
  return net;
}

bool is_subtask_key(const std::string& k) {
  return k == ":ordered-subtasks" || k == ":ordered-tasks" || k == ":subtasks" ||
         k == ":tasks";
}

// Handles the ordering keywords shared by methods and the problem :htn block.
void check_total_order(const std::string& key, const TaskNetwork& net, bool has_ordering,
                       const std::string& owner, SourcePos pos) {
  const bool ordered = key == ":ordered-subtasks" || key == ":ordered-tasks";
  if (has_ordering) {
    throw ParseError("partial-order task networks are not supported in " + owner +
                         ": use :ordered-subtasks",
                     pos);
  }
  if (!ordered && net.size() > 1) {
    throw ParseError("unordered " + key + " in " + owner +
                         " is partial-order syntax; only totally ordered networks "
                         "(:ordered-subtasks) are supported",
                     pos);
  }
}

// ---------------------------------------------------------------------------
// Validation against the declared language.

using Scope = std::map<std::string, std::string>;

class Checker {
 public:
  explicit Checker(const Domain& d) : d_(d) {}

  void add_object(const TypedName& o) { objects_[o.name] = o.type; }

  std::string term_type(const std::string& term, const Scope& scope, SourcePos pos,
                        const std::string& owner) const {
    if (is_variable(term)) {
      auto it = scope.find(term);
      if (it == scope.end()) {
        throw ParseError("undeclared variable " + term + " in " + owner, pos);
      }
      return it->second;
    }
    auto it = objects_.find(term);
    if (it == objects_.end()) {
      throw ParseError("unknown constant or object '" + term + "' in " + owner, pos);
    }
    return it->second;
  }

  void check_args(const Atom& atom, const std::vector<TypedName>& params, const Scope& scope,
                  const std::string& kind, const std::string& owner) const {
    if (atom.args.size() != params.size()) {
      throw ParseError("arity mismatch: " + kind + " '" + atom.name + "' takes " +
                           std::to_string(params.size()) + " argument(s), " + owner +
                           " gives " + std::to_string(atom.args.size()),
                       atom.pos);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const std::string t = term_type(atom.args[i], scope, atom.pos, owner);
      if (!d_.is_subtype(t, params[i].type)) {
        throw ParseError("argument " + std::to_string(i + 1) + " of " + kind + " '" +
                             atom.name + "' in " + owner + " has type '" + t +
                             "', expected '" + params[i].type + "'",
                         atom.pos);
      }
    }
  }

  void check_literal(const Literal& lit, const Scope& scope, const std::string& owner) const {
    const Atom& a = lit.atom;
    if (a.name == "=") {
      if (a.args.size() != 2) throw ParseError("'=' takes two arguments", a.pos);
      for (const auto& arg : a.args) term_type(arg, scope, a.pos, owner);
      return;
    }
    const PredicateDecl* p = d_.find_predicate(a.name);
    if (!p) throw ParseError("undeclared predicate '" + a.name + "' in " + owner, a.pos);
    check_args(a, p->params, scope, "predicate", owner);
  }

  void check_conjunction(const Conjunction& c, const Scope& scope,
                         const std::string& owner) const {
    for (const auto& lit : c) check_literal(lit, scope, owner);
  }

  void check_task(const Atom& a, const Scope& scope, const std::string& owner) const {
    if (const TaskDecl* t = d_.find_task(a.name)) {
      check_args(a, t->params, scope, "task", owner);
    } else if (const ActionDef* act = d_.find_action(a.name)) {
      check_args(a, act->params, scope, "task", owner);
    } else {
      throw ParseError("undeclared task '" + a.name + "' in " + owner, a.pos);
    }
  }

  void check_param_types(const std::vector<TypedName>& params, const std::string& owner) const {
    std::set<std::string> seen;
    for (const auto& p : params) {
      if (!d_.has_type(p.type)) {
        throw ParseError("undeclared type '" + p.type + "' in " + owner, p.pos);
      }
      if (!seen.insert(p.name).second) {
        throw ParseError("duplicate parameter " + p.name + " in " + owner, p.pos);
      }
    }
  }

  static Scope scope_of(const std::vector<TypedName>& params) {
    Scope s;
    for (const auto& p : params) s[p.name] = p.type;
    return s;
  }

 private:
  const Domain& d_;
  std::map<std::string, std::string> objects_;
};

void validate_domain(const Domain& d) {
  std::set<std::string> type_names{"object"};
  for (const auto& t : d.types) {
    if (t.name == "object") continue;
    if (!type_names.insert(t.name).second) {
      throw ParseError("duplicate type '" + t.name + "'", t.pos);
    }
  }
  for (const auto& t : d.types) {
    if (!type_names.count(t.parent)) {
      throw ParseError("undeclared type '" + t.parent + "' used as parent of '" + t.name + "'",
                       t.pos);
    }
    // Cycle check: walking parents must reach object.
    std::string cur = t.name;
    std::size_t hops = 0;
    while (cur != "object") {
      auto it = std::find_if(d.types.begin(), d.types.end(),
                             [&](const TypeDecl& x) { return x.name == cur; });
      if (it == d.types.end() || ++hops > d.types.size()) {
        throw ParseError("cyclic type hierarchy through '" + t.name + "'", t.pos);
      }
      cur = it->parent;
    }
  }

  Checker check(d);
  std::set<std::string> constant_names;
  for (const auto& c : d.constants) {
    if (!d.has_type(c.type)) throw ParseError("undeclared type '" + c.type + "'", c.pos);
    if (!constant_names.insert(c.name).second) {
      throw ParseError("duplicate constant '" + c.name + "'", c.pos);
    }
    check.add_object(c);
  }

  std::set<std::string> names;
  for (const auto& p : d.predicates) {
    if (!names.insert(p.name).second) {
      throw ParseError("duplicate predicate '" + p.name + "'", p.pos);
    }
    check.check_param_types(p.params, "predicate '" + p.name + "'");
  }
  names.clear();
  for (const auto& t : d.tasks) {
    if (!names.insert(t.name).second) throw ParseError("duplicate task '" + t.name + "'", t.pos);
    check.check_param_types(t.params, "task '" + t.name + "'");
  }
  for (const auto& a : d.actions) {
    if (!names.insert(a.name).second) {
      throw ParseError("duplicate task or action name '" + a.name + "'", a.pos);
    }
    const std::string owner = "action '" + a.name + "'";
    check.check_param_types(a.params, owner);
    const Scope scope = Checker::scope_of(a.params);
    check.check_conjunction(a.precondition, scope, owner);
    for (const auto& lit : a.effect) {
      if (lit.atom.name == "=") throw ParseError("equality cannot be an effect", lit.atom.pos);
    }
    check.check_conjunction(a.effect, scope, owner);
  }
  std::set<std::string> method_names;
  for (const auto& m : d.methods) {
    const std::string owner = "method '" + m.name + "'";
    if (!method_names.insert(m.name).second) {
      throw ParseError("duplicate method '" + m.name + "'", m.pos);
    }
    check.check_param_types(m.params, owner);
    if (!d.find_task(m.task.name)) {
      if (d.find_action(m.task.name)) {
        throw ParseError(owner + " must decompose an abstract task, but '" + m.task.name +
                             "' is primitive",
                         m.task.pos);
      }
      throw ParseError(owner + " decomposes undeclared task '" + m.task.name + "'",
                       m.task.pos);
    }
    const Scope scope = Checker::scope_of(m.params);
    check.check_task(m.task, scope, owner);
    check.check_conjunction(m.precondition, scope, owner);
    for (const auto& st : m.subtasks.tasks) check.check_task(st.task, scope, owner);
  }
}

ActionDef parse_action(const SExpr& node) {
  ActionDef a;
  a.pos = node.pos;
  if (node.items.size() < 2) throw ParseError("action needs a name", node.pos);
  a.name = expect_symbol(node.items[1], "action name");
  const std::string owner = "action '" + a.name + "'";
  for (auto [key, value] : keyword_pairs(node, 2, owner)) {
    const std::string& k = key->symbol;
    if (k == ":parameters") {
      a.params = parse_typed_list(expect_list(*value, "parameters"), 0, "parameters");
    } else if (k == ":precondition") {
      a.precondition = parse_conjunction(*value, "precondition of " + owner);
    } else if (k == ":effect") {
      a.effect = parse_conjunction(*value, "effect of " + owner);
    } else {
      throw ParseError("unknown keyword " + k + " in " + owner, key->pos);
    }
  }
  return a;
}

MethodDef parse_method(const SExpr& node) {
  MethodDef m;
  m.pos = node.pos;
  if (node.items.size() < 2) throw ParseError("method needs a name", node.pos);
  m.name = expect_symbol(node.items[1], "method name");
  const std::string owner = "method '" + m.name + "'";
  bool have_task = false;
  bool has_ordering = false;
  std::string subtask_key = ":ordered-subtasks";
  SourcePos subtask_pos = node.pos;
  for (auto [key, value] : keyword_pairs(node, 2, owner)) {
    const std::string& k = key->symbol;
    if (k == ":parameters") {
      m.params = parse_typed_list(expect_list(*value, "parameters"), 0, "parameters");
    } else if (k == ":task") {
      m.task = parse_atom(*value, "task of " + owner);
      have_task = true;
    } else if (k == ":precondition") {
      m.precondition = parse_conjunction(*value, "precondition of " + owner);
    } else if (is_subtask_key(k)) {
      m.subtasks = parse_subtasks(*value, owner);
      subtask_key = k;
      subtask_pos = key->pos;
    } else if (k == ":ordering" || k == ":order" || k == ":constraints") {
      if (!value->empty_list()) has_ordering = true;
      subtask_pos = key->pos;
    } else {
      throw ParseError("unknown keyword " + k + " in " + owner, key->pos);
    }
  }
  if (!have_task) throw ParseError(owner + " has no :task", node.pos);
  check_total_order(subtask_key, m.subtasks, has_ordering, owner, subtask_pos);
  return m;
}

}  // namespace

Domain parse_domain(std::string_view text) {
  const SExpr root = detail::read_sexpr(text);
  if (root.items.size() < 2 || !root.items[0].is_symbol("define")) {
    throw ParseError("expected (define (domain <name>) ...)", root.pos);
  }
  const SExpr& header = expect_list(root.items[1], "domain header");
  if (header.items.size() != 2 || !header.items[0].is_symbol("domain")) {
    throw ParseError("expected (domain <name>)", header.pos);
  }
  Domain d;
  d.pos = root.pos;
  d.name = expect_symbol(header.items[1], "domain name");

  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "domain section");
    if (section.items.empty() || section.items[0].is_list) {
      throw ParseError("expected a (:section ...)", section.pos);
    }
    const std::string& kind = section.items[0].symbol;
    if (kind == ":requirements") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const std::string& req = expect_symbol(section.items[k], "requirement");
        if (kTemporalRequirements.count(req)) {
          temporal_out_of_scope(req, section.items[k].pos);
        }
        if (!kSupportedRequirements.count(req)) {
          throw ParseError("unknown requirement '" + req + "'", section.items[k].pos);
        }
        d.requirements.push_back(req);
      }
    } else if (kind == ":types") {
      for (const auto& t : parse_typed_list(section, 1, "types")) {
        d.types.push_back({t.name, t.type, t.pos});
      }
    } else if (kind == ":constants") {
      auto cs = parse_typed_list(section, 1, "constants");
      d.constants.insert(d.constants.end(), cs.begin(), cs.end());
    } else if (kind == ":predicates") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const SExpr& p = expect_list(section.items[k], "predicate declaration");
        if (p.items.empty()) throw ParseError("empty predicate declaration", p.pos);
        d.predicates.push_back({expect_symbol(p.items[0], "predicate name"),
                                parse_typed_list(p, 1, "predicate parameters"), p.pos});
      }
    } else if (kind == ":task") {
      if (section.items.size() < 2) throw ParseError("task needs a name", section.pos);
      TaskDecl t;
      t.pos = section.pos;
      t.name = expect_symbol(section.items[1], "task name");
      for (auto [key, value] : keyword_pairs(section, 2, "task '" + t.name + "'")) {
        if (key->symbol != ":parameters") {
          throw ParseError("unknown keyword " + key->symbol + " in task '" + t.name + "'",
                           key->pos);
        }
        t.params = parse_typed_list(expect_list(*value, "parameters"), 0, "parameters");
      }
      d.tasks.push_back(std::move(t));
    } else if (kind == ":action") {
      d.actions.push_back(parse_action(section));
    } else if (kind == ":method") {
      d.methods.push_back(parse_method(section));
    } else if (kind == ":durative-action") {
      temporal_out_of_scope(kind, section.pos);
    } else {
      throw ParseError("unsupported domain section '" + kind + "'", section.pos);
    }
  }
  validate_domain(d);
  return d;
}

Problem parse_problem(std::string_view text, const Domain& domain) {
  const SExpr root = detail::read_sexpr(text);
  if (root.items.size() < 2 || !root.items[0].is_symbol("define")) {
    throw ParseError("expected (define (problem <name>) ...)", root.pos);
  }
  const SExpr& header = expect_list(root.items[1], "problem header");
  if (header.items.size() != 2 || !header.items[0].is_symbol("problem")) {
    throw ParseError("expected (problem <name>)", header.pos);
  }
  Problem p;
  p.pos = root.pos;
  p.name = expect_symbol(header.items[1], "problem name");

  Checker check(domain);
  for (const auto& c : domain.constants) check.add_object(c);

  bool have_domain = false;
  const SExpr* htn = nullptr;
  const SExpr* init = nullptr;
  const SExpr* goal = nullptr;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "problem section");
    if (section.items.empty() || section.items[0].is_list) {
      throw ParseError("expected a (:section ...)", section.pos);
    }
    const std::string& kind = section.items[0].symbol;
    if (kind == ":domain") {
      if (section.items.size() != 2) throw ParseError("expected (:domain <name>)", section.pos);
      p.domain_name = expect_symbol(section.items[1], "domain name");
      if (p.domain_name != domain.name) {
        throw ParseError("problem '" + p.name + "' refers to domain '" + p.domain_name +
                             "' but the loaded domain is '" + domain.name + "'",
                         section.items[1].pos);
      }
      have_domain = true;
    } else if (kind == ":objects") {
      for (auto& o : parse_typed_list(section, 1, "objects")) {
        if (!domain.has_type(o.type)) {
          throw ParseError("object '" + o.name + "' has undeclared type '" + o.type + "'",
                           o.pos);
        }
        p.objects.push_back(o);
      }
    } else if (kind == ":htn") {
      htn = &section;
    } else if (kind == ":init") {
      init = &section;
    } else if (kind == ":goal") {
      goal = &section;
    } else if (kind == ":requirements") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const std::string& req = expect_symbol(section.items[k], "requirement");
        if (kTemporalRequirements.count(req)) temporal_out_of_scope(req, section.items[k].pos);
        if (!kSupportedRequirements.count(req)) {
          throw ParseError("unknown requirement '" + req + "'", section.items[k].pos);
        }
      }
    } else {
      throw ParseError("unsupported problem section '" + kind + "'", section.pos);
    }
  }
  if (!have_domain) throw ParseError("problem has no (:domain ...) section", root.pos);

  std::set<std::string> object_names;
  for (const auto& c : domain.constants) object_names.insert(c.name);
  for (const auto& o : p.objects) {
    if (!object_names.insert(o.name).second) {
      throw ParseError("duplicate object '" + o.name + "'", o.pos);
    }
    check.add_object(o);
  }

  const Scope ground_scope;
  if (htn) {
    bool has_ordering = false;
    std::string subtask_key = ":ordered-subtasks";
    for (auto [key, value] : keyword_pairs(*htn, 1, ":htn")) {
      const std::string& k = key->symbol;
      if (k == ":parameters") {
        if (!expect_list(*value, "htn parameters").items.empty()) {
          throw ParseError("parameters in the initial task network are not supported",
                           value->pos);
        }
      } else if (is_subtask_key(k)) {
        p.htn = parse_subtasks(*value, "the initial task network");
        subtask_key = k;
      } else if (k == ":ordering" || k == ":order" || k == ":constraints") {
        if (!value->empty_list()) has_ordering = true;
      } else {
        throw ParseError("unknown keyword " + k + " in :htn", key->pos);
      }
    }
    check_total_order(subtask_key, p.htn, has_ordering, "the initial task network",
                      htn->pos);
    for (const auto& t : p.htn.tasks) check.check_task(t.task, ground_scope, "the :htn block");
  }
  if (init) {
    for (std::size_t k = 1; k < init->items.size(); ++k) {
      const SExpr& item = init->items[k];
      if (item.is_list && !item.items.empty() && item.items[0].is_symbol("not")) {
        throw ParseError("negative literals are not allowed in :init", item.pos);
      }
      if (item.is_list && item.items.size() == 3 && item.items[0].is_symbol("at") &&
          item.items[2].is_list) {
        temporal_out_of_scope("at", item.pos);
      }
      Atom a = parse_atom(item, "init atom");
      if (a.name == "=") throw ParseError("equality is not allowed in :init", a.pos);
      check.check_literal({a, false}, ground_scope, ":init");
      p.init.push_back(std::move(a));
    }
  }
  if (goal) {
    if (goal->items.size() != 2) throw ParseError("expected (:goal <formula>)", goal->pos);
    Conjunction g = parse_conjunction(goal->items[1], "goal");
    check.check_conjunction(g, ground_scope, ":goal");
    p.goal = std::move(g);
  }
  return p;
}

}  // namespace uuvnav::hddl
