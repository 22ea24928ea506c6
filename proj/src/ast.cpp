#include "choo/ast.hpp"

#include <algorithm>
#include <optional>

namespace choo {

Expr int_lit(std::int64_t v) { return Expr{IntLit{v}}; }
Expr logic_ref(std::string name) { return Expr{VarRef{std::move(name), NameScope::Logic}}; }
Expr store_ref(std::string name) { return Expr{VarRef{std::move(name), NameScope::Store}}; }
Expr binop(ArithOp op, Expr lhs, Expr rhs) { return Expr{BinOp{op, std::move(lhs), std::move(rhs)}}; }
Expr builtin(Builtin fn, Expr arg) { return Expr{FunCall{fn, std::move(arg)}}; }

Expr term_lit(Term t) {
  if (t.is_int()) return int_lit(t.as_int());
  return Expr{TermLit{std::move(t)}};
}

Expr construct(std::string functor, std::vector<Expr> args) {
  std::vector<Box<Expr>> boxed(args.begin(), args.end());
  return Expr{Construct{std::move(functor), std::move(boxed)}};
}

Goal call(std::string name, std::vector<Expr> args) { return Goal{Call{std::move(name), std::move(args)}}; }
Goal cond(RelOp op, Expr lhs, Expr rhs) { return Goal{Cond{Condition{op, std::move(lhs), std::move(rhs)}}}; }
Goal assign(std::string target, Expr value) { return Goal{Assign{std::move(target), std::move(value)}}; }
Goal seq(Goal first, Goal second) { return Goal{Seq{std::move(first), std::move(second)}}; }
Goal choose(std::string var, Goal body) { return Goal{Choose{std::move(var), std::move(body)}}; }
Goal bounded_choose(std::string var, ChoiceSet set, Goal body) {
  return Goal{BoundedChoose{std::move(var), std::move(set), std::move(body)}};
}

std::vector<Term> distinct_elements(const EnumSet& s) {
  std::vector<Term> out;
  for (const auto& t : s.elements) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------- substitution

namespace {

// nullopt means "no occurrence below here"; callers then keep the original
// node so untouched subtrees stay shared.
std::optional<Expr> subst_e(const Expr& e, const std::string& var, const Expr& rep);
std::optional<Goal> subst_g(const Goal& g, const std::string& var, const Expr& rep);

Box<Expr> pick(const Box<Expr>& b, std::optional<Expr> e) { return e ? Box<Expr>(std::move(*e)) : b; }
Box<Goal> pick(const Box<Goal>& b, std::optional<Goal> g) { return g ? Box<Goal>(std::move(*g)) : b; }
Expr pick(const Expr& b, std::optional<Expr> e) { return e ? std::move(*e) : b; }

std::optional<Expr> subst_e(const Expr& e, const std::string& var, const Expr& rep) {
  return std::visit(
      [&](const auto& n) -> std::optional<Expr> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarRef>) {
          if (n.scope == NameScope::Logic && n.name == var) return rep;
          return std::nullopt;
        } else if constexpr (std::is_same_v<N, BinOp>) {
          auto l = subst_e(*n.lhs, var, rep);
          auto r = subst_e(*n.rhs, var, rep);
          if (!l && !r) return std::nullopt;
          return Expr{BinOp{n.op, pick(n.lhs, std::move(l)), pick(n.rhs, std::move(r))}};
        } else if constexpr (std::is_same_v<N, FunCall>) {
          auto a = subst_e(*n.arg, var, rep);
          if (!a) return std::nullopt;
          return Expr{FunCall{n.fn, Box<Expr>(std::move(*a))}};
        } else if constexpr (std::is_same_v<N, Construct>) {
          bool changed = false;
          Construct c{n.functor, {}};
          for (const auto& a : n.args) {
            auto s = subst_e(*a, var, rep);
            changed = changed || s.has_value();
            c.args.push_back(pick(a, std::move(s)));
          }
          if (!changed) return std::nullopt;
          return Expr{std::move(c)};
        } else {
          return std::nullopt;
        }
      },
      e.node);
}

std::optional<Goal> subst_g(const Goal& g, const std::string& var, const Expr& rep) {
  return std::visit(
      [&](const auto& n) -> std::optional<Goal> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Call>) {
          bool changed = false;
          Call c{n.name, {}};
          for (const auto& a : n.args) {
            auto s = subst_e(a, var, rep);
            changed = changed || s.has_value();
            c.args.push_back(pick(a, std::move(s)));
          }
          if (!changed) return std::nullopt;
          return Goal{std::move(c)};
        } else if constexpr (std::is_same_v<N, Cond>) {
          auto l = subst_e(n.condition.lhs, var, rep);
          auto r = subst_e(n.condition.rhs, var, rep);
          if (!l && !r) return std::nullopt;
          return cond(n.condition.op, pick(n.condition.lhs, std::move(l)),
                      pick(n.condition.rhs, std::move(r)));
        } else if constexpr (std::is_same_v<N, Assign>) {
          auto v = subst_e(n.value, var, rep);
          if (!v) return std::nullopt;
          return assign(n.target, std::move(*v));
        } else if constexpr (std::is_same_v<N, Seq>) {
          auto a = subst_g(*n.first, var, rep);
          auto b = subst_g(*n.second, var, rep);
          if (!a && !b) return std::nullopt;
          return Goal{Seq{pick(n.first, std::move(a)), pick(n.second, std::move(b))}};
        } else if constexpr (std::is_same_v<N, Choose>) {
          if (n.var == var) return std::nullopt;
          auto b = subst_g(*n.body, var, rep);
          if (!b) return std::nullopt;
          return Goal{Choose{n.var, Box<Goal>(std::move(*b))}};
        } else {
          if (n.var == var) return std::nullopt;
          auto b = subst_g(*n.body, var, rep);
          if (!b) return std::nullopt;
          return Goal{BoundedChoose{n.var, n.set, Box<Goal>(std::move(*b))}};
        }
      },
      g.node);
}

}  // namespace

Expr subst_expr(const Expr& e, const std::string& var, const Expr& rep) {
  auto r = subst_e(e, var, rep);
  return r ? std::move(*r) : e;
}

Goal subst_goal(const Goal& g, const std::string& var, const Expr& rep) {
  auto r = subst_g(g, var, rep);
  return r ? std::move(*r) : g;
}

Goal subst_goal(const Goal& g, const std::string& var, const Term& t) {
  return subst_goal(g, var, term_lit(t));
}

// ---------------------------------------------------------------- free names

namespace {

void collect_expr_names(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarRef>) {
          if (n.scope == NameScope::Logic) out.insert(n.name);
        } else if constexpr (std::is_same_v<N, BinOp>) {
          collect_expr_names(*n.lhs, out);
          collect_expr_names(*n.rhs, out);
        } else if constexpr (std::is_same_v<N, FunCall>) {
          collect_expr_names(*n.arg, out);
        } else if constexpr (std::is_same_v<N, Construct>) {
          for (const auto& a : n.args) collect_expr_names(*a, out);
        }
      },
      e.node);
}

void collect_goal_names(const Goal& g, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Call>) {
          for (const auto& a : n.args) collect_expr_names(a, out);
        } else if constexpr (std::is_same_v<N, Cond>) {
          collect_expr_names(n.condition.lhs, out);
          collect_expr_names(n.condition.rhs, out);
        } else if constexpr (std::is_same_v<N, Assign>) {
          collect_expr_names(n.value, out);
        } else if constexpr (std::is_same_v<N, Seq>) {
          collect_goal_names(*n.first, out);
          collect_goal_names(*n.second, out);
        } else {
          std::set<std::string> inner;
          collect_goal_names(*n.body, inner);
          inner.erase(n.var);
          out.insert(inner.begin(), inner.end());
        }
      },
      g.node);
}

void collect_expr_term_vars(const Expr& e, std::set<VarId>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TermLit>) {
          auto vs = free_vars(n.term);
          out.insert(vs.begin(), vs.end());
        } else if constexpr (std::is_same_v<N, BinOp>) {
          collect_expr_term_vars(*n.lhs, out);
          collect_expr_term_vars(*n.rhs, out);
        } else if constexpr (std::is_same_v<N, FunCall>) {
          collect_expr_term_vars(*n.arg, out);
        } else if constexpr (std::is_same_v<N, Construct>) {
          for (const auto& a : n.args) collect_expr_term_vars(*a, out);
        }
      },
      e.node);
}

void collect_goal_term_vars(const Goal& g, std::set<VarId>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Call>) {
          for (const auto& a : n.args) collect_expr_term_vars(a, out);
        } else if constexpr (std::is_same_v<N, Cond>) {
          collect_expr_term_vars(n.condition.lhs, out);
          collect_expr_term_vars(n.condition.rhs, out);
        } else if constexpr (std::is_same_v<N, Assign>) {
          collect_expr_term_vars(n.value, out);
        } else if constexpr (std::is_same_v<N, Seq>) {
          collect_goal_term_vars(*n.first, out);
          collect_goal_term_vars(*n.second, out);
        } else {
          collect_goal_term_vars(*n.body, out);
        }
      },
      g.node);
}

}  // namespace

std::set<std::string> free_vars_expr(const Expr& e) {
  std::set<std::string> out;
  collect_expr_names(e, out);
  return out;
}

std::set<std::string> free_vars_goal(const Goal& g) {
  std::set<std::string> out;
  collect_goal_names(g, out);
  return out;
}

std::set<VarId> term_vars_goal(const Goal& g) {
  std::set<VarId> out;
  collect_goal_term_vars(g, out);
  return out;
}

std::size_t binder_count(const Goal& g) {
  return std::visit(
      [](const auto& n) -> std::size_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Seq>) {
          return binder_count(*n.first) + binder_count(*n.second);
        } else if constexpr (std::is_same_v<N, Choose> || std::is_same_v<N, BoundedChoose>) {
          return 1 + binder_count(*n.body);
        } else {
          return 0;
        }
      },
      g.node);
}

// ---------------------------------------------------------------- printing

const char* to_string(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Neq: return "!=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

const char* to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

const char* to_string(Builtin fn) { return fn == Builtin::Fib ? "fib" : "fact"; }

namespace {

// Raw rendering: variables by internal id, so traces stay unambiguous.
void write_term(const Term& t, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, LogicVar>) {
          out += "_G" + std::to_string(n.id);
        } else if constexpr (std::is_same_v<N, Atom>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, Int>) {
          out += std::to_string(n.value);
        } else {
          out += n.functor + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ',';
            write_term(n.args[i], out);
          }
          out += ')';
        }
      },
      t.node());
}

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<BinOp>(&e.node)) {
    return (b->op == ArithOp::Add || b->op == ArithOp::Sub) ? 1 : 2;
  }
  return 3;
}

void write_expr(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<N, VarRef>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, BinOp>) {
          const int p = precedence(e);
          const bool wrap_l = precedence(*n.lhs) < p;
          const bool wrap_r = precedence(*n.rhs) <= p;
          if (wrap_l) out += '(';
          write_expr(*n.lhs, out);
          if (wrap_l) out += ')';
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          if (wrap_r) out += '(';
          write_expr(*n.rhs, out);
          if (wrap_r) out += ')';
        } else if constexpr (std::is_same_v<N, FunCall>) {
          out += to_string(n.fn);
          out += '(';
          write_expr(*n.arg, out);
          out += ')';
        } else if constexpr (std::is_same_v<N, TermLit>) {
          write_term(n.term, out);
        } else {
          out += n.functor + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ',';
            write_expr(*n.args[i], out);
          }
          out += ')';
        }
      },
      e.node);
}

void write_set(const ChoiceSet& s, std::string& out) {
  if (const auto* r = std::get_if<RangeSet>(&s.node)) {
    out += "{" + std::to_string(r->lo) + ".." + std::to_string(r->hi) + "}";
    return;
  }
  const auto& elems = std::get<EnumSet>(s.node).elements;
  out += '{';
  for (std::size_t i = 0; i < elems.size(); ++i) {
    if (i) out += ", ";
    write_term(elems[i], out);
  }
  out += '}';
}

void write_goal(const Goal& g, std::string& out);

// A goal in `prim` position: sequences need parentheses.
void write_prim(const Goal& g, std::string& out) {
  if (std::holds_alternative<Seq>(g.node)) {
    out += '(';
    write_goal(g, out);
    out += ')';
  } else {
    write_goal(g, out);
  }
}

void write_goal(const Goal& g, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Call>) {
          out += n.name + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            write_expr(n.args[i], out);
          }
          out += ')';
        } else if constexpr (std::is_same_v<N, Cond>) {
          out += to_source(n.condition);
        } else if constexpr (std::is_same_v<N, Assign>) {
          out += n.target + " = ";
          write_expr(n.value, out);
        } else if constexpr (std::is_same_v<N, Seq>) {
          write_prim(*n.first, out);
          out += "; ";
          write_goal(*n.second, out);
        } else if constexpr (std::is_same_v<N, Choose>) {
          out += "choose(" + n.var + ") ";
          write_prim(*n.body, out);
        } else {
          out += "choose(" + n.var + " in ";
          write_set(n.set, out);
          out += ") ";
          write_prim(*n.body, out);
        }
      },
      g.node);
}

std::string expr_sexp(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          return "(int " + std::to_string(n.value) + ")";
        } else if constexpr (std::is_same_v<N, VarRef>) {
          return std::string(n.scope == NameScope::Logic ? "(var " : "(store ") + n.name + ")";
        } else if constexpr (std::is_same_v<N, BinOp>) {
          return std::string("(") + to_string(n.op) + " " + expr_sexp(*n.lhs) + " " +
                 expr_sexp(*n.rhs) + ")";
        } else if constexpr (std::is_same_v<N, FunCall>) {
          return std::string("(") + to_string(n.fn) + " " + expr_sexp(*n.arg) + ")";
        } else if constexpr (std::is_same_v<N, TermLit>) {
          std::string s;
          write_term(n.term, s);
          return (n.term.is_atom() ? "(atom " : "(term ") + s + ")";
        } else {
          std::string s = "(construct " + n.functor;
          for (const auto& a : n.args) s += " " + expr_sexp(*a);
          return s + ")";
        }
      },
      e.node);
}

void dump_goal(const Goal& g, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Call>) {
          out += pad + "call " + n.name;
          for (const auto& a : n.args) out += " " + expr_sexp(a);
          out += "\n";
        } else if constexpr (std::is_same_v<N, Cond>) {
          out += pad + "cond " + to_string(n.condition.op) + " " + expr_sexp(n.condition.lhs) +
                 " " + expr_sexp(n.condition.rhs) + "\n";
        } else if constexpr (std::is_same_v<N, Assign>) {
          out += pad + "assign " + n.target + " " + expr_sexp(n.value) + "\n";
        } else if constexpr (std::is_same_v<N, Seq>) {
          out += pad + "seq\n";
          dump_goal(*n.first, indent + 1, out);
          dump_goal(*n.second, indent + 1, out);
        } else if constexpr (std::is_same_v<N, Choose>) {
          out += pad + "choose " + n.var + "\n";
          dump_goal(*n.body, indent + 1, out);
        } else {
          out += pad + "choose " + n.var + " in ";
          write_set(n.set, out);
          out += "\n";
          dump_goal(*n.body, indent + 1, out);
        }
      },
      g.node);
}

}  // namespace

std::string to_source(const Expr& e) {
  std::string out;
  write_expr(e, out);
  return out;
}

std::string to_source(const Condition& c) {
  return to_source(c.lhs) + " " + to_string(c.op) + " " + to_source(c.rhs);
}

std::string to_source(const ChoiceSet& s) {
  std::string out;
  write_set(s, out);
  return out;
}

std::string to_source(const Goal& g) {
  std::string out;
  write_goal(g, out);
  return out;
}

std::string to_source(const Clause& c) {
  std::string out = c.name + "(";
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    if (i) out += ", ";
    out += c.params[i];
  }
  out += ") { " + to_source(c.body) + " }";
  return out;
}

std::string to_source(const SourceProgram& p) {
  std::string out;
  for (const auto& c : p.clauses) out += to_source(c) + "\n";
  out += "main { " + to_source(p.main) + " }\n";
  return out;
}

std::string dump(const SourceProgram& p) {
  std::string out;
  for (const auto& c : p.clauses) {
    out += "clause " + c.name + "(";
    for (std::size_t i = 0; i < c.params.size(); ++i) {
      if (i) out += ", ";
      out += c.params[i];
    }
    out += ")\n";
    dump_goal(c.body, 1, out);
  }
  out += "main\n";
  dump_goal(p.main, 1, out);
  return out;
}

}  // namespace choo
