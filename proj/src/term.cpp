#include "choo/term.hpp"

#include <stdexcept>
#include <utility>

namespace choo {

Term Term::var(VarId id, std::string name) {
  return Term(std::make_shared<const Node>(LogicVar{id, std::move(name)}));
}

Term Term::atom(std::string name) {
  return Term(std::make_shared<const Node>(Atom{std::move(name)}));
}

Term Term::integer(std::int64_t value) {
  return Term(std::make_shared<const Node>(Int{value}));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) {
    throw std::invalid_argument("compound term '" + functor + "' needs at least one argument");
  }
  return Term(std::make_shared<const Node>(Compound{std::move(functor), std::move(args)}));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.index() != y.index()) return false;
  switch (x.index()) {
    case 0:
      return std::get<LogicVar>(x).id == std::get<LogicVar>(y).id;
    case 1:
      return std::get<Atom>(x).name == std::get<Atom>(y).name;
    case 2:
      return std::get<Int>(x).value == std::get<Int>(y).value;
    default: {
      const auto& cx = std::get<Compound>(x);
      const auto& cy = std::get<Compound>(y);
      return cx.functor == cy.functor && cx.args == cy.args;
    }
  }
}

bool is_ground(const Term& t) {
  if (t.is_var()) return false;
  if (!t.is_compound()) return true;
  for (const auto& a : t.as_compound().args) {
    if (!is_ground(a)) return false;
  }
  return true;
}

std::optional<Term> Substitution::lookup(VarId id) const {
  auto it = bindings_.find(id);
  if (it == bindings_.end()) return std::nullopt;
  return it->second;
}

void Substitution::bind(VarId id, Term t) { bindings_.insert_or_assign(id, std::move(t)); }

void Substitution::unbind(VarId id) { bindings_.erase(id); }

Term Substitution::walk(Term t) const {
  while (t.is_var()) {
    auto it = bindings_.find(t.as_var().id);
    if (it == bindings_.end()) break;
    t = it->second;
  }
  return t;
}

std::map<VarId, Term> Substitution::sorted_bindings() const {
  return {bindings_.begin(), bindings_.end()};
}

Term apply(const Substitution& s, const Term& t) {
  Term w = s.walk(t);
  if (!w.is_compound()) return w;
  const auto& c = w.as_compound();
  std::vector<Term> args;
  args.reserve(c.args.size());
  bool changed = false;
  for (const auto& a : c.args) {
    args.push_back(apply(s, a));
    changed = changed || !args.back().same_node(a);
  }
  if (!changed) return w;
  return Term::compound(c.functor, std::move(args));
}

bool occurs(VarId v, const Term& t, const Substitution& s) {
  Term w = s.walk(t);
  if (w.is_var()) return w.as_var().id == v;
  if (!w.is_compound()) return false;
  for (const auto& a : w.as_compound().args) {
    if (occurs(v, a, s)) return true;
  }
  return false;
}

namespace {

void collect_free(const Term& t, const Substitution& s, std::set<VarId>& out) {
  Term w = s.walk(t);
  if (w.is_var()) {
    out.insert(w.as_var().id);
  } else if (w.is_compound()) {
    for (const auto& a : w.as_compound().args) collect_free(a, s, out);
  }
}

}  // namespace

std::set<VarId> free_vars(const Term& t, const Substitution& s) {
  std::set<VarId> out;
  collect_free(t, s, out);
  return out;
}

bool unify_in_place(const Term& a, const Term& b, Substitution& s,
                    std::vector<VarId>& newly_bound) {
  std::vector<std::pair<Term, Term>> pending{{a, b}};
  while (!pending.empty()) {
    auto [l, r] = std::move(pending.back());
    pending.pop_back();
    l = s.walk(l);
    r = s.walk(r);
    if (l.is_var() && r.is_var() && l.as_var().id == r.as_var().id) continue;
    if (l.is_var() || r.is_var()) {
      if (!l.is_var()) std::swap(l, r);
      const VarId id = l.as_var().id;
      if (occurs(id, r, s)) return false;
      s.bind(id, r);
      newly_bound.push_back(id);
      continue;
    }
    if (l.node().index() != r.node().index()) return false;
    if (l.is_atom()) {
      if (l.as_atom().name != r.as_atom().name) return false;
    } else if (l.is_int()) {
      if (l.as_int() != r.as_int()) return false;
    } else {
      const auto& cl = l.as_compound();
      const auto& cr = r.as_compound();
      if (cl.functor != cr.functor || cl.args.size() != cr.args.size()) return false;
      for (std::size_t i = cl.args.size(); i-- > 0;) {
        pending.emplace_back(cl.args[i], cr.args[i]);
      }
    }
  }
  return true;
}

std::optional<Substitution> unify(const Term& a, const Term& b, Substitution s) {
  std::vector<VarId> bound;
  if (!unify_in_place(a, b, s, bound)) return std::nullopt;
  return s;
}

std::string TermFormatter::format(const Term& t) {
  std::string out;
  write(t, out);
  return out;
}

void TermFormatter::write(const Term& t, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, LogicVar>) {
          auto [it, inserted] = numbering_.try_emplace(n.id, numbering_.size() + 1);
          out += "_G" + std::to_string(it->second);
        } else if constexpr (std::is_same_v<N, Atom>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, Int>) {
          out += std::to_string(n.value);
        } else {
          out += n.functor;
          out += '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ',';
            write(n.args[i], out);
          }
          out += ')';
        }
      },
      t.node());
}

std::string format_term(const Term& t) { return TermFormatter{}.format(t); }

}  // namespace choo
