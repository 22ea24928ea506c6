#include "doctest.h"

#include <random>

#include "choo/generator.hpp"
#include "choo/term.hpp"

using namespace choo;

namespace {

Term V(VarId id) { return Term::var(id, "v" + std::to_string(id)); }
Term A(const char* s) { return Term::atom(s); }
Term I(std::int64_t v) { return Term::integer(v); }
Term F(const char* f, std::vector<Term> args) { return Term::compound(f, std::move(args)); }

}  // namespace

TEST_CASE("unify destructures a record") {
  const Term n = V(1), a = V(2), s = V(3);
  auto sigma = unify(F("tuple", {n, a, s}), F("tuple", {A("tom"), I(31), A("male")}), {});
  REQUIRE(sigma);
  CHECK(sigma->size() == 3);
  CHECK(apply(*sigma, n) == A("tom"));
  CHECK(apply(*sigma, a) == I(31));
  CHECK(apply(*sigma, s) == A("male"));
}

TEST_CASE("unify of a variable with itself adds nothing") {
  auto sigma = unify(V(1), V(1), {});
  REQUIRE(sigma);
  CHECK(sigma->empty());
}

TEST_CASE("occurs check rejects x = f(x)") {
  CHECK_FALSE(unify(V(1), F("f", {V(1)}), {}));
  CHECK_FALSE(unify(F("f", {V(1)}), V(1), {}));
}

TEST_CASE("unify clashes") {
  CHECK_FALSE(unify(A("tom"), A("bob"), {}));
  CHECK_FALSE(unify(I(1), A("tom"), {}));
  CHECK_FALSE(unify(F("f", {I(1)}), F("f", {I(1), I(2)}), {}));
  CHECK_FALSE(unify(F("f", {I(1)}), F("g", {I(1)}), {}));
}

TEST_CASE("apply") {
  Substitution s;
  s.bind(1, I(3));
  CHECK(apply(s, F("f", {V(1), V(2)})) == F("f", {I(3), V(2)}));

  const Term t = F("f", {V(1), A("a")});
  CHECK(apply(Substitution{}, t) == t);

  Substitution chain;
  chain.bind(1, F("g", {V(2)}));
  chain.bind(2, I(2));
  CHECK(apply(chain, V(1)) == F("g", {I(2)}));
}

TEST_CASE("occurs") {
  CHECK(occurs(1, F("f", {F("g", {V(1)})})));
  CHECK_FALSE(occurs(1, F("f", {V(2)})));
  CHECK(occurs(1, V(1)));
}

TEST_CASE("free_vars") {
  CHECK(free_vars(F("tuple", {V(1), I(31), V(3)})) == std::set<VarId>{1, 3});
  CHECK(free_vars(A("tom")).empty());
  CHECK(free_vars(F("f", {V(1), F("g", {V(1)})})) == std::set<VarId>{1});
}

TEST_CASE("format_term") {
  CHECK(format_term(F("tuple", {A("tom"), I(31), A("male")})) == "tuple(tom,31,male)");
  CHECK(format_term(I(-5)) == "-5");
  CHECK(format_term(F("f", {F("g", {V(42)})})) == "f(g(_G1))");

  TermFormatter fmt;
  CHECK(fmt.format(F("p", {V(9), V(4)})) == "p(_G1,_G2)");
  CHECK(fmt.format(V(4)) == "_G2");
}

TEST_CASE("compound arity must be positive") {
  CHECK_THROWS_AS(Term::compound("f", {}), std::invalid_argument);
}

TEST_CASE("unify_in_place reports bindings even on failure") {
  Substitution s;
  std::vector<VarId> bound;
  CHECK_FALSE(unify_in_place(F("f", {V(1), A("a")}), F("f", {I(1), A("b")}), s, bound));
  CHECK(bound == std::vector<VarId>{1});
}

// Properties over random term pairs.

TEST_CASE("unifier soundness and idempotence") {
  std::mt19937_64 rng(7);
  std::vector<Term> vars;
  for (VarId i = 1; i <= 4; ++i) vars.push_back(V(i));
  int unified = 0;
  for (int i = 0; i < 1000; ++i) {
    const Term a = gen::random_term(rng, vars, 3);
    const Term b = gen::random_term(rng, vars, 3);
    auto s = unify(a, b, {});
    if (!s) continue;
    ++unified;
    const Term ra = apply(*s, a);
    CHECK(ra == apply(*s, b));
    CHECK(apply(*s, ra) == ra);
    for (const auto& [id, t] : s->sorted_bindings()) CHECK_FALSE(occurs(id, apply(*s, t)));
  }
  CHECK(unified > 100);
}

TEST_CASE("most general: another unifier factors through the mgu") {
  // Build tau as a ground instance: pick random values for the variables,
  // then unify t with apply(tau, t). Any unifier of (t, u) must satisfy
  // tau(sigma(x)) == tau(x).
  std::mt19937_64 rng(11);
  std::vector<Term> vars;
  for (VarId i = 1; i <= 3; ++i) vars.push_back(V(i));
  for (int i = 0; i < 300; ++i) {
    Substitution tau;
    for (VarId v = 1; v <= 3; ++v) tau.bind(v, gen::random_term(rng, {}, 2));
    const Term t = gen::random_term(rng, vars, 3);
    const Term u = gen::random_term(rng, vars, 2);
    if (apply(tau, t) != apply(tau, u)) continue;
    auto sigma = unify(t, u, {});
    REQUIRE(sigma);
    for (const auto& x : vars) CHECK(apply(tau, apply(*sigma, x)) == apply(tau, x));
  }
}

TEST_CASE("occurs check on constructed cyclic cases") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    // C[x] with x somewhere strictly inside.
    Term inner = V(1);
    const int layers = 1 + i % 4;
    for (int k = 0; k < layers; ++k) {
      std::vector<Term> args{inner};
      if (k % 2) args.insert(args.begin(), gen::random_term(rng, {}, 1));
      inner = F(k % 3 == 0 ? "f" : "g", args);
    }
    CHECK_FALSE(unify(V(1), inner, {}));
    CHECK_FALSE(unify(inner, V(1), {}));
  }
}
