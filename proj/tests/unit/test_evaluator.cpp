#include "doctest.h"

#include <random>

#include "choo/evaluator.hpp"
#include "choo/generator.hpp"
#include "choo/oracle.hpp"
#include "choo/parser.hpp"

using namespace choo;

namespace {

std::vector<Outcome> run_all(const std::string& source, ExecOptions options = {}) {
  SourceProgram p = parse_program(source);
  ProgramState state(p.clauses);
  return execute_all(state, p.main, options);
}

std::optional<Term> witness(const Outcome& o, const std::string& name) {
  for (const auto& w : o.witnesses) {
    if (w.name == name) return w.value;
  }
  FAIL("no witness " << name);
  return std::nullopt;
}

// Independent references: plain loops.
std::int64_t fib_ref(int n) {
  std::int64_t a = 0, b = 1;  // fib(1), fib(2)
  for (int i = 1; i < n; ++i) {
    const std::int64_t c = a + b;
    a = b;
    b = c;
  }
  return a;
}

std::int64_t product_to(int n) {
  std::int64_t p = 1;
  for (int i = 2; i <= n; ++i) p *= i;
  return p;
}

Term I(std::int64_t v) { return Term::integer(v); }

}  // namespace

TEST_CASE("fibonacci index search") {
  const auto out = run_all("main { choose(x in {1..50}) (5 == fib(x)) }");
  REQUIRE(out.size() == 1);
  CHECK(witness(out[0], "x") == I(6));
}

TEST_CASE("empty choice set fails") {
  CHECK(run_all("main { choose(x in {}) (x == x) }").empty());
  CHECK(run_all("main { choose(x in {3..1}) (x == x) }").empty());
}

TEST_CASE("getrecord destructuring") {
  const auto out = run_all(
      "getrecord(emp) { choose(name) choose(age) choose(sex) (tuple(name,age,sex) == emp) }"
      "main { getrecord(tuple(tom,31,male)) }");
  REQUIRE(out.size() == 1);
  CHECK(witness(out[0], "name") == Term::atom("tom"));
  CHECK(witness(out[0], "age") == I(31));
  CHECK(witness(out[0], "sex") == Term::atom("male"));
}

TEST_CASE("calls") {
  CHECK(run_all("p(x) { x == 3 } main { p(3) }").size() == 1);
  CHECK(run_all("p(x) { x == 3 } main { p(4) }").empty());
  CHECK_THROWS_AS(run_all("main { nothing(1) }"), UndefinedProcedure);
  CHECK_THROWS_AS(run_all("p(x) { x == 3 } main { p(1, 2) }"), UndefinedProcedure);
}

TEST_CASE("clause order matches the oracle's enumeration") {
  const std::string src = "q(x) { x == 1 } q(x) { x == 2 } main { choose(y) q(y) }";
  const auto out = run_all(src);
  REQUIRE(out.size() == 2);
  CHECK(witness(out[0], "y") == I(1));
  CHECK(witness(out[1], "y") == I(2));

  // The oracle needs the choice bounded; {0..3} covers every clause.
  const SourceProgram p =
      parse_program("q(x) { x == 1 } q(x) { x == 2 } main { choose(y in {0..3}) q(y) }");
  const auto e = oracle::enumerate(p.clauses, {}, p.main);
  REQUIRE(e.results.size() == 2);
  std::set<std::string> expected;
  for (const auto& r : e.results) expected.insert(oracle::solution_key(r.store, r.witnesses));
  CHECK(expected == std::set<std::string>{"y=1 | ", "y=2 | "});
}

TEST_CASE("conditions") {
  CHECK(run_all("main { 5 == fib(6) }").size() == 1);
  const auto out = run_all("main { choose(x) (x == tuple(1,2)) }");
  REQUIRE(out.size() == 1);
  CHECK(witness(out[0], "x") == Term::compound("tuple", {I(1), I(2)}));
  CHECK_THROWS_AS(run_all("main { choose(x) (x < 5) }"), RuntimeError);
  CHECK(run_all("main { 1 != 2; 2 <= 2; 3 > 2; 2 >= 3 }").empty());
  CHECK(run_all("main { tom == tom; pair(1, tom) == pair(1, tom) }").size() == 1);
  CHECK_THROWS_AS(run_all("main { tom < 1 }"), RuntimeError);
}

TEST_CASE("assignment") {
  auto out = run_all("main { x = 3 + 4 }");
  REQUIRE(out.size() == 1);
  CHECK(out[0].store == std::map<std::string, Term>{{"x", I(7)}});

  out = run_all("main { x = 1; x = 2 }");
  REQUIRE(out.size() == 1);
  CHECK(out[0].store.at("x") == I(2));

  out = run_all("main { x = fact(20) }");
  REQUIRE(out.size() == 1);
  CHECK(out[0].store.at("x") == I(product_to(20)));

  CHECK_THROWS_AS(run_all("main { choose(y) (x = y) }"), RuntimeError);
}

TEST_CASE("reading an unset store variable fails") {
  CHECK(run_all("main { y = 1; x == 1 ; x = 2 }").empty());
}

TEST_CASE("sequences") {
  auto out = run_all("main { x = 1; y = 2 }");
  REQUIRE(out.size() == 1);
  CHECK(out[0].store == std::map<std::string, Term>{{"x", I(1)}, {"y", I(2)}});
  CHECK(run_all("main { 1 == 2; x = 1 }").empty());

  out = run_all("main { choose(x in {1,2}) (x == 2; y = x) }");
  REQUIRE(out.size() == 1);
  CHECK(witness(out[0], "x") == I(2));
  CHECK(out[0].store == std::map<std::string, Term>{{"y", I(2)}});
}

TEST_CASE("unbounded choice") {
  const auto out = run_all("main { choose(x) choose(y) (x == fib(10); y == fact(20)) }");
  REQUIRE(out.size() == 1);
  CHECK(witness(out[0], "x") == I(fib_ref(10)));
  CHECK(witness(out[0], "y") == I(product_to(20)));

  const auto free = run_all("main { choose(x) (x == x) }");
  REQUIRE(free.size() == 1);
  CHECK_FALSE(witness(free[0], "x").has_value());

  // Two aliased choices are both constrained: each names the other.
  const auto aliased = run_all("main { choose(x) choose(y) (x == y) }");
  REQUIRE(aliased.size() == 1);
  CHECK(witness(aliased[0], "x").has_value());
  CHECK(witness(aliased[0], "x") == witness(aliased[0], "y"));

  const auto print = run_all("main { a = 4; b = a * 3; choose(x) (x == b - 1) }");
  REQUIRE(print.size() == 1);
  CHECK(witness(print[0], "x") == I(11));
}

TEST_CASE("bounded choice order and duplicates") {
  const auto out = run_all("main { choose(x in {2, 1, 2}) (x < 3) }");
  REQUIRE(out.size() == 2);
  CHECK(witness(out[0], "x") == I(2));
  CHECK(witness(out[1], "x") == I(1));
  CHECK(run_all("main { choose(x in {-2..2}) (x == x) }").size() == 5);
}

TEST_CASE("eval_expr") {
  ProgramState s;
  CHECK(eval_expr(s, builtin(Builtin::Fib, int_lit(6))) == I(5));
  CHECK(eval_expr(s, builtin(Builtin::Fact, int_lit(0))) == I(1));
  CHECK(eval_expr(s, binop(ArithOp::Mul, binop(ArithOp::Add, int_lit(2), int_lit(3)), int_lit(4))) == I(20));
  CHECK(eval_expr(s, binop(ArithOp::Div, int_lit(-7), int_lit(2))) == I(-3));
  CHECK_FALSE(eval_expr(s, store_ref("unset")).has_value());
  CHECK_THROWS_AS(eval_expr(s, binop(ArithOp::Div, int_lit(1), int_lit(0))), RuntimeError);
  CHECK_THROWS_AS(eval_expr(s, binop(ArithOp::Div, int_lit(INT64_MIN), int_lit(-1))), RuntimeError);
  CHECK_THROWS_AS(eval_expr(s, binop(ArithOp::Add, int_lit(INT64_MAX), int_lit(1))), RuntimeError);
  CHECK_THROWS_AS(eval_expr(s, builtin(Builtin::Fact, int_lit(21))), RuntimeError);
  CHECK_THROWS_AS(eval_expr(s, builtin(Builtin::Fact, int_lit(-1))), RuntimeError);
  CHECK_THROWS_AS(eval_expr(s, builtin(Builtin::Fib, int_lit(0))), RuntimeError);
  CHECK_THROWS_AS(eval_expr(s, binop(ArithOp::Add, term_lit(Term::atom("tom")), int_lit(1))), RuntimeError);
  for (int n = 1; n <= 92; ++n) CHECK(fib(n) == fib_ref(n));
  CHECK_THROWS_AS(fib(94), RuntimeError);
  for (int n = 0; n <= 20; ++n) CHECK(fact(n) == product_to(n));
}

TEST_CASE("recursion and budgets") {
  const std::string count =
      "count(n, k) { n == k } count(n, k) { n < k; count(n + 1, k) } "
      "main { choose(i in {0..3}) count(0, 40) }";
  CHECK(run_all(count).size() == 4);

  const std::string loop = "loop(n) { loop(n + 1) } main { loop(0) }";
  ExecOptions small;
  small.budget.max_steps = 1000;
  try {
    run_all(loop, small);
    FAIL("expected budget exhaustion");
  } catch (const BudgetExhausted& e) {
    CHECK(e.which() == BudgetExhausted::Limit::Steps);
    CHECK(std::string(e.what()) == "budget exhausted: max-steps (1000)");
  }
  ExecOptions shallow;
  shallow.budget.max_depth = 50;
  try {
    run_all(loop, shallow);
    FAIL("expected budget exhaustion");
  } catch (const BudgetExhausted& e) {
    CHECK(e.which() == BudgetExhausted::Limit::Depth);
  }
}

TEST_CASE("derivations have the premise shape of their rules") {
  std::mt19937_64 rng(17);
  ExecOptions opts;
  opts.record_derivations = true;
  for (int i = 0; i < 300; ++i) {
    const SourceProgram p = gen::random_program(rng);
    ProgramState state(p.clauses);
    try {
      for (const auto& o : execute_all(state, p.main, opts)) {
        REQUIRE(o.derivation);
        CHECK_MESSAGE(check_shape(*o.derivation).empty(), to_source(p));
      }
    } catch (const RuntimeError&) {
    }
  }
}

TEST_CASE("determinism, store grounding, failure purity") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const SourceProgram p = gen::random_program(rng);
    ProgramState a(p.clauses);
    ProgramState b(p.clauses);
    const auto before = a.snapshot();
    std::vector<Outcome> ra, rb;
    bool ea = false, eb = false;
    try { ra = execute_all(a, p.main); } catch (const RuntimeError&) { ea = true; }
    try { rb = execute_all(b, p.main); } catch (const RuntimeError&) { eb = true; }
    CHECK(ea == eb);
    CHECK(ra == rb);
    CHECK(a.snapshot() == before);
    for (const auto& o : ra) {
      for (const auto& [name, v] : o.store) CHECK(is_ground(v));
    }
  }
}

TEST_CASE("budget monotonicity: a larger budget extends the outcome prefix") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    const SourceProgram p = gen::random_program(rng);
    auto collect = [&](std::uint64_t steps) {
      std::vector<Outcome> got;
      ExecOptions opts;
      opts.budget.max_steps = steps;
      ProgramState s(p.clauses);
      try {
        execute(s, p.main, opts, [&](const Outcome& o) {
          got.push_back(o);
          return SearchControl::Continue;
        });
      } catch (const BudgetExhausted&) {
      } catch (const RuntimeError&) {
      }
      return got;
    };
    const auto small = collect(20);
    const auto large = collect(200);
    REQUIRE(small.size() <= large.size());
    for (std::size_t k = 0; k < small.size(); ++k) CHECK(small[k] == large[k]);
  }
}

TEST_CASE("trace events number rules") {
  std::vector<int> rules;
  ExecOptions opts;
  opts.trace = [&](const TraceEvent& e) { rules.push_back(e.rule); };
  run_all("p(x) { x == 1 } main { y = 2; choose(z in {1}) choose(w) p(z) }", opts);
  CHECK(rules == std::vector<int>{6, 5, 8, 7, 3, 2, 1, 4});
}
