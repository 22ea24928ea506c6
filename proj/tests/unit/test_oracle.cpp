#include "doctest.h"

#include <random>

#include "choo/generator.hpp"
#include "choo/oracle.hpp"
#include "choo/parser.hpp"

using namespace choo;
using oracle::EquivalenceReport;

namespace {

std::set<std::string> keys(const std::string& source) {
  const SourceProgram p = parse_program(source);
  std::set<std::string> out;
  for (const auto& r : oracle::enumerate(p.clauses, {}, p.main).results) {
    out.insert(oracle::solution_key(r.store, r.witnesses));
  }
  return out;
}

}  // namespace

TEST_CASE("enumerate small programs") {
  CHECK(keys("main { choose(x in {1,2,3}) (x == 2) }") == std::set<std::string>{"x=2 | "});
  CHECK(keys("main { choose(x in {3..1}) (x == x) }").empty());
  CHECK(keys("main { choose(x in {1,1}) (y = x) }") == std::set<std::string>{"x=1 | y=1"});
  CHECK(keys("main { choose(x) (pair(x, 1) == pair(3 + 1, 1)) }") == std::set<std::string>{"x=4 | "});
}

TEST_CASE("derivations from the oracle are well formed") {
  const SourceProgram p = parse_program(
      "q(x) { x == 1 } q(x) { x == 2 } main { a = 0; choose(y in {1, 2}) q(y) }");
  const auto e = oracle::enumerate(p.clauses, {}, p.main);
  REQUIRE(e.results.size() == 2);
  for (const auto& r : e.results) CHECK(check_shape(r.derivation).empty());
}

TEST_CASE("runtime errors are reported, not thrown") {
  const SourceProgram p = parse_program("main { x = fact(21) }");
  const auto e = oracle::enumerate(p.clauses, {}, p.main);
  CHECK(e.runtime_error);
}

TEST_CASE("unpinned unbounded choice is out of bounds") {
  const SourceProgram p = parse_program("p(x) { x == 1 } main { choose(y) p(y) }");
  CHECK_THROWS_AS(oracle::enumerate(p.clauses, {}, p.main), oracle::OutOfBounds);
  CHECK(oracle::check_equivalence(p).verdict == EquivalenceReport::Verdict::OutOfBounds);
}

TEST_CASE("check_equivalence on the worked examples") {
  auto fib = oracle::check_equivalence(parse_program("main { choose(x in {1..50}) (5 == fib(x)) }"));
  CHECK(fib.verdict == EquivalenceReport::Verdict::Match);
  CHECK(fib.oracle == std::set<std::string>{"x=6 | "});
  CHECK(fib.evaluator == fib.oracle);

  auto rec = oracle::check_equivalence(parse_program(
      "getrecord(emp) { choose(name) choose(age) choose(sex) (tuple(name,age,sex) == emp) }"
      "main { getrecord(tuple(tom,31,male)) }"));
  CHECK(rec.verdict == EquivalenceReport::Verdict::Match);
  CHECK(rec.oracle == std::set<std::string>{"name=tom,age=31,sex=male | "});
}

TEST_CASE("random programs agree") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const auto report = oracle::check_equivalence(gen::random_program(rng));
    CHECK_MESSAGE(report.verdict == EquivalenceReport::Verdict::Match, report.describe());
  }
}

TEST_CASE("shrinking finds a small program with the same defect") {
  // Stand-in defect: any program that assigns to b.
  auto assigns_b = [](const SourceProgram& p) {
    return to_source(p).find("b = ") != std::string::npos;
  };
  std::mt19937_64 rng(4);
  int shrunk = 0;
  for (int i = 0; i < 200 && shrunk < 20; ++i) {
    const SourceProgram p = gen::random_program(rng);
    if (!assigns_b(p)) continue;
    const SourceProgram small = oracle::shrink(p, assigns_b);
    CHECK(assigns_b(small));
    CHECK(small.clauses.size() <= 1);
    CHECK(to_source(small).find("b = 0") != std::string::npos);
    CHECK(to_source(small).size() <= to_source(p).size());
    ++shrunk;
  }
  CHECK(shrunk > 0);
}
