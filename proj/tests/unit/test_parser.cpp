#include "doctest.h"

#include <random>

#include "choo/generator.hpp"
#include "choo/parser.hpp"

using namespace choo;

TEST_CASE("fibonacci search program") {
  const auto p = parse_program("main { choose(x in {1..50}) (5 == fib(x)) }");
  CHECK(p.clauses.empty());
  CHECK(p.main == bounded_choose("x", ChoiceSet{RangeSet{1, 50}},
                                 cond(RelOp::Eq, int_lit(5), builtin(Builtin::Fib, logic_ref("x")))));
}

TEST_CASE("getrecord program") {
  const auto p = parse_program(
      "getrecord(emp) { choose(name) choose(age) choose(sex) (tuple(name,age,sex) == emp) }"
      "  main { getrecord(tuple(tom,31,male)) }");
  REQUIRE(p.clauses.size() == 1);
  const Clause& c = p.clauses[0];
  CHECK(c.name == "getrecord");
  CHECK(c.params == std::vector<std::string>{"emp"});
  const Goal body = cond(RelOp::Eq,
                         construct("tuple", {logic_ref("name"), logic_ref("age"), logic_ref("sex")}),
                         logic_ref("emp"));
  CHECK(c.body == choose("name", choose("age", choose("sex", body))));
  const Term rec = Term::compound("tuple", {Term::atom("tom"), Term::integer(31), Term::atom("male")});
  CHECK(p.main == call("getrecord", {construct("tuple", {term_lit(Term::atom("tom")), int_lit(31),
                                                         term_lit(Term::atom("male"))})}));
  (void)rec;
}

TEST_CASE("missing expression is reported where it should start") {
  try {
    parse_program("main { x = }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 12);
    CHECK(e.found() == "'}'");
  }
}

TEST_CASE("error positions count lines and columns") {
  try {
    parse_program("main {\n  x = 1;\n  choose(y in {1..}) y == 1\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 19);
  }
}

TEST_CASE("parse_goal") {
  CHECK(parse_goal("x = 3 + 4") == assign("x", binop(ArithOp::Add, int_lit(3), int_lit(4))));
  CHECK(parse_goal("choose(x) choose(y) (x == fib(10); y == fact(20))") ==
        choose("x", choose("y", seq(cond(RelOp::Eq, logic_ref("x"), builtin(Builtin::Fib, int_lit(10))),
                                    cond(RelOp::Eq, logic_ref("y"), builtin(Builtin::Fact, int_lit(20)))))));
  CHECK(parse_goal("choose(x in {tom, bob}) (x == bob)") ==
        bounded_choose("x", ChoiceSet{EnumSet{{Term::atom("tom"), Term::atom("bob")}}},
                       cond(RelOp::Eq, logic_ref("x"), term_lit(Term::atom("bob")))));
}

TEST_CASE("sequence is right associative") {
  const Goal a = parse_goal("x = 1; y = 2; z = 3");
  CHECK(a == parse_goal("x = 1; (y = 2; z = 3)"));
  CHECK(a != parse_goal("(x = 1; y = 2); z = 3"));
}

TEST_CASE("precedence") {
  CHECK(parse_goal("x = 1 + 2 * 3") ==
        assign("x", binop(ArithOp::Add, int_lit(1), binop(ArithOp::Mul, int_lit(2), int_lit(3)))));
  CHECK(parse_goal("x = (1 + 2) * 3") ==
        assign("x", binop(ArithOp::Mul, binop(ArithOp::Add, int_lit(1), int_lit(2)), int_lit(3))));
  CHECK(parse_goal("x = 7 - 2 - 1") ==
        assign("x", binop(ArithOp::Sub, binop(ArithOp::Sub, int_lit(7), int_lit(2)), int_lit(1))));
}

TEST_CASE("identifier classification") {
  // y is assigned somewhere, so it is a store variable; tom never is.
  CHECK(parse_goal("y = 1; choose(x) (x == y; x == tom)") ==
        seq(assign("y", int_lit(1)),
            choose("x", seq(cond(RelOp::Eq, logic_ref("x"), store_ref("y")),
                            cond(RelOp::Eq, logic_ref("x"), term_lit(Term::atom("tom")))))));
}

TEST_CASE("assigning to a logic variable is a static error") {
  CHECK_THROWS_AS(parse_goal("choose(x) (x = 3)"), ParseError);
  CHECK_THROWS_AS(parse_program("p(a) { a = 1 } main { p(1) }"), ParseError);
}

TEST_CASE("reserved words") {
  CHECK_THROWS_AS(parse_goal("choose(in) (1 == 1)"), ParseError);
  CHECK_THROWS_AS(parse_goal("main == 1"), ParseError);
  CHECK_THROWS_AS(parse_program("fib(x) { x == 1 } main { 1 == 1 }"), ParseError);
}

TEST_CASE("integer literals at the edges") {
  CHECK(parse_goal("x = -9223372036854775808") == assign("x", int_lit(INT64_MIN)));
  CHECK(parse_goal("x = 9223372036854775807") == assign("x", int_lit(INT64_MAX)));
  CHECK_THROWS_AS(parse_goal("x = 9223372036854775808"), ParseError);
}

TEST_CASE("set literals hold ground terms") {
  CHECK(parse_goal("choose(x in {}) x == x") ==
        bounded_choose("x", ChoiceSet{EnumSet{}}, cond(RelOp::Eq, logic_ref("x"), logic_ref("x"))));
  CHECK(parse_goal("choose(x in {pair(1,tom), -2}) x == x") ==
        bounded_choose("x",
                       ChoiceSet{EnumSet{{Term::compound("pair", {Term::integer(1), Term::atom("tom")}),
                                          Term::integer(-2)}}},
                       cond(RelOp::Eq, logic_ref("x"), logic_ref("x"))));
  CHECK_THROWS_AS(parse_goal("choose(y) choose(x in {y}) x == x"), ParseError);
}

TEST_CASE("parse_term") {
  CHECK(parse_term("tuple(tom,31,male)") ==
        Term::compound("tuple", {Term::atom("tom"), Term::integer(31), Term::atom("male")}));
  CHECK(parse_term("-5") == Term::integer(-5));
}

TEST_CASE("comments and whitespace") {
  CHECK(parse_program("// header\nmain {\n  1 == 1 // trailing\n}\n").main ==
        cond(RelOp::Eq, int_lit(1), int_lit(1)));
}

TEST_CASE("deep nesting is an error, not a crash") {
  std::string s = "main { ";
  for (int i = 0; i < 5000; ++i) s += "(";
  s += "1 == 1";
  for (int i = 0; i < 5000; ++i) s += ")";
  s += " }";
  CHECK_THROWS_AS(parse_program(s), ParseError);

  std::string long_seq = "main { x = 0";
  for (int i = 0; i < 5000; ++i) long_seq += "; x = " + std::to_string(i);
  long_seq += " }";
  CHECK_NOTHROW(parse_program(long_seq));
}

TEST_CASE("round trip on generated programs") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const SourceProgram p = gen::random_program(rng);
    const std::string text = to_source(p);
    SourceProgram q;
    REQUIRE_NOTHROW(q = parse_program(text));
    CHECK_MESSAGE(q == p, text);
    CHECK(to_source(q) == text);
  }
}

TEST_CASE("fuzzing: every input parses or fails with a position") {
  std::mt19937_64 rng(1);
  const std::string alphabet = "main{}();=<>!+-*/.,:01239xyztomchose fibact\n\t\"\\\x01\xff";
  std::uniform_int_distribution<int> len(0, 80);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  int parsed = 0;
  for (int i = 0; i < 10'000; ++i) {
    std::string s;
    switch (i % 3) {
      case 0:
        for (int k = len(rng); k > 0; --k) s += static_cast<char>(byte(rng));
        break;
      case 1:
        for (int k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
        s = "main { " + s + " }";
        break;
      default: {
        // A valid program with a few characters deleted, inserted or replaced.
        s = to_source(gen::random_program(rng));
        for (int k = 1 + i % 3; k > 0 && !s.empty(); --k) {
          const std::size_t at = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
          switch (byte(rng) % 3) {
            case 0: s.erase(at, 1); break;
            case 1: s.insert(at, 1, alphabet[pick(rng)]); break;
            default: s[at] = alphabet[pick(rng)]; break;
          }
        }
      }
    }
    try {
      parse_program(s);
      ++parsed;
    } catch (const ParseError& e) {
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
  }
  MESSAGE("parsed " << parsed << " of 10000");
}
