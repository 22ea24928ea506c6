#include "choo/parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <set>
#include <utility>
#include <vector>

namespace choo {

ParseError::ParseError(std::size_t line, std::size_t column, std::string expected,
                       std::string found)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": expected " +
                         expected + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

bool is_reserved(std::string_view word) {
  static constexpr std::array<std::string_view, 5> kReserved{"choose", "in", "main", "fib",
                                                             "fact"};
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

namespace {

// Raised for well-formed text that breaks a scoping rule. Never replaced by
// an error from another parse alternative.
class ScopeError : public ParseError {
public:
  using ParseError::ParseError;
};

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::string describe_char(unsigned char c) {
  if (c >= 0x20 && c < 0x7f) return std::string("'") + static_cast<char>(c) + "'";
  static constexpr char kHex[] = "0123456789abcdef";
  return std::string("byte 0x") + kHex[c >> 4] + kHex[c & 0xf];
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      const auto c = static_cast<unsigned char>(src[i]);
      if (c == '\n') {
        ++line;
        col = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const std::size_t tl = line;
    const std::size_t tc = col;
    std::size_t j = i;
    if (is_ident_start(c)) {
      while (j < src.size() && is_ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (is_digit(c)) {
      while (j < src.size() && is_digit(src[j])) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    static constexpr std::array<std::string_view, 5> kTwo{"==", "!=", "<=", ">=", ".."};
    bool matched = false;
    for (auto p : kTwo) {
      if (src.substr(i, 2) == p) {
        out.push_back({Tok::Punct, std::string(p), tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(){},;=<>+-*/").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(tl, tc, "token", describe_char(static_cast<unsigned char>(c)));
  }
  out.push_back({Tok::End, {}, line, col});
  return out;
}

bool later(const ParseError& a, const ParseError& b) {
  return std::pair(a.line(), a.column()) > std::pair(b.line(), b.column());
}

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {
    for (std::size_t k = 0; k + 1 < toks_.size(); ++k) {
      if (toks_[k].kind == Tok::Ident && is_punct(toks_[k + 1], "=")) {
        store_names_.insert(toks_[k].text);
      }
    }
  }

  SourceProgram program() {
    SourceProgram p{{}, int_goal_placeholder()};
    while (!is_ident(peek(), "main")) {
      if (peek().kind != Tok::Ident) fail("procedure definition or 'main'");
      p.clauses.push_back(clause());
    }
    advance();
    expect("{");
    p.main = goal();
    expect("}");
    expect_end();
    return p;
  }

  Goal single_goal() {
    Goal g = goal();
    expect_end();
    return g;
  }

  Term single_term() {
    Term t = ground_term();
    expect_end();
    return t;
  }

private:
  static constexpr std::size_t kMaxNesting = 1000;

  // Only used to seed SourceProgram before main is parsed.
  static Goal int_goal_placeholder() { return cond(RelOp::Eq, int_lit(0), int_lit(0)); }

  struct NestGuard {
    explicit NestGuard(Parser& p) : p(p) {
      if (++p.nesting_ > kMaxNesting) {
        --p.nesting_;
        p.fail("shallower nesting");
      }
    }
    ~NestGuard() { --p.nesting_; }
    Parser& p;
  };

  struct ScopeGuard {
    ScopeGuard(Parser& p, std::vector<std::string> names) : p(p), n(names.size()) {
      for (auto& s : names) p.scope_.push_back(std::move(s));
    }
    ~ScopeGuard() { p.scope_.resize(p.scope_.size() - n); }
    Parser& p;
    std::size_t n;
  };

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  static bool is_punct(const Token& t, std::string_view p) {
    return t.kind == Tok::Punct && t.text == p;
  }
  static bool is_ident(const Token& t, std::string_view name) {
    return t.kind == Tok::Ident && t.text == name;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw ParseError(t.line, t.column, expected, describe(t));
  }
  [[noreturn]] static void fail_at(const Token& t, const std::string& expected) {
    throw ParseError(t.line, t.column, expected, describe(t));
  }
  [[noreturn]] static void scope_error(const Token& t, const std::string& expected,
                                       std::string found = {}) {
    throw ScopeError(t.line, t.column, expected, found.empty() ? describe(t) : found);
  }

  void expect(std::string_view p) {
    if (!is_punct(peek(), p)) fail("'" + std::string(p) + "'");
    advance();
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail("end of input");
  }

  bool in_logic_scope(const std::string& name) const {
    return std::find(scope_.rbegin(), scope_.rend(), name) != scope_.rend();
  }

  std::string binder_name(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_reserved(t.text)) fail(what);
    return advance().text;
  }

  Clause clause() {
    Clause c{binder_name("procedure name"), {}, int_goal_placeholder()};
    expect("(");
    if (!is_punct(peek(), ")")) {
      while (true) {
        const Token& at = peek();
        std::string p = binder_name("parameter name");
        if (std::find(c.params.begin(), c.params.end(), p) != c.params.end()) {
          scope_error(at, "distinct parameter name");
        }
        c.params.push_back(std::move(p));
        if (!is_punct(peek(), ",")) break;
        advance();
      }
    }
    expect(")");
    expect("{");
    ScopeGuard scope(*this, c.params);
    c.body = goal();
    expect("}");
    return c;
  }

  Goal goal() {
    NestGuard nest(*this);
    std::vector<Goal> parts{prim()};
    while (is_punct(peek(), ";")) {
      advance();
      parts.push_back(prim());
    }
    Goal g = std::move(parts.back());
    for (std::size_t i = parts.size() - 1; i-- > 0;) g = seq(std::move(parts[i]), std::move(g));
    return g;
  }

  Goal prim() {
    NestGuard nest(*this);
    const Token& t = peek();
    if (is_ident(t, "choose")) return choice();
    if (t.kind == Tok::Ident && is_punct(peek(1), "=")) return assignment();
    const bool can_start = t.kind == Tok::Ident || t.kind == Tok::Int || is_punct(t, "(") ||
                           is_punct(t, "-");
    if (!can_start) fail("statement");

    // A condition and a parenthesised goal or procedure call share a
    // prefix; try the condition first and fall back.
    const std::size_t start = pos_;
    ParseError best(0, 0, "", "");
    try {
      Condition c = condition();
      return Goal{Cond{std::move(c)}};
    } catch (const ScopeError&) {
      throw;
    } catch (const ParseError& e) {
      best = e;
      pos_ = start;
    }
    try {
      if (is_punct(t, "(")) {
        advance();
        Goal g = goal();
        expect(")");
        return g;
      }
      if (t.kind == Tok::Ident && is_punct(peek(1), "(")) return procedure_call();
    } catch (const ScopeError&) {
      throw;
    } catch (const ParseError& e) {
      if (later(e, best)) throw;
    }
    throw best;
  }

  Goal choice() {
    advance();  // choose
    expect("(");
    std::string var = binder_name("variable name");
    std::optional<ChoiceSet> set;
    if (is_ident(peek(), "in")) {
      advance();
      set = choice_set();
    }
    expect(")");
    ScopeGuard scope(*this, {var});
    Goal body = prim();
    if (set) return bounded_choose(std::move(var), std::move(*set), std::move(body));
    return choose(std::move(var), std::move(body));
  }

  Goal assignment() {
    const Token& target = peek();
    if (is_reserved(target.text)) fail("assignment target");
    if (in_logic_scope(target.text)) {
      scope_error(target, "store variable", "logic variable '" + target.text + "'");
    }
    std::string name = advance().text;
    advance();  // =
    return assign(std::move(name), expr());
  }

  Goal procedure_call() {
    const Token& name = peek();
    if (is_reserved(name.text)) fail("procedure name");
    Call c{advance().text, {}};
    expect("(");
    if (!is_punct(peek(), ")")) {
      while (true) {
        c.args.push_back(expr());
        if (!is_punct(peek(), ",")) break;
        advance();
      }
    }
    expect(")");
    return Goal{std::move(c)};
  }

  Condition condition() {
    Expr lhs = expr();
    static constexpr std::array<std::pair<std::string_view, RelOp>, 6> kOps{{
        {"==", RelOp::Eq},
        {"!=", RelOp::Neq},
        {"<=", RelOp::Le},
        {">=", RelOp::Ge},
        {"<", RelOp::Lt},
        {">", RelOp::Gt},
    }};
    for (const auto& [text, op] : kOps) {
      if (is_punct(peek(), text)) {
        advance();
        return Condition{op, std::move(lhs), expr()};
      }
    }
    fail("comparison operator");
  }

  Expr expr() {
    NestGuard nest(*this);
    Expr e = term_expr();
    while (is_punct(peek(), "+") || is_punct(peek(), "-")) {
      const ArithOp op = advance().text == "+" ? ArithOp::Add : ArithOp::Sub;
      e = binop(op, std::move(e), term_expr());
    }
    return e;
  }

  Expr term_expr() {
    Expr e = unary();
    while (is_punct(peek(), "*") || is_punct(peek(), "/")) {
      const ArithOp op = advance().text == "*" ? ArithOp::Mul : ArithOp::Div;
      e = binop(op, std::move(e), unary());
    }
    return e;
  }

  Expr unary() {
    NestGuard nest(*this);
    if (!is_punct(peek(), "-")) return primary();
    advance();
    if (peek().kind == Tok::Int) return int_lit(integer(true));
    return binop(ArithOp::Sub, int_lit(0), unary());
  }

  std::int64_t integer(bool negative) {
    const Token& t = peek();
    if (t.kind != Tok::Int) fail("integer");
    std::uint64_t magnitude = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), magnitude);
    const std::uint64_t limit =
        static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + (negative ? 1 : 0);
    if (ec != std::errc{} || magnitude > limit) fail("64-bit integer");
    advance();
    if (!negative) return static_cast<std::int64_t>(magnitude);
    if (magnitude == limit) return std::numeric_limits<std::int64_t>::min();
    return -static_cast<std::int64_t>(magnitude);
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return int_lit(integer(false));
    if (is_punct(t, "(")) {
      advance();
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail("expression");
    if (t.text == "fib" || t.text == "fact") {
      const Builtin fn = t.text == "fib" ? Builtin::Fib : Builtin::Fact;
      advance();
      expect("(");
      Expr arg = expr();
      expect(")");
      return builtin(fn, std::move(arg));
    }
    if (is_reserved(t.text)) fail("expression");
    std::string name = advance().text;
    if (is_punct(peek(), "(")) {
      advance();
      std::vector<Expr> args;
      while (true) {
        args.push_back(expr());
        if (!is_punct(peek(), ",")) break;
        advance();
      }
      expect(")");
      return construct(std::move(name), std::move(args));
    }
    if (in_logic_scope(name)) return logic_ref(std::move(name));
    if (store_names_.contains(name)) return store_ref(std::move(name));
    return term_lit(Term::atom(std::move(name)));
  }

  ChoiceSet choice_set() {
    expect("{");
    if (is_punct(peek(), "}")) {
      advance();
      return ChoiceSet{EnumSet{}};
    }
    Term first = ground_term();
    if (first.is_int() && is_punct(peek(), "..")) {
      advance();
      const bool neg = is_punct(peek(), "-");
      if (neg) advance();
      const std::int64_t hi = integer(neg);
      expect("}");
      return ChoiceSet{RangeSet{first.as_int(), hi}};
    }
    EnumSet s{{std::move(first)}};
    while (is_punct(peek(), ",")) {
      advance();
      s.elements.push_back(ground_term());
    }
    expect("}");
    return ChoiceSet{std::move(s)};
  }

  Term ground_term() {
    NestGuard nest(*this);
    const Token& t = peek();
    if (is_punct(t, "-")) {
      advance();
      return Term::integer(integer(true));
    }
    if (t.kind == Tok::Int) return Term::integer(integer(false));
    if (t.kind != Tok::Ident || is_reserved(t.text)) fail("ground term");
    std::string name = advance().text;
    if (!is_punct(peek(), "(")) {
      if (in_logic_scope(name) || store_names_.contains(name)) {
        scope_error(t, "ground term (variables are not allowed in set literals)");
      }
      return Term::atom(std::move(name));
    }
    advance();
    std::vector<Term> args;
    while (true) {
      args.push_back(ground_term());
      if (!is_punct(peek(), ",")) break;
      advance();
    }
    expect(")");
    return Term::compound(std::move(name), std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t nesting_ = 0;
  std::set<std::string> store_names_;
  std::vector<std::string> scope_;
};

}  // namespace

SourceProgram parse_program(std::string_view source) { return Parser(source).program(); }

Goal parse_goal(std::string_view source) { return Parser(source).single_goal(); }

Term parse_term(std::string_view source) { return Parser(source).single_term(); }

}  // namespace choo
