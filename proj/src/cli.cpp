#include "choo/cli.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "choo/generator.hpp"
#include "choo/oracle.hpp"
#include "choo/parser.hpp"

namespace choo::cli {

namespace {

constexpr std::size_t kRandomPrograms = 500;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

void report_parse_error(const std::string& label, const ParseError& e, std::ostream& err) {
  err << label << ':' << e.line() << ':' << e.column() << ": error: expected " << e.expected()
      << ", found " << e.found() << '\n';
}

void report_unreadable(const std::string& path, std::ostream& err) {
  err << path << ": error: cannot read file\n";
}

}  // namespace

std::string format_outcome(const Outcome& outcome) {
  TermFormatter fmt;
  std::string s;
  for (const auto& w : outcome.witnesses) {
    s += w.name + " = " + (w.value ? fmt.format(*w.value) : std::string("_")) + "\n";
  }
  s += "store: {";
  bool first = true;
  for (const auto& [name, value] : outcome.store) {
    if (!first) s += ", ";
    first = false;
    s += name + " = " + fmt.format(value);
  }
  s += "}\n";
  return s;
}

int run_source(std::string_view source, const std::string& label, const RunConfig& config,
               std::ostream& out, std::ostream& err) {
  SourceProgram program;
  try {
    program = parse_program(source);
  } catch (const ParseError& e) {
    report_parse_error(label, e, err);
    return kParseError;
  }

  ExecOptions options;
  options.budget = config.budget;
  options.record_derivations = config.trace == RunConfig::Trace::Full;
  if (config.trace == RunConfig::Trace::Rules) {
    options.trace = [&out](const TraceEvent& ev) {
      out << std::string(2 * (ev.depth > 0 ? ev.depth - 1 : 0), ' ');
      if (ev.kind == TraceEvent::Kind::Rule) {
        out << "[rule " << ev.rule << "] ";
      } else {
        out << "[fail] ";
      }
      out << ev.text << '\n';
    };
  }

  const bool all = config.mode == RunConfig::Mode::All;
  std::size_t solutions = 0;
  ProgramState state(std::move(program.clauses));
  try {
    execute(state, program.main, options, [&](const Outcome& o) {
      if (all && solutions > 0) out << "---\n";
      ++solutions;
      if (o.derivation) out << render(*o.derivation);
      out << format_outcome(o);
      return all ? SearchControl::Continue : SearchControl::Stop;
    });
  } catch (const BudgetExhausted& e) {
    out.flush();
    err << label << ": " << e.what() << '\n';
    return kRuntimeError;
  } catch (const RuntimeError& e) {
    out.flush();
    err << label << ": runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  if (all) out << "solutions: " << solutions << '\n';
  return solutions > 0 ? kSolved : kNoDerivation;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto source = read_file(config.file);
  if (!source) {
    report_unreadable(config.file, err);
    return kParseError;
  }
  return run_source(*source, config.file, config, out, err);
}

int parse_file(const std::string& file, std::ostream& out, std::ostream& err) {
  const auto source = read_file(file);
  if (!source) {
    report_unreadable(file, err);
    return kParseError;
  }
  try {
    out << dump(parse_program(*source));
  } catch (const ParseError& e) {
    report_parse_error(file, e, err);
    return kParseError;
  }
  return kSolved;
}

int oracle_check(const std::string& file, std::optional<std::uint64_t> seed, std::ostream& out,
                 std::ostream& err) {
  const auto source = read_file(file);
  if (!source) {
    report_unreadable(file, err);
    return kParseError;
  }
  SourceProgram program;
  try {
    program = parse_program(*source);
  } catch (const ParseError& e) {
    report_parse_error(file, e, err);
    return kParseError;
  }

  const auto report = oracle::check_equivalence(program);
  out << file << ": " << report.describe();
  int status = kSolved;
  if (report.verdict == oracle::EquivalenceReport::Verdict::Mismatch) status = kNoDerivation;
  if (report.verdict == oracle::EquivalenceReport::Verdict::OutOfBounds) status = kRuntimeError;

  if (seed) {
    std::mt19937_64 rng(*seed);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < kRandomPrograms; ++i) {
      const auto r = oracle::check_equivalence(gen::random_program(rng));
      if (r.verdict == oracle::EquivalenceReport::Verdict::Match) {
        ++matched;
      } else {
        out << "random program " << i << ": " << r.describe();
      }
    }
    out << "random programs (seed " << *seed << "): " << matched << '/' << kRandomPrograms
        << " match\n";
    if (matched != kRandomPrograms && status == kSolved) status = kNoDerivation;
  }
  return status;
}

}  // namespace choo::cli
