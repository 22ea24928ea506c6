#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "choo/evaluator.hpp"

namespace choo::cli {

// Exit statuses.
inline constexpr int kSolved = 0;
inline constexpr int kNoDerivation = 1;
inline constexpr int kParseError = 2;
inline constexpr int kRuntimeError = 3;

struct RunConfig {
  enum class Mode { First, All };
  enum class Trace { Off, Rules, Full };

  std::string file;
  Mode mode = Mode::First;
  Trace trace = Trace::Off;
  SearchBudget budget;
};

/// Witness lines in binder order, then the sorted store line.
std::string format_outcome(const Outcome& outcome);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// As run, with the program text supplied directly; `label` names it in
/// diagnostics.
int run_source(std::string_view source, const std::string& label, const RunConfig& config,
               std::ostream& out, std::ostream& err);

/// Prints the syntax tree. Exit 0, or 2 on a parse error.
int parse_file(const std::string& file, std::ostream& out, std::ostream& err);

/// Compares evaluator and oracle on the file. With a seed, also checks 500
/// random programs generated from it. Exit 0 on agreement, 1 on any
/// mismatch, 2 on a parse error, 3 if the file is outside oracle bounds.
int oracle_check(const std::string& file, std::optional<std::uint64_t> seed, std::ostream& out,
                 std::ostream& err);

}  // namespace choo::cli
