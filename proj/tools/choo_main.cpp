#include <pthread.h>

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "choo/cli.hpp"

namespace {

// Terms built by long recursions nest deeply and every traversal of them
// (including destruction) recurses, so the interpreter gets a big stack.
constexpr std::size_t kStackBytes = std::size_t{1} << 30;

int on_big_stack(std::function<int()> body) {
  struct Job {
    std::function<int()> body;
    int status = 0;
  } job{std::move(body)};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStackBytes);
  pthread_t thread;
  auto entry = [](void* p) -> void* {
    auto* j = static_cast<Job*>(p);
    j->status = j->body();
    return nullptr;
  };
  const int err = pthread_create(&thread, &attr, entry, &job);
  pthread_attr_destroy(&attr);
  if (err != 0) return job.body();
  pthread_join(thread, nullptr);
  return job.status;
}

}  // namespace

int main(int argc, char** argv) {
  using choo::cli::RunConfig;

  CLI::App app{"choo: run programs with choice-quantified statements"};
  app.require_subcommand(1);

  RunConfig config;
  bool all = false;
  auto* run = app.add_subcommand("run", "run a program and print witnesses");
  run->add_option("file", config.file, "program file")->required();
  run->add_flag("--all", all, "enumerate every solution");
  const std::map<std::string, RunConfig::Trace> traces{
      {"off", RunConfig::Trace::Off}, {"rules", RunConfig::Trace::Rules}, {"full", RunConfig::Trace::Full}};
  run->add_option("--trace", config.trace, "off, rules or full")
      ->transform(CLI::CheckedTransformer(traces, CLI::ignore_case));
  run->add_option("--max-depth", config.budget.max_depth, "derivation depth bound");
  run->add_option("--max-steps", config.budget.max_steps, "search step bound");

  std::string parse_path;
  auto* parse = app.add_subcommand("parse", "print the syntax tree");
  parse->add_option("file", parse_path, "program file")->required();

  std::string check_path;
  std::optional<std::uint64_t> seed;
  auto* check = app.add_subcommand("oracle-check", "compare evaluator against the oracle");
  check->add_option("file", check_path, "program file")->required();
  check->add_option("--seed", seed, "also check 500 random programs from this seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : choo::cli::kParseError;
  }

  return on_big_stack([&] {
    if (*run) {
      config.mode = all ? RunConfig::Mode::All : RunConfig::Mode::First;
      return choo::cli::run(config, std::cout, std::cerr);
    }
    if (*parse) return choo::cli::parse_file(parse_path, std::cout, std::cerr);
    return choo::cli::oracle_check(check_path, seed, std::cout, std::cerr);
  });
}
