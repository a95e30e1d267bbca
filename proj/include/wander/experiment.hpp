#pragma once

// Experiment runner behind the `wander` command line tool.
//
//   wander <area|scaling|flowbox|poincare|collision|discrete|identities> --config FILE
//          [--seed U64] [--out DIR] [--quiet]
//
// Writes DIR/<subcommand>.csv and DIR/<subcommand>.json. Exit codes: 0 success,
// 1 other runtime error, 2 parse error, 3 precondition violation, 4 budget exceeded.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "wander/errors.hpp"

namespace wander::cli {

enum class Subcommand { area, scaling, flowbox, poincare, collision, discrete, identities };

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand sub);

struct RunOutput {
  std::string csv;
  std::string json;  // summary: config echo, seed, estimates
};

/// Runs one experiment from a configuration text. Throws wander::Error.
RunOutput run_experiment(Subcommand sub, const std::string& config_text, std::optional<std::uint64_t> seed_override);

int exit_code_for(ErrorKind kind);

int main(int argc, char** argv);

}  // namespace wander::cli
