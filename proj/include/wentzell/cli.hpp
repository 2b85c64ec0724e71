#pragma once

#include "wentzell/evolution.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wentzell {

enum class Command { Run, Verify, Spectrum, Resolvent };

std::string to_string(Command c);
/// Throws std::invalid_argument for an unknown name.
Command parse_command(std::string_view name);

/// Right-hand side preset for the resolvent subcommand.
struct ResolventSpec {
  double lambda = 1.0;
  InitialSpec f; ///< constant, polynomial, random or dofs
};

struct CliConfig {
  ProblemConfig problem;
  std::optional<std::uint64_t> initial_seed; ///< falls back to `seed`
  ResolventSpec resolvent;
  std::optional<std::uint64_t> f_seed;
  std::size_t spectrum_count = 0; ///< 0 = every eigenvalue
  std::vector<std::string> suites{"all"};
  std::size_t verify_n = 16;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Parses and validates a JSON config.  Unknown keys and out-of-range values
/// raise ConfigError carrying the dotted key path.
CliConfig parse_config(std::string_view text);

/// Runs one subcommand, writing its artifacts under config.out_dir.
/// Returns 0 iff every check in the emitted report passes, 1 if a check
/// fails and 2 on error (error.json is written instead).
int dispatch(Command command, const CliConfig& config);

} // namespace wentzell
