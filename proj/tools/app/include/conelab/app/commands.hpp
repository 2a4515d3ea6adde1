#pragma once

#include "conelab/app/criteria.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace conelab::app {

enum ExitCode : int {
  exit_ok = 0,
  /// A primary criterion failed or the solver broke down.
  exit_failure = 1,
  /// Unreadable or invalid configuration, suite or snapshot input.
  exit_input_error = 2,
};

struct CommandOptions {
  std::string config;
  /// Defaults to output.directory of the configuration.
  std::optional<std::string> out;
  std::vector<std::string> overrides;
  /// fit: snapshot CSV (defaults to <out>/snapshots.csv).
  std::optional<std::string> snapshots;
  /// fit: snapshot time (defaults to the last one).
  std::optional<double> time;
};

/// Runs one of analyze | simulate | fit | mms | verify. Progress goes to
/// `log`, diagnostics to `err`.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& log, std::ostream& err);

struct SuiteEntry {
  int criterion = 0;
  std::vector<std::filesystem::path> scenarios;
};

/// Reads a suite file; scenario paths are resolved against its directory.
/// Throws ConfigError naming the offending entry.
std::vector<SuiteEntry> load_suite(const std::filesystem::path& path);

/// Evaluates one suite entry (loading its scenarios).
CriterionResult evaluate(const SuiteEntry& entry);

} // namespace conelab::app
