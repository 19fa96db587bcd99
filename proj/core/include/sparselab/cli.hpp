#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace sparselab::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_numerical = 3,
  exit_io = 4,
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

/// Parses, validates and runs one experiment; writes <out>/<experiment>.json
/// and <out>/<experiment>.csv and prints a summary to `out`. Errors go to
/// `err` and select the exit code.
int run(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err);

/// Validation plus hypothesis checks, without running the experiment.
int validate(const std::string& config_path, const Overrides& overrides, std::ostream& out, std::ostream& err);

/// Resolved config as canonical JSON text; throws like run() would.
std::string resolved_config(const std::string& config_path, const Overrides& overrides = {});

/// FNV-1a hash (16 hex digits) of the semantic part of the resolved config.
std::string config_hash(const std::string& config_path, const Overrides& overrides = {});

}  // namespace sparselab::cli
