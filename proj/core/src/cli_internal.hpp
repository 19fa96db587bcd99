#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparselab/cli.hpp"
#include "sparselab/lattice.hpp"

namespace sparselab::cli::detail {

// std::map-backed objects keep keys sorted, so dump() is canonical.
using Json = nlohmann::json;

struct Config {
  Json resolved;  // every semantic field, defaults filled in
  std::string experiment;
  int threads = 1;
  std::string output_dir = "results";
};

Config load_config(const std::string& path, const Overrides& overrides);

std::string hash_of(const Json& resolved);

/// Potential described by resolved["potential"] within resolved["box"].
Potential build_potential(const Json& resolved);
SparseRule build_rule(const Json& resolved);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string cell(double v);
std::string cell(std::int64_t v);
std::string cell(const std::string& v);
std::string cell(const Site& n);

struct Result {
  Json summary = Json::object();
  Table table;
  std::vector<std::string> warnings;
};

Result run_experiment(const Config& config);

struct Check {
  std::string name;
  bool passed = true;
  bool warning_only = false;
  std::string detail;
};

std::vector<Check> hypothesis_checks(const Config& config);

}  // namespace sparselab::cli::detail
