#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posh/experiment.hpp"

namespace posh::cli {

/// Invalid or unknown configuration; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  std::string source = "synthetic";  // synthetic | fvecs | csv | raw
  std::string name;
  std::string path;
  std::string labels;        // ivecs with one label per record (fvecs, raw)
  std::string query_path;
  std::string query_labels;
  std::string label_column;  // csv
  std::size_t dim = 0;       // raw
  std::size_t queries = 1000;

  std::size_t classes = 10;
  std::size_t per_class = 1100;
  std::size_t d = 64;
  double separation = 4.0;
  double noise = 1.0;
  std::uint64_t seed = 7;
};

struct RunConfig {
  DatasetSpec dataset;
  ExperimentConfig experiment;
};

/// Schema of the configuration document: nested objects of leaf type names
/// ("string", "uint", "number", "bool").
const nlohmann::json& config_schema();

/// Applies "a.b=value" overrides; the value is read as JSON when it parses
/// and as a plain string otherwise.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

/// Checks `doc` against the schema and converts it. Unknown keys, wrong types
/// and inconsistent settings raise ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

nlohmann::json read_config_file(const std::string& path);

/// Loads targets and queries as described by `ds`; queries are sampled
/// from the pool with split_seed when no query file is given.
ExperimentData load_experiment_data(const DatasetSpec& ds, std::uint64_t split_seed);

/// Single-file loader with format picked from the extension (.fvecs, .csv,
/// anything else as raw f32 needing `dim`).
Dataset load_any(const std::string& path, std::size_t dim, const std::string& label_column);

}  // namespace posh::cli
