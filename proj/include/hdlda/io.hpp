#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdlda/bench.hpp"
#include "hdlda/dataset.hpp"
#include "hdlda/model.hpp"

namespace hdlda {

/// Malformed data file. The message carries the source and the row/column.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration. The message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV datasets: header x1,...,xp,y (columns in any order), one row per
// observation, labels in {0,1}, '.' decimal separator.
// ---------------------------------------------------------------------------

/// Row numbers in error messages count the header as row 1.
Dataset read_dataset(std::istream& in, const std::string& source = "<stream>");
Dataset read_dataset(const std::string& path);

/// Writes 17 significant digits, so finite doubles round-trip exactly.
void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset(const std::string& path, const Dataset& data);

/// Labels one per line under a "y" header.
void write_labels(std::ostream& out, const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// JSON documents. Every document carries "schema_version" and "kind".
// ---------------------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

/// Experiment configuration. Keys (all optional except n and p):
///   simulation        "sim1" | "sim2" | "sim2_literal" | "custom"
///   custom_m10        [double]       leading mean gap (custom)
///   custom_variances  [double]       cycled variances (custom)
///   n, p              [int]
///   procedures        [string]       default: every procedure
///   replicates        int
///   master_seed       uint64
///   class_sizes       "total" | "per_class"
///   risk              "closed" | "test:SIZE"
///   split             "half" | "none"
///   mode              "paper" | "exact"
///   fisher_variance   "global" | "within_class"
///   standardize_fair  bool         FAIR on standardized statistics
///   fdr_grid, hc_grid [double]
///   cv_folds          int
///   fixed_param       double | null
/// Unknown keys throw ConfigError.
ExperimentConfig parse_experiment_config(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

std::string bench_report_to_json(const BenchReport& report);
std::string prop1_report_to_json(const Prop1Report& report);
std::string sandwich_report_to_json(const SandwichReport& report, bool include_rows = false);

/// Description of the model behind `simulate`.
struct SimulationSpec {
  Simulation simulation = Simulation::sim1;
  std::vector<double> custom_m10;
  std::vector<double> custom_variances;
  std::size_t p = 100;
  std::size_t n0 = 25;
  std::size_t n1 = 25;
  std::uint64_t seed = 0;
};
/// Keys: simulation, custom_m10, custom_variances, p, n0, n1, seed.
SimulationSpec parse_simulation_spec(const std::string& text);

/// A fitted rule with the settings that produced it.
struct ModelFile {
  LinearRule rule;
  std::string method;
  std::map<std::string, std::string> settings;
  std::optional<double> param;
  std::vector<std::size_t> selected;
};
std::string model_file_to_json(const ModelFile& model);
/// Throws DataError on a malformed or mismatched file.
ModelFile parse_model_file(const std::string& text);

/// Bound grid as CSV with header d,alpha,d0,lower,excess,upper.
void write_bound_rows(std::ostream& out, const std::vector<BoundRow>& rows);

std::string read_text_file(const std::string& path);
/// Writes via a temporary file and rename, so readers never see a partial file.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hdlda
