#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rashlab/complexity.hpp"
#include "rashlab/dataset.hpp"
#include "rashlab/filtering.hpp"
#include "rashlab/resampling.hpp"

namespace rashlab {

enum class PipelineOrder { filter_then_balance, balance_then_filter };

std::string to_string(PipelineOrder order);
PipelineOrder pipeline_order_from_string(std::string_view name);

struct DatasetRef {
  std::string name;
  std::string path;
  std::string target;
  std::string positive;  // optional; empty picks the minority class
};

struct ExperimentConfig {
  std::vector<DatasetRef> datasets;
  std::vector<std::string> balancing = {"none"};   // method names; `none` always ensured
  std::vector<std::string> filtering = {"none"};   // filter modes; `none` always ensured
  double epsilon = 0.05;
  std::size_t pool_size = 50;
  double target_ratio = 1.0;
  double test_fraction = 0.25;
  std::uint64_t master_seed = 0;
  std::size_t repeats = 1;
  std::string output_dir = "results";
  PipelineOrder pipeline_order = PipelineOrder::filter_then_balance;
};

/// Parses the JSON config, applies defaults and rejects unknown keys with a
/// nearest-key suggestion.
ExperimentConfig parse_config(const std::filesystem::path& path);

struct ResultRecord {
  std::string dataset;
  std::string balancing;
  std::string filtering;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::size_t n_rashomon_members = 0;
  double auc_reference = 0.0;
  double discrepancy = 0.0;
  double obscurity = 0.0;
  double performance_gain_vs_original = 0.0;
  int complexity_cluster = 0;  // 0 when too few datasets to cluster
  double wall_time = 0.0;      // seconds; excluded from determinism checks
  std::string pipeline_order;
  std::string error;           // empty on success
  std::string notes;           // e.g. recorded fallbacks
};

std::string to_json_line(const ResultRecord& record);
ResultRecord record_from_json_line(const std::string& line);

struct ExperimentResult {
  std::vector<ResultRecord> records;
  std::vector<ComplexityProfile> profiles;
  std::filesystem::path results_path;
  std::filesystem::path profiles_path;
  std::size_t failed_cells = 0;
};

struct RunOptions {
  int threads = 1;
  std::ostream* progress = nullptr;  // one line per finished cell when set
};

/// Runs the dataset x balancing x filtering x repeat grid. Failed cells are
/// recorded with an error tag and never abort the run. Results land in
/// `<output_dir>/results.jsonl` (grid order) next to
/// `<output_dir>/complexity_profiles.csv`.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::vector<ResultRecord> read_results(const std::filesystem::path& jsonl_path);

}  // namespace rashlab
