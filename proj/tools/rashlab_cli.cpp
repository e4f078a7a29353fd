// rashlab — preprocessing vs. predictive-multiplicity workbench.
//
// Subcommands: complexity, cluster, balance, filter, rashomon,
// experiment run, report. Exit codes: 0 ok, 1 config/input error,
// 2 grid finished with failed cells.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rashlab/complexity.hpp"
#include "rashlab/dataset.hpp"
#include "rashlab/error.hpp"
#include "rashlab/experiment.hpp"
#include "rashlab/filtering.hpp"
#include "rashlab/rashomon.hpp"
#include "rashlab/report.hpp"
#include "rashlab/resampling.hpp"
#include "rashlab/rng.hpp"

namespace {

struct DatasetArgs {
  std::string csv;
  std::string target;
  std::string positive;

  void attach(CLI::App* cmd) {
    cmd->add_option("csv", csv, "input CSV file")->required();
    cmd->add_option("--target", target, "label column name")->required();
    cmd->add_option("--positive", positive, "positive class level (default: minority)");
  }

  rashlab::Dataset load() const {
    rashlab::CsvLoadReport report;
    rashlab::Dataset ds = rashlab::load_csv(csv, target, positive, &report);
    if (report.rows_dropped_missing > 0)
      std::cerr << "warning: dropped " << report.rows_dropped_missing
                << " rows with missing values\n";
    return ds;
  }
};

int cmd_complexity(const DatasetArgs& data, std::uint64_t seed, std::size_t max_n,
                   bool subsample, bool raw_space, bool legacy, const std::string& out_csv) {
  const rashlab::Dataset ds = data.load();
  rashlab::ComplexityOptions options;
  options.seed = seed;
  options.neighborhood_cutoff = max_n;
  options.subsample_large = subsample;
  options.standardize = !raw_space;
  options.legacy_orientation = legacy;

  const rashlab::ComplexityProfile profile = rashlab::complexity_profile(ds, options);
  const auto& names = rashlab::ComplexityProfile::measure_names();
  const auto values = profile.values();
  std::cout << "dataset: " << profile.dataset_name << "  (n=" << ds.n() << ", p=" << ds.p()
            << ", ir=" << std::fixed << std::setprecision(2) << rashlab::class_stats(ds).ir
            << ")\n";
  std::cout.unsetf(std::ios::fixed);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::cout << std::left << std::setw(6) << names[i];
    if (values[i])
      std::cout << std::setprecision(6) << *values[i] << "\n";
    else
      std::cout << "NA\n";
  }
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    rashlab::write_profile_csv_header(out);
    rashlab::write_profile_csv_row(profile, out);
    std::cout << "profile written to " << out_csv << "\n";
  }
  return 0;
}

int cmd_cluster(const std::string& profiles_dir, std::size_t k, std::uint64_t seed) {
  const auto profiles = rashlab::read_profiles_dir(profiles_dir);
  const rashlab::ClusterAssignment assignment = rashlab::cluster_datasets(profiles, k, seed);
  std::cout << "k=" << k << "  inertia=" << assignment.inertia << "\n";
  for (std::size_t i = 0; i < assignment.names.size(); ++i)
    std::cout << assignment.names[i] << "\tcluster " << assignment.cluster[i] << "\n";
  return 0;
}

int cmd_balance(const DatasetArgs& data, const std::string& method, std::size_t k, double ratio,
                std::uint64_t seed, const std::string& out_csv) {
  const rashlab::Dataset ds = data.load();
  rashlab::BalanceSpec spec;
  spec.method = rashlab::balance_method_from_string(method);
  spec.k = k;
  spec.target_ratio = ratio;
  spec.seed = seed;

  const rashlab::ResampleOutcome outcome = rashlab::balance(ds, spec);
  const rashlab::ClassStats before = rashlab::class_stats(ds);
  const rashlab::ClassStats after = rashlab::class_stats(outcome.data);
  std::cout << "method: " << method << "\n"
            << "rows: " << ds.n() << " -> " << outcome.data.n() << "\n"
            << "ir: " << before.ir << " -> " << after.ir << "\n"
            << "original " << outcome.trace.n_original << ", duplicates "
            << outcome.trace.n_duplicate << ", synthetic " << outcome.trace.n_synthetic
            << ", removed " << outcome.trace.n_removed;
  if (outcome.trace.n_skipped_noise > 0)
    std::cout << ", skipped noise anchors " << outcome.trace.n_skipped_noise;
  if (outcome.trace.fallback_uniform_allocation) std::cout << ", uniform-allocation fallback";
  std::cout << "\n";
  if (!out_csv.empty()) {
    rashlab::write_csv(outcome.data, out_csv);
    std::cout << "balanced dataset written to " << out_csv << "\n";
  }
  return 0;
}

int cmd_filter(const DatasetArgs& data, const std::string& mode, double alpha,
               const std::string& out_csv) {
  const rashlab::Dataset ds = data.load();
  rashlab::FilterSpec spec;
  spec.mode = rashlab::filter_mode_from_string(mode);
  spec.alpha = alpha;

  const rashlab::SelectedFeatureSet selection = rashlab::select_features(ds, spec);
  std::cout << "selected " << selection.selected.size() << "/" << ds.p() << " features:\n";
  for (const std::size_t j : selection.selected) std::cout << "  " << ds.feature_names[j] << "\n";
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    rashlab::write_filter_report_csv(selection, out);
    std::cout << "filter report written to " << out_csv << "\n";
  }
  return 0;
}

int cmd_rashomon(const DatasetArgs& data, double epsilon, std::size_t pool_size,
                 const std::string& loss, std::uint64_t seed, double test_fraction,
                 bool include_reference, const std::string& json_out) {
  const rashlab::Dataset ds = data.load();
  const rashlab::LossKind kind = rashlab::loss_kind_from_string(loss);

  const rashlab::SplitPair split = rashlab::stratified_split(ds, test_fraction, seed);
  const rashlab::SplitPair inner =
      rashlab::stratified_split(split.train, 0.2, rashlab::hash_combine(seed, "val"));

  std::vector<rashlab::TrainedModel> pool =
      rashlab::train_pool(inner.train, pool_size, rashlab::hash_combine(seed, "pool"));
  const rashlab::RashomonSet rset =
      rashlab::build_rashomon_set(std::move(pool), inner.test, epsilon, kind);
  const rashlab::PredictionMatrix pm =
      rashlab::prediction_matrix(rset, split.test.X, split.test.row_ids);

  rashlab::MultiplicityOptions mopts;
  mopts.include_reference = include_reference;
  const rashlab::MultiplicityReport report = rashlab::multiplicity_report(pm, epsilon, mopts);
  const std::vector<double> ref_scores = rset.pool[rset.reference_index].score_all(split.test.X);
  const double auc = rashlab::auc_score(ref_scores, split.test.y);

  std::cout << "pool " << rset.pool.size() << ", members " << rset.member_indices.size()
            << " (epsilon " << epsilon << ", loss " << rashlab::to_string(kind) << ")\n"
            << "reference loss " << rset.losses[rset.reference_index] << ", test AUC " << auc
            << "\n"
            << "discrepancy " << report.discrepancy << "\n"
            << "obscurity   " << report.obscurity << "\n";

  if (!json_out.empty()) {
    nlohmann::ordered_json j;
    j["dataset"] = ds.name;
    j["epsilon"] = epsilon;
    j["loss"] = rashlab::to_string(kind);
    j["pool_size"] = rset.pool.size();
    j["n_members"] = rset.member_indices.size();
    j["reference_index"] = rset.reference_index;
    j["auc_reference_test"] = auc;
    j["discrepancy"] = report.discrepancy;
    j["obscurity"] = report.obscurity;
    j["include_reference"] = include_reference;
    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rset.pool.size(); ++i) {
      const rashlab::ModelSpec& spec = rset.pool[i].spec();
      nlohmann::ordered_json m;
      m["index"] = i;
      m["family"] = rashlab::to_string(spec.family);
      m["max_depth"] = spec.max_depth;
      m["min_leaf"] = spec.min_leaf;
      m["n_trees"] = spec.n_trees;
      m["feature_subsample"] = spec.feature_subsample;
      m["learning_rate"] = spec.learning_rate;
      m["seed"] = spec.seed;
      m["loss"] = rset.losses[i];
      m["member"] = std::find(rset.member_indices.begin(), rset.member_indices.end(), i) !=
                    rset.member_indices.end();
      models.push_back(std::move(m));
    }
    j["models"] = std::move(models);
    std::ofstream out(json_out);
    out << j.dump(2) << "\n";
    std::cout << "report written to " << json_out << "\n";
  }
  return 0;
}

int cmd_experiment_run(const std::string& config_path, int threads, bool quiet) {
  const rashlab::ExperimentConfig config = rashlab::parse_config(config_path);
  rashlab::RunOptions options;
  options.threads = threads;
  options.progress = quiet ? nullptr : &std::cerr;
  const rashlab::ExperimentResult result = rashlab::run_experiment(config, options);
  std::cout << "records: " << result.records.size() << " (" << result.failed_cells
            << " failed cells)\n"
            << "results: " << result.results_path.string() << "\n"
            << "profiles: " << result.profiles_path.string() << "\n";
  return result.failed_cells > 0 ? 2 : 0;
}

int cmd_report(const std::string& store, const std::string& mode, const std::string& out_dir,
               bool stats) {
  rashlab::ReportOptions options;
  options.output_dir = out_dir;
  options.stats_battery = stats;
  const rashlab::ReportFiles files = rashlab::report(store, mode, options);
  for (const auto& path : files.written) std::cout << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"preprocessing vs. predictive multiplicity workbench"};
  app.require_subcommand(1);

  // complexity
  auto* complexity = app.add_subcommand("complexity", "compute the 17 complexity measures");
  DatasetArgs complexity_data;
  complexity_data.attach(complexity);
  std::uint64_t complexity_seed = 0;
  std::size_t max_n = 15000;
  bool subsample = false, raw_space = false, legacy = false;
  std::string complexity_out;
  complexity->add_option("--seed", complexity_seed, "seed for the seeded measures");
  complexity->add_option("--max-n", max_n, "neighborhood-measure size cutoff (default 15000)");
  complexity->add_flag("--subsample", subsample, "subsample to the cutoff instead of NA");
  complexity->add_flag("--raw", raw_space, "measure distances in raw feature space");
  complexity->add_flag("--legacy-orientation", legacy, "report T2=n/p and T3=n/k95");
  complexity->add_option("--out", complexity_out, "write the profile as CSV");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "k-means over complexity profiles");
  std::string profiles_dir;
  std::size_t cluster_k = 3;
  std::uint64_t cluster_seed = 0;
  cluster->add_option("--profiles", profiles_dir, "directory of profile CSVs")->required();
  cluster->add_option("--k", cluster_k, "number of clusters (default 3)");
  cluster->add_option("--seed", cluster_seed, "clustering seed");

  // balance
  auto* balance = app.add_subcommand("balance", "apply one balancing method");
  DatasetArgs balance_data;
  balance_data.attach(balance);
  std::string balance_method = "smote";
  std::size_t balance_k = 5;
  double balance_ratio = 1.0;
  std::uint64_t balance_seed = 0;
  std::string balance_out;
  balance->add_option("--method", balance_method,
                      "oversample|undersample|nearmiss|smote|adasyn|blsmote|dbsmote|rslsmote|"
                      "ansmote|slsmote|none");
  balance->add_option("--k", balance_k, "neighbor count (default 5)");
  balance->add_option("--ratio", balance_ratio, "target imbalance ratio (default 1.0)");
  balance->add_option("--seed", balance_seed, "seed");
  balance->add_option("--out", balance_out, "write the balanced dataset as CSV");

  // filter
  auto* filter = app.add_subcommand("filter", "statistical feature filtering");
  DatasetArgs filter_data;
  filter_data.attach(filter);
  std::string filter_mode = "intersect";
  double alpha = 0.05;
  std::string filter_out;
  filter->add_option("--filter", filter_mode, "none|cor|sig|intersect (default intersect)");
  filter->add_option("--alpha", alpha, "significance level (default 0.05)");
  filter->add_option("--out", filter_out, "write the per-feature test report CSV");

  // rashomon
  auto* rashomon = app.add_subcommand("rashomon", "train a pool and measure multiplicity");
  DatasetArgs rashomon_data;
  rashomon_data.attach(rashomon);
  double epsilon = 0.05;
  std::size_t pool_size = 50;
  std::string loss = "auc";
  std::uint64_t rashomon_seed = 0;
  double test_fraction = 0.25;
  bool include_reference = false;
  std::string json_out;
  rashomon->add_option("--epsilon", epsilon, "Rashomon parameter (default 0.05)");
  rashomon->add_option("--pool", pool_size, "model pool size (default 50)");
  rashomon->add_option("--loss", loss, "auc|error (default auc)");
  rashomon->add_option("--seed", rashomon_seed, "seed");
  rashomon->add_option("--test-fraction", test_fraction, "held-out fraction (default 0.25)");
  rashomon->add_flag("--include-reference", include_reference,
                     "average obscurity over all members, reference included");
  rashomon->add_option("--json", json_out, "write the full JSON report");

  // experiment run
  auto* experiment = app.add_subcommand("experiment", "experiment grid runner");
  auto* run = experiment->add_subcommand("run", "run the configured grid");
  std::string config_path;
  int threads = 1;
  bool quiet = false;
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--threads", threads, "worker threads (default 1)");
  run->add_flag("--quiet", quiet, "suppress per-cell progress");
  experiment->require_subcommand(1);

  // report
  auto* report = app.add_subcommand("report", "derive report CSVs from a results store");
  std::string store, report_mode = "rq1", report_out = ".";
  bool stats = false;
  report->add_option("store", store, "results.jsonl produced by `experiment run`")->required();
  report->add_option("--mode", report_mode, "rq1|rq5|rq6 (default rq1)");
  report->add_option("--out", report_out, "output directory (default .)");
  report->add_flag("--stats", stats, "also emit the statistical test battery CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (complexity->parsed())
      return cmd_complexity(complexity_data, complexity_seed, max_n, subsample, raw_space, legacy,
                            complexity_out);
    if (cluster->parsed()) return cmd_cluster(profiles_dir, cluster_k, cluster_seed);
    if (balance->parsed())
      return cmd_balance(balance_data, balance_method, balance_k, balance_ratio, balance_seed,
                         balance_out);
    if (filter->parsed()) return cmd_filter(filter_data, filter_mode, alpha, filter_out);
    if (rashomon->parsed())
      return cmd_rashomon(rashomon_data, epsilon, pool_size, loss, rashomon_seed, test_fraction,
                          include_reference, json_out);
    if (experiment->parsed()) return cmd_experiment_run(config_path, threads, quiet);
    if (report->parsed()) return cmd_report(store, report_mode, report_out, stats);
  } catch (const rashlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
