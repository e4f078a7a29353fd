#include "rashlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "rashlab/error.hpp"
#include "rashlab/models.hpp"
#include "rashlab/rashomon.hpp"
#include "rashlab/rng.hpp"

namespace rashlab {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string to_string(PipelineOrder order) {
  return order == PipelineOrder::filter_then_balance ? "filter_then_balance"
                                                     : "balance_then_filter";
}

PipelineOrder pipeline_order_from_string(std::string_view name) {
  if (name == "filter_then_balance") return PipelineOrder::filter_then_balance;
  if (name == "balance_then_filter") return PipelineOrder::balance_then_filter;
  raise(errc::config_invalid, "pipeline_order must be filter_then_balance or balance_then_filter");
}

namespace {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void reject_unknown_keys(const json& object, const std::vector<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    std::string best = known.front();
    std::size_t best_d = levenshtein(key, best);
    for (const auto& candidate : known) {
      const std::size_t d = levenshtein(key, candidate);
      if (d < best_d) {
        best_d = d;
        best = candidate;
      }
    }
    raise(errc::unknown_key, "unknown key '" + key + "' in " + where + " (did you mean '" + best + "'?)");
  }
}

void ensure_none_listed(std::vector<std::string>& conditions) {
  if (std::find(conditions.begin(), conditions.end(), "none") == conditions.end())
    conditions.insert(conditions.begin(), "none");
}

}  // namespace

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(errc::file_not_found, path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    raise(errc::config_invalid, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) raise(errc::config_invalid, "config root must be an object");

  static const std::vector<std::string> known = {
      "datasets",     "balancing",   "filtering",   "epsilon",
      "pool_size",    "target_ratio", "test_fraction", "master_seed",
      "repeats",      "output_dir",  "pipeline_order"};
  reject_unknown_keys(doc, known, "config");

  ExperimentConfig config;
  if (!doc.contains("datasets") || !doc["datasets"].is_array() || doc["datasets"].empty())
    raise(errc::missing_dataset, "config needs a nonempty 'datasets' list");
  static const std::vector<std::string> ds_known = {"name", "path", "target", "positive"};
  for (const auto& entry : doc["datasets"]) {
    if (!entry.is_object()) raise(errc::missing_dataset, "dataset entries must be objects");
    reject_unknown_keys(entry, ds_known, "dataset entry");
    DatasetRef ref;
    if (!entry.contains("path")) raise(errc::missing_dataset, "dataset entry lacks 'path'");
    ref.path = entry["path"].get<std::string>();
    if (!entry.contains("target")) raise(errc::missing_dataset, "dataset entry lacks 'target'");
    ref.target = entry["target"].get<std::string>();
    ref.name = entry.value("name", std::filesystem::path(ref.path).stem().string());
    ref.positive = entry.value("positive", "");
    config.datasets.push_back(std::move(ref));
  }

  if (doc.contains("balancing")) config.balancing = doc["balancing"].get<std::vector<std::string>>();
  if (doc.contains("filtering")) config.filtering = doc["filtering"].get<std::vector<std::string>>();
  config.epsilon = doc.value("epsilon", 0.05);
  config.pool_size = doc.value("pool_size", std::size_t{50});
  config.target_ratio = doc.value("target_ratio", 1.0);
  config.test_fraction = doc.value("test_fraction", 0.25);
  config.master_seed = doc.value("master_seed", std::uint64_t{0});
  config.repeats = doc.value("repeats", std::size_t{1});
  config.output_dir = doc.value("output_dir", std::string("results"));
  if (doc.contains("pipeline_order"))
    config.pipeline_order = pipeline_order_from_string(doc["pipeline_order"].get<std::string>());

  if (config.epsilon < 0.0) raise(errc::config_invalid, "epsilon must be >= 0");
  if (config.repeats < 1) raise(errc::config_invalid, "repeats must be >= 1");
  if (config.pool_size < 2) raise(errc::config_invalid, "pool_size must be >= 2");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0))
    raise(errc::config_invalid, "test_fraction must be in (0,1)");
  if (config.target_ratio < 1.0) raise(errc::config_invalid, "target_ratio must be >= 1");
  for (const auto& b : config.balancing) balance_method_from_string(b);
  for (const auto& f : config.filtering) filter_mode_from_string(f);

  // The none/none baseline must exist for the gain computation.
  ensure_none_listed(config.balancing);
  ensure_none_listed(config.filtering);
  return config;
}

std::string to_json_line(const ResultRecord& r) {
  ordered_json j;
  j["dataset"] = r.dataset;
  j["balancing"] = r.balancing;
  j["filtering"] = r.filtering;
  j["repeat"] = r.repeat;
  j["seed"] = r.seed;
  j["n_rashomon_members"] = r.n_rashomon_members;
  j["auc_reference"] = r.auc_reference;
  j["discrepancy"] = r.discrepancy;
  j["obscurity"] = r.obscurity;
  j["performance_gain_vs_original"] = r.performance_gain_vs_original;
  j["complexity_cluster"] = r.complexity_cluster;
  j["wall_time"] = r.wall_time;
  j["pipeline_order"] = r.pipeline_order;
  j["error"] = r.error;
  j["notes"] = r.notes;
  return j.dump();
}

ResultRecord record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    raise(errc::empty_store, std::string("malformed results line: ") + e.what());
  }
  ResultRecord r;
  r.dataset = j.value("dataset", "");
  r.balancing = j.value("balancing", "");
  r.filtering = j.value("filtering", "");
  r.repeat = j.value("repeat", std::size_t{0});
  r.seed = j.value("seed", std::uint64_t{0});
  r.n_rashomon_members = j.value("n_rashomon_members", std::size_t{0});
  r.auc_reference = j.value("auc_reference", 0.0);
  r.discrepancy = j.value("discrepancy", 0.0);
  r.obscurity = j.value("obscurity", 0.0);
  r.performance_gain_vs_original = j.value("performance_gain_vs_original", 0.0);
  r.complexity_cluster = j.value("complexity_cluster", 0);
  r.wall_time = j.value("wall_time", 0.0);
  r.pipeline_order = j.value("pipeline_order", "");
  r.error = j.value("error", "");
  r.notes = j.value("notes", "");
  return r;
}

namespace {

struct Cell {
  std::size_t dataset_index;
  std::string balancing;
  std::string filtering;
  std::size_t repeat;
};

struct CellOutput {
  std::size_t n_members = 0;
  double auc_reference = 0.0;
  double discrepancy = 0.0;
  double obscurity = 0.0;
  std::string notes;
};

CellOutput run_cell(const Dataset& ds, const ExperimentConfig& config, const Cell& cell,
                    std::uint64_t split_seed, std::uint64_t cell_seed) {
  CellOutput out;
  const SplitPair split = stratified_split(ds, config.test_fraction, split_seed);

  const FilterMode mode = filter_mode_from_string(cell.filtering);
  const BalanceMethod method = balance_method_from_string(cell.balancing);

  auto fit_filter = [&](const Dataset& fit_on) -> std::optional<SelectedFeatureSet> {
    if (mode == FilterMode::none) return std::nullopt;
    try {
      return select_features(fit_on, FilterSpec{0.05, mode});
    } catch (const Error& e) {
      if (e.code() != errc::no_features_selected) throw;
      out.notes += "filter_fallback_none;";
      return std::nullopt;
    }
  };

  auto run_balance = [&](const Dataset& fit) {
    BalanceSpec spec;
    spec.method = method;
    spec.target_ratio = config.target_ratio;
    spec.seed = hash_combine(cell_seed, "balance");
    try {
      return balance(fit, spec);
    } catch (const Error& e) {
      if (method == BalanceMethod::blsmote && e.code() == errc::empty_danger_set) {
        // No borderline minority points; SMOTE keeps the grid cell alive.
        out.notes += "blsmote_fallback_smote;";
        spec.method = BalanceMethod::smote;
        return balance(fit, spec);
      }
      throw;
    }
  };

  Dataset train_fit, validation, test;
  if (config.pipeline_order == PipelineOrder::filter_then_balance) {
    Dataset train = split.train;
    test = split.test;
    if (const auto selection = fit_filter(train)) {
      train = apply_selection(train, *selection);
      test = apply_selection(test, *selection);
    }
    const SplitPair inner = stratified_split(train, 0.2, hash_combine(cell_seed, "val"));
    validation = inner.test;
    train_fit = run_balance(inner.train).data;
  } else {
    const SplitPair inner = stratified_split(split.train, 0.2, hash_combine(cell_seed, "val"));
    Dataset balanced = run_balance(inner.train).data;
    validation = inner.test;
    test = split.test;
    if (const auto selection = fit_filter(balanced)) {
      balanced = apply_selection(balanced, *selection);
      validation = apply_selection(validation, *selection);
      test = apply_selection(test, *selection);
    }
    train_fit = std::move(balanced);
  }

  std::vector<TrainedModel> pool =
      train_pool(train_fit, config.pool_size, hash_combine(cell_seed, "pool"));
  const RashomonSet rset =
      build_rashomon_set(std::move(pool), validation, config.epsilon, LossKind::one_minus_auc);
  const PredictionMatrix pm = prediction_matrix(rset, test.X, test.row_ids);

  out.n_members = rset.member_indices.size();
  out.discrepancy = discrepancy(pm);
  out.obscurity = obscurity(pm);
  const std::vector<double> ref_scores = rset.pool[rset.reference_index].score_all(test.X);
  out.auc_reference = auc_score(ref_scores, test.y);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig cfg = config;
  ensure_none_listed(cfg.balancing);
  ensure_none_listed(cfg.filtering);
  if (cfg.datasets.empty()) raise(errc::missing_dataset, "no datasets configured");

  std::vector<Dataset> datasets;
  datasets.reserve(cfg.datasets.size());
  for (const auto& ref : cfg.datasets) {
    Dataset ds = load_csv(ref.path, ref.target, ref.positive);
    ds.name = ref.name;
    datasets.push_back(std::move(ds));
  }

  ExperimentResult result;

  // One complexity profile per dataset, then the cluster labels every record
  // carries. Fewer than three datasets stay unclustered (cluster id 0).
  std::vector<int> cluster_of(datasets.size(), 0);
  for (const auto& ds : datasets) {
    ComplexityOptions copts;
    copts.seed = hash_combine(hash_combine(cfg.master_seed, ds.name), "complexity");
    result.profiles.push_back(complexity_profile(ds, copts));
  }
  if (datasets.size() >= 3) {
    const ClusterAssignment assignment =
        cluster_datasets(result.profiles, 3, hash_combine(cfg.master_seed, "cluster"));
    cluster_of = assignment.cluster;
  }

  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (const auto& bal : cfg.balancing)
      for (const auto& filt : cfg.filtering)
        for (std::size_t rep = 0; rep < cfg.repeats; ++rep)
          cells.push_back({d, bal, filt, rep});

  std::vector<ResultRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= cells.size()) return;
      const Cell& cell = cells[index];
      const Dataset& ds = datasets[cell.dataset_index];

      ResultRecord rec;
      rec.dataset = ds.name;
      rec.balancing = cell.balancing;
      rec.filtering = cell.filtering;
      rec.repeat = cell.repeat;
      rec.pipeline_order = to_string(cfg.pipeline_order);
      rec.complexity_cluster = cluster_of[cell.dataset_index];

      const std::uint64_t split_seed = hash_combine(
          hash_combine(hash_combine(cfg.master_seed, ds.name), "split"), cell.repeat);
      std::uint64_t cell_seed = hash_combine(cfg.master_seed, ds.name);
      cell_seed = hash_combine(cell_seed, cell.balancing);
      cell_seed = hash_combine(cell_seed, cell.filtering);
      cell_seed = hash_combine(cell_seed, cell.repeat);
      rec.seed = cell_seed;

      const auto started = std::chrono::steady_clock::now();
      try {
        const CellOutput out = run_cell(ds, cfg, cell, split_seed, cell_seed);
        rec.n_rashomon_members = out.n_members;
        rec.auc_reference = out.auc_reference;
        rec.discrepancy = out.discrepancy;
        rec.obscurity = out.obscurity;
        rec.notes = out.notes;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      records[index] = std::move(rec);
      if (options.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        const ResultRecord& r = records[index];
        *options.progress << "[" << (index + 1) << "/" << cells.size() << "] " << r.dataset << " "
                          << r.balancing << "/" << r.filtering << " rep " << r.repeat
                          << (r.error.empty() ? "" : " ERROR: " + r.error) << "\n";
      }
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::future<void>> futures;
    for (int t = 0; t < threads; ++t) futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) f.get();
  }

  // Performance gain against the none/none baseline of the same dataset and
  // repeat.
  std::map<std::pair<std::string, std::size_t>, const ResultRecord*> baselines;
  for (const auto& rec : records)
    if (rec.balancing == "none" && rec.filtering == "none" && rec.error.empty())
      baselines[{rec.dataset, rec.repeat}] = &rec;
  for (auto& rec : records) {
    if (!rec.error.empty()) continue;
    const auto it = baselines.find({rec.dataset, rec.repeat});
    if (it == baselines.end()) {
      rec.notes += "baseline_missing;";
      continue;
    }
    rec.performance_gain_vs_original = performance_gain(rec.auc_reference, it->second->auc_reference);
  }

  const std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);
  result.results_path = out_dir / "results.jsonl";
  result.profiles_path = out_dir / "complexity_profiles.csv";

  std::ofstream store(result.results_path);
  if (!store) raise(errc::file_not_found, "cannot write " + result.results_path.string());
  for (const auto& rec : records) {
    store << to_json_line(rec) << '\n';
    if (!rec.error.empty()) ++result.failed_cells;
  }

  std::ofstream profile_out(result.profiles_path);
  write_profile_csv_header(profile_out);
  for (const auto& profile : result.profiles) write_profile_csv_row(profile, profile_out);

  result.records = std::move(records);
  return result;
}

std::vector<ResultRecord> read_results(const std::filesystem::path& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) raise(errc::file_not_found, jsonl_path.string());
  std::vector<ResultRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json_line(line));
  }
  if (records.empty()) raise(errc::empty_store, "no records in " + jsonl_path.string());
  return records;
}

}  // namespace rashlab
