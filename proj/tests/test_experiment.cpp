#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rashlab/error.hpp"
#include "rashlab/experiment.hpp"
#include "rashlab/report.hpp"
#include "support/synthetic.hpp"

using namespace rashlab;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_dataset_csv(const std::filesystem::path& dir, const std::string& name,
                                        const synthetic::BlobSpec& spec) {
  const Dataset ds = synthetic::gaussian_blobs(spec);
  const auto path = dir / (name + ".csv");
  write_csv(ds, path);
  return path;
}

std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& body) {
  const auto path = dir / "config.json";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("parse_config applies defaults") {
  const auto dir = temp_dir("rl_cfg_defaults");
  const auto csv = write_dataset_csv(dir, "alpha", {.n_majority = 60, .n_minority = 20, .seed = 1});
  const auto cfg = write_config(dir, R"({
    "datasets": [{"name": "alpha", "path": ")" + csv.string() + R"(", "target": "label"}]
  })");
  const ExperimentConfig config = parse_config(cfg);
  CHECK(config.epsilon == doctest::Approx(0.05));
  CHECK(config.target_ratio == doctest::Approx(1.0));
  CHECK(config.pool_size == 50);
  CHECK(config.test_fraction == doctest::Approx(0.25));
  CHECK(config.repeats == 1);
  CHECK(config.pipeline_order == PipelineOrder::filter_then_balance);
  // `none` conditions ensured
  CHECK(std::find(config.balancing.begin(), config.balancing.end(), "none") !=
        config.balancing.end());
  CHECK(std::find(config.filtering.begin(), config.filtering.end(), "none") !=
        config.filtering.end());
}

TEST_CASE("parse_config rejects unknown keys with a suggestion") {
  const auto dir = temp_dir("rl_cfg_unknown");
  const auto csv = write_dataset_csv(dir, "beta", {.n_majority = 30, .n_minority = 10, .seed = 2});
  const auto cfg = write_config(dir, R"({
    "datasets": [{"path": ")" + csv.string() + R"(", "target": "label"}],
    "epsilonn": 0.1
  })");
  try {
    parse_config(cfg);
    FAIL("expected UnknownKey");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unknown_key);
    CHECK(std::string(e.what()).find("epsilon") != std::string::npos);  // suggestion present
  }
}

TEST_CASE("parse_config requires datasets and target") {
  const auto dir = temp_dir("rl_cfg_missing");
  const auto no_datasets = write_config(dir, R"({"epsilon": 0.05})");
  CHECK_THROWS_AS(parse_config(no_datasets), Error);

  const auto no_target = write_config(dir, R"({"datasets": [{"path": "x.csv"}]})");
  try {
    parse_config(no_target);
    FAIL("expected MissingDataset");
  } catch (const Error& e) {
    CHECK(e.code() == errc::missing_dataset);
  }

  const auto bad_method = write_config(dir, R"({
    "datasets": [{"path": "x.csv", "target": "label"}],
    "balancing": ["smoote"]
  })");
  CHECK_THROWS_AS(parse_config(bad_method), Error);
}

TEST_CASE("run_experiment produces the full grid deterministically") {
  const auto dir = temp_dir("rl_grid");
  const auto csv_a = write_dataset_csv(
      dir, "alpha",
      {.n_majority = 90, .n_minority = 30, .informative = 2, .noise = 2, .label_noise = 0.05,
       .seed = 3, .name = "alpha"});
  const auto csv_b = write_dataset_csv(
      dir, "beta",
      {.n_majority = 80, .n_minority = 20, .informative = 2, .noise = 2, .label_noise = 0.1,
       .seed = 4, .name = "beta"});

  ExperimentConfig config;
  config.datasets = {{"alpha", csv_a.string(), "label", "1"},
                     {"beta", csv_b.string(), "label", "1"}};
  config.balancing = {"none", "oversample", "smote"};
  config.filtering = {"none", "sig"};
  config.pool_size = 8;
  config.repeats = 1;
  config.master_seed = 99;
  config.output_dir = (dir / "out1").string();

  const ExperimentResult first = run_experiment(config);
  // 2 datasets x 3 balancing x 2 filtering x 1 repeat
  CHECK(first.records.size() == 12);
  CHECK(first.failed_cells == 0);
  CHECK(std::filesystem::exists(first.results_path));
  CHECK(std::filesystem::exists(first.profiles_path));

  // baseline cells exist and carry zero gain
  std::size_t baselines = 0;
  for (const auto& r : first.records) {
    if (r.balancing == "none" && r.filtering == "none") {
      ++baselines;
      CHECK(r.performance_gain_vs_original == doctest::Approx(0.0));
    }
    CHECK(r.discrepancy >= 0.0);
    CHECK(r.discrepancy <= 1.0);
    CHECK(r.obscurity <= r.discrepancy + 1e-12);
    CHECK(r.n_rashomon_members >= 1);
    CHECK(r.pipeline_order == "filter_then_balance");
  }
  CHECK(baselines == 2);

  // rerun into a different directory: identical metric fields, wall time free
  config.output_dir = (dir / "out2").string();
  const ExperimentResult second = run_experiment(config);
  REQUIRE(second.records.size() == first.records.size());
  for (std::size_t i = 0; i < first.records.size(); ++i) {
    const auto& a = first.records[i];
    const auto& b = second.records[i];
    CHECK(a.dataset == b.dataset);
    CHECK(a.balancing == b.balancing);
    CHECK(a.filtering == b.filtering);
    CHECK(a.seed == b.seed);
    CHECK(a.n_rashomon_members == b.n_rashomon_members);
    CHECK(a.auc_reference == b.auc_reference);      // bit-identical
    CHECK(a.discrepancy == b.discrepancy);
    CHECK(a.obscurity == b.obscurity);
    CHECK(a.performance_gain_vs_original == b.performance_gain_vs_original);
  }

  // thread count must not change the results either
  RunOptions parallel;
  parallel.threads = 4;
  config.output_dir = (dir / "out3").string();
  const ExperimentResult third = run_experiment(config, parallel);
  for (std::size_t i = 0; i < first.records.size(); ++i) {
    CHECK(first.records[i].discrepancy == third.records[i].discrepancy);
    CHECK(first.records[i].obscurity == third.records[i].obscurity);
    CHECK(first.records[i].auc_reference == third.records[i].auc_reference);
  }
}

TEST_CASE("balance_then_filter order runs and is recorded") {
  const auto dir = temp_dir("rl_order");
  const auto csv = write_dataset_csv(
      dir, "ordered",
      {.n_majority = 90, .n_minority = 30, .informative = 2, .noise = 2, .label_noise = 0.05,
       .seed = 21, .name = "ordered"});
  ExperimentConfig config;
  config.datasets = {{"ordered", csv.string(), "label", "1"}};
  config.balancing = {"none", "smote"};
  config.filtering = {"none", "sig"};
  config.pool_size = 6;
  config.master_seed = 5;
  config.pipeline_order = PipelineOrder::balance_then_filter;
  config.output_dir = (dir / "out").string();

  const ExperimentResult result = run_experiment(config);
  CHECK(result.failed_cells == 0);
  for (const auto& r : result.records) CHECK(r.pipeline_order == "balance_then_filter");

  // the two orders genuinely differ: same config under filter_then_balance
  // produces different cells wherever filtering is active
  config.pipeline_order = PipelineOrder::filter_then_balance;
  config.output_dir = (dir / "out2").string();
  const ExperimentResult other = run_experiment(config);
  bool any_difference = false;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    if (result.records[i].filtering == "none") continue;
    any_difference |= result.records[i].discrepancy != other.records[i].discrepancy ||
                      result.records[i].auc_reference != other.records[i].auc_reference;
  }
  CHECK(any_difference);
}

TEST_CASE("failed cells carry an error tag and do not abort the grid") {
  const auto dir = temp_dir("rl_grid_err");
  // 6 minority training rows and the default k = 5: nearmiss survives but
  // smote's k >= n_min check trips inside some validation carve
  const auto csv = write_dataset_csv(
      dir, "tiny",
      {.n_majority = 60, .n_minority = 7, .informative = 2, .noise = 0, .seed = 5,
       .name = "tiny"});
  ExperimentConfig config;
  config.datasets = {{"tiny", csv.string(), "label", "1"}};
  config.balancing = {"none", "smote"};
  config.filtering = {"none"};
  config.pool_size = 6;
  config.master_seed = 7;
  config.output_dir = (dir / "out").string();

  const ExperimentResult result = run_experiment(config);
  CHECK(result.records.size() == 2);
  std::size_t failed = 0, ok = 0;
  for (const auto& r : result.records) {
    if (r.error.empty()) ++ok;
    else ++failed;
  }
  CHECK(failed == 1);  // the smote cell: 7 minority -> ~4 after split+carve, k=5 too large
  CHECK(ok == 1);
  CHECK(result.failed_cells == 1);
}

TEST_CASE("results store round-trips through JSON lines") {
  ResultRecord r;
  r.dataset = "alpha";
  r.balancing = "smote";
  r.filtering = "sig";
  r.repeat = 2;
  r.seed = 12345;
  r.n_rashomon_members = 7;
  r.auc_reference = 0.875;
  r.discrepancy = 0.25;
  r.obscurity = 0.125;
  r.performance_gain_vs_original = -0.05;
  r.complexity_cluster = 2;
  r.wall_time = 1.5;
  r.pipeline_order = "filter_then_balance";
  const ResultRecord back = record_from_json_line(to_json_line(r));
  CHECK(back.dataset == r.dataset);
  CHECK(back.balancing == r.balancing);
  CHECK(back.seed == r.seed);
  CHECK(back.auc_reference == r.auc_reference);
  CHECK(back.discrepancy == r.discrepancy);
  CHECK(back.complexity_cluster == r.complexity_cluster);
}

TEST_CASE("report modes emit the expected CSV shapes") {
  const auto dir = temp_dir("rl_report");
  const auto csv_a = write_dataset_csv(
      dir, "alpha",
      {.n_majority = 70, .n_minority = 20, .informative = 2, .noise = 1, .label_noise = 0.08,
       .seed = 8, .name = "alpha"});
  const auto csv_b = write_dataset_csv(
      dir, "beta",
      {.n_majority = 60, .n_minority = 20, .informative = 2, .noise = 1, .label_noise = 0.12,
       .seed = 9, .name = "beta"});
  const auto csv_c = write_dataset_csv(
      dir, "gamma",
      {.n_majority = 66, .n_minority = 22, .informative = 2, .noise = 1, .label_noise = 0.15,
       .seed = 10, .name = "gamma"});

  ExperimentConfig config;
  config.datasets = {{"alpha", csv_a.string(), "label", "1"},
                     {"beta", csv_b.string(), "label", "1"},
                     {"gamma", csv_c.string(), "label", "1"}};
  config.balancing = {"none", "oversample", "undersample"};
  config.filtering = {"none"};
  config.pool_size = 6;
  config.master_seed = 13;
  config.output_dir = (dir / "out").string();
  const ExperimentResult result = run_experiment(config);

  ReportOptions options;
  options.output_dir = dir / "reports";
  options.stats_battery = true;

  const ReportFiles rq1 = report(result.results_path, "rq1", options);
  bool has_distributions = false;
  for (const auto& f : rq1.written) has_distributions |= f.filename() == "rq1_distributions.csv";
  CHECK(has_distributions);
  {
    std::ifstream in(*std::find_if(rq1.written.begin(), rq1.written.end(), [](const auto& f) {
      return f.filename() == "rq1_distributions.csv";
    }));
    std::string line;
    std::getline(in, line);  // header
    std::size_t rows = 0;
    while (std::getline(in, line)) rows += !line.empty();
    CHECK(rows == 6);  // 3 balancing conditions x 2 metrics
  }

  const ReportFiles rq5 = report(result.results_path, "rq5", options);
  bool has_tradeoff = false;
  for (const auto& f : rq5.written) has_tradeoff |= f.filename() == "rq5_tradeoff.csv";
  CHECK(has_tradeoff);

  const ReportFiles rq6 = report(result.results_path, "rq6", options);
  const auto rq6_file = std::find_if(rq6.written.begin(), rq6.written.end(), [](const auto& f) {
    return f.filename() == "rq6_correlations.csv";
  });
  REQUIRE(rq6_file != rq6.written.end());
  {
    std::ifstream in(*rq6_file);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) rows += !line.empty();
    CHECK(rows == 17);  // one row per complexity measure
  }

  CHECK_THROWS_AS(report(result.results_path, "rq9", options), Error);
  CHECK_THROWS_AS(report(dir / "missing.jsonl", "rq1", options), Error);
}
