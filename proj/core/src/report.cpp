#include "rashlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "rashlab/complexity.hpp"
#include "rashlab/error.hpp"
#include "rashlab/stat_tests.hpp"

namespace rashlab {

namespace {

struct Quartiles {
  double q1 = 0.0, median = 0.0, q3 = 0.0, mean = 0.0;
};

Quartiles summarize(std::vector<double> values) {
  Quartiles q;
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto at_fraction = [&](double f) {
    const double pos = f * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (values[hi] - values[lo]) * (pos - std::floor(pos));
  };
  q.q1 = at_fraction(0.25);
  q.median = at_fraction(0.5);
  q.q3 = at_fraction(0.75);
  for (const double v : values) q.mean += v;
  q.mean /= static_cast<double>(values.size());
  return q;
}

double median_of(std::vector<double> values) { return summarize(std::move(values)).median; }

std::vector<ResultRecord> clean_records(const std::filesystem::path& store) {
  std::vector<ResultRecord> all = read_results(store);
  std::vector<ResultRecord> ok;
  for (auto& r : all)
    if (r.error.empty()) ok.push_back(std::move(r));
  if (ok.empty()) raise(errc::empty_store, "every record in the store is error-tagged");
  return ok;
}

std::vector<std::string> ordered_conditions(const std::vector<ResultRecord>& records,
                                            bool balancing) {
  std::vector<std::string> order;
  for (const auto& r : records) {
    const std::string& value = balancing ? r.balancing : r.filtering;
    if (std::find(order.begin(), order.end(), value) == order.end()) order.push_back(value);
  }
  return order;
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name,
                       std::vector<std::filesystem::path>& written) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / name;
  std::ofstream out(path);
  if (!out) raise(errc::file_not_found, "cannot write " + path.string());
  out.precision(10);
  written.push_back(path);
  return out;
}

void write_plot_points(const std::vector<ResultRecord>& records,
                       const std::filesystem::path& dir,
                       std::vector<std::filesystem::path>& written) {
  std::ofstream out = open_out(dir, "plot_points.csv", written);
  out << "dataset,balancing,filtering,repeat,complexity_cluster,discrepancy,obscurity,"
         "performance_gain,auc_reference,n_rashomon_members\n";
  for (const auto& r : records)
    out << r.dataset << ',' << r.balancing << ',' << r.filtering << ',' << r.repeat << ','
        << r.complexity_cluster << ',' << r.discrepancy << ',' << r.obscurity << ','
        << r.performance_gain_vs_original << ',' << r.auc_reference << ','
        << r.n_rashomon_members << '\n';
}

using MetricOf = double (*)(const ResultRecord&);

double metric_discrepancy(const ResultRecord& r) { return r.discrepancy; }
double metric_obscurity(const ResultRecord& r) { return r.obscurity; }
double metric_gain(const ResultRecord& r) { return r.performance_gain_vs_original; }

std::vector<std::vector<double>> group_by_condition(const std::vector<ResultRecord>& records,
                                                    const std::vector<std::string>& conditions,
                                                    bool balancing, MetricOf metric) {
  std::vector<std::vector<double>> groups(conditions.size());
  for (const auto& r : records) {
    const std::string& value = balancing ? r.balancing : r.filtering;
    const auto it = std::find(conditions.begin(), conditions.end(), value);
    groups[static_cast<std::size_t>(it - conditions.begin())].push_back(metric(r));
  }
  return groups;
}

void report_rq1(const std::vector<ResultRecord>& records, const std::filesystem::path& dir,
                std::vector<std::filesystem::path>& written) {
  const std::vector<std::string> conditions = ordered_conditions(records, true);
  const std::pair<const char*, MetricOf> metrics[] = {{"discrepancy", metric_discrepancy},
                                                      {"obscurity", metric_obscurity}};

  std::ofstream dist = open_out(dir, "rq1_distributions.csv", written);
  dist << "balancing,metric,n,median,q1,q3,mean\n";
  std::ofstream tests = open_out(dir, "rq1_tests.csv", written);
  tests << "metric,method,statistic,df,p\n";

  for (const auto& [name, metric] : metrics) {
    const auto groups = group_by_condition(records, conditions, true, metric);
    for (std::size_t g = 0; g < conditions.size(); ++g) {
      const Quartiles q = summarize(groups[g]);
      dist << conditions[g] << ',' << name << ',' << groups[g].size() << ',' << q.median << ','
           << q.q1 << ',' << q.q3 << ',' << q.mean << '\n';
    }
    if (conditions.size() >= 2 &&
        std::none_of(groups.begin(), groups.end(), [](const auto& g) { return g.empty(); })) {
      const TestReport kw = kruskal_wallis(groups, conditions);
      tests << name << ",kruskal_wallis," << kw.statistic << ',' << kw.df << ',' << kw.p << '\n';

      const PosthocReport dunn = dunn_posthoc(groups, PAdjust::benjamini_hochberg, conditions);
      std::ofstream pairwise =
          open_out(dir, std::string("rq1_dunn_") + name + ".csv", written);
      pairwise << "group_a,group_b,z,p_adj\n";
      for (std::size_t i = 0; i < conditions.size(); ++i)
        for (std::size_t j = i + 1; j < conditions.size(); ++j)
          pairwise << conditions[i] << ',' << conditions[j] << ',' << dunn.z(i, j) << ','
                   << dunn.p(i, j) << '\n';
    }
  }
}

void report_rq5(const std::vector<ResultRecord>& records, const std::filesystem::path& dir,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out = open_out(dir, "rq5_tradeoff.csv", written);
  out << "balancing,filtering,n,median_gain,median_discrepancy,median_obscurity\n";
  const auto balancing = ordered_conditions(records, true);
  const auto filtering = ordered_conditions(records, false);
  for (const auto& bal : balancing) {
    for (const auto& filt : filtering) {
      std::vector<double> gain, disc, obsc;
      for (const auto& r : records) {
        if (r.balancing != bal || r.filtering != filt) continue;
        gain.push_back(r.performance_gain_vs_original);
        disc.push_back(r.discrepancy);
        obsc.push_back(r.obscurity);
      }
      if (gain.empty()) continue;
      out << bal << ',' << filt << ',' << gain.size() << ',' << median_of(gain) << ','
          << median_of(disc) << ',' << median_of(obsc) << '\n';
    }
  }
}

void report_rq6(const std::vector<ResultRecord>& records, const std::filesystem::path& store,
                const std::filesystem::path& dir, std::vector<std::filesystem::path>& written) {
  const std::filesystem::path profiles_path = store.parent_path() / "complexity_profiles.csv";
  const std::vector<ComplexityProfile> profiles = read_profiles_csv(profiles_path);

  // Per-dataset medians of the disagreement metrics across all grid cells.
  std::map<std::string, std::vector<double>> obsc_by_ds, disc_by_ds;
  for (const auto& r : records) {
    obsc_by_ds[r.dataset].push_back(r.obscurity);
    disc_by_ds[r.dataset].push_back(r.discrepancy);
  }

  std::ofstream out = open_out(dir, "rq6_correlations.csv", written);
  out << "measure,rho_obscurity,p_obscurity,rho_discrepancy,p_discrepancy,n,na\n";
  const auto& names = ComplexityProfile::measure_names();
  for (std::size_t j = 0; j < ComplexityProfile::count; ++j) {
    std::vector<double> measure, obsc, disc;
    for (const auto& profile : profiles) {
      const auto value = profile.values()[j];
      const auto it = obsc_by_ds.find(profile.dataset_name);
      if (!value || it == obsc_by_ds.end()) continue;
      measure.push_back(*value);
      obsc.push_back(median_of(it->second));
      disc.push_back(median_of(disc_by_ds[profile.dataset_name]));
    }
    bool na = measure.size() < 3;
    if (!na) {
      const double first = measure.front();
      na = std::all_of(measure.begin(), measure.end(),
                       [&](double v) { return v == first; });
    }
    if (na) {
      out << names[j] << ",NA,NA,NA,NA," << measure.size() << ",1\n";
      continue;
    }
    const CorrelationReport vs_obsc = spearman_test(measure, obsc);
    const CorrelationReport vs_disc = spearman_test(measure, disc);
    out << names[j] << ',' << vs_obsc.rho << ',' << vs_obsc.p << ',' << vs_disc.rho << ','
        << vs_disc.p << ',' << measure.size() << ",0\n";
  }
}

void report_stats_battery(const std::vector<ResultRecord>& records,
                          const std::filesystem::path& dir,
                          std::vector<std::filesystem::path>& written) {
  std::ofstream out = open_out(dir, "stats_battery.csv", written);
  out << "analysis,metric,group_a,group_b,statistic,df,p\n";

  const auto balancing = ordered_conditions(records, true);
  const auto filtering = ordered_conditions(records, false);
  const std::pair<const char*, MetricOf> metrics[] = {{"discrepancy", metric_discrepancy},
                                                      {"obscurity", metric_obscurity},
                                                      {"performance_gain", metric_gain}};

  for (const auto& [name, metric] : metrics) {
    if (balancing.size() >= 2) {
      const auto groups = group_by_condition(records, balancing, true, metric);
      const TestReport kw = kruskal_wallis(groups, balancing);
      out << "kw_balancing," << name << ",,," << kw.statistic << ',' << kw.df << ',' << kw.p << '\n';
      const PosthocReport dunn = dunn_posthoc(groups, PAdjust::benjamini_hochberg, balancing);
      for (std::size_t i = 0; i < balancing.size(); ++i)
        for (std::size_t j = i + 1; j < balancing.size(); ++j)
          out << "dunn_balancing," << name << ',' << balancing[i] << ',' << balancing[j] << ','
              << dunn.z(i, j) << ",," << dunn.p(i, j) << '\n';
    }
    if (filtering.size() >= 2) {
      const auto groups = group_by_condition(records, filtering, false, metric);
      const TestReport kw = kruskal_wallis(groups, filtering);
      out << "kw_filtering," << name << ",,," << kw.statistic << ',' << kw.df << ',' << kw.p << '\n';
    }

    // Friedman: balancing methods as blocks, filtering modes as treatments,
    // cell = median metric.
    if (balancing.size() >= 2 && filtering.size() >= 2) {
      Matrix blocks(balancing.size(), filtering.size());
      bool complete = true;
      for (std::size_t b = 0; b < balancing.size() && complete; ++b) {
        for (std::size_t t = 0; t < filtering.size(); ++t) {
          std::vector<double> values;
          for (const auto& r : records)
            if (r.balancing == balancing[b] && r.filtering == filtering[t])
              values.push_back(metric(r));
          if (values.empty()) {
            complete = false;
            break;
          }
          blocks(b, t) = median_of(values);
        }
      }
      if (complete) {
        const TestReport fr = friedman(blocks);
        out << "friedman_filtering_blocked_by_balancing," << name << ",,," << fr.statistic << ','
            << fr.df << ',' << fr.p << '\n';
      }
    }
  }
}

}  // namespace

ReportFiles report(const std::filesystem::path& results_jsonl, const std::string& mode,
                   const ReportOptions& options) {
  const std::vector<ResultRecord> records = clean_records(results_jsonl);

  ReportFiles files;
  write_plot_points(records, options.output_dir, files.written);
  if (mode == "rq1") {
    report_rq1(records, options.output_dir, files.written);
  } else if (mode == "rq5") {
    report_rq5(records, options.output_dir, files.written);
  } else if (mode == "rq6") {
    report_rq6(records, results_jsonl, options.output_dir, files.written);
  } else {
    raise(errc::config_invalid, "unknown report mode '" + mode + "' (use rq1, rq5 or rq6)");
  }
  if (options.stats_battery) report_stats_battery(records, options.output_dir, files.written);
  return files;
}

}  // namespace rashlab
