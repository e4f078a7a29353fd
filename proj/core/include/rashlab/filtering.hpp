#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rashlab/dataset.hpp"

namespace rashlab {

enum class FilterMode { none, correlation_only, significance_only, intersection };

FilterMode filter_mode_from_string(std::string_view name);  // none|cor|sig|intersect
std::string to_string(FilterMode mode);

struct FilterSpec {
  double alpha = 0.05;
  FilterMode mode = FilterMode::intersection;
};

struct CorrelationTest {
  double r = 0.0;
  double p = 1.0;
  bool constant = false;  // x (or y) had zero variance; p fixed at 1 by convention
};

/// Pearson correlation with a two-sided t-test on n-2 degrees of freedom.
/// Point-biserial when y is a 0/1 coding.
CorrelationTest pearson_test(const std::vector<double>& x, const std::vector<double>& y);

struct RankSumTest {
  double w_stat = 0.0;  // Mann-Whitney U of the first sample
  double p = 1.0;
  bool exact = false;
};

/// Two-sided Wilcoxon rank-sum. Exact enumeration when n0+n1 <= 20 and the
/// pooled sample is tie-free; otherwise the normal approximation with tie and
/// continuity corrections.
RankSumTest wilcoxon_rank_sum(const std::vector<double>& x0, const std::vector<double>& x1);

/// Benjamini-Hochberg step-up adjustment, returned in the input order.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

struct FeatureTestRecord {
  std::size_t feature_index = 0;
  std::string feature_name;
  double r = 0.0;
  double p_r = 1.0;
  double p_r_adj = 1.0;
  double w_stat = 0.0;
  double p_sig = 1.0;
  double p_sig_adj = 1.0;
  bool constant = false;
  bool in_s_cor = false;
  bool in_s_sig = false;
};

struct SelectedFeatureSet {
  std::vector<FeatureTestRecord> records;  // one per feature
  std::vector<std::size_t> selected;       // ascending feature indices
  FilterSpec spec;
};

/// Runs both test families over every feature, adjusts p-values per family,
/// and selects per spec.mode. Throws NoFeaturesSelected when a non-`none`
/// mode selects nothing.
SelectedFeatureSet select_features(const Dataset& ds, const FilterSpec& spec);

/// Projects the dataset onto the selected feature columns.
Dataset apply_selection(const Dataset& ds, const SelectedFeatureSet& selection);

/// One CSV row per FeatureTestRecord.
void write_filter_report_csv(const SelectedFeatureSet& selection, std::ostream& out);

}  // namespace rashlab
