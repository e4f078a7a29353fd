#include "rashlab/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "prob.hpp"
#include "rashlab/error.hpp"
#include "rashlab/rank.hpp"

namespace rashlab {

FilterMode filter_mode_from_string(std::string_view name) {
  if (name == "none") return FilterMode::none;
  if (name == "cor") return FilterMode::correlation_only;
  if (name == "sig") return FilterMode::significance_only;
  if (name == "intersect") return FilterMode::intersection;
  raise(errc::unknown_method, "unknown filter mode '" + std::string(name) + "'");
}

std::string to_string(FilterMode mode) {
  switch (mode) {
    case FilterMode::none: return "none";
    case FilterMode::correlation_only: return "cor";
    case FilterMode::significance_only: return "sig";
    case FilterMode::intersection: return "intersect";
  }
  return "none";
}

CorrelationTest pearson_test(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) raise(errc::length_mismatch, "pearson_test input lengths differ");
  const std::size_t n = x.size();
  if (n < 3) raise(errc::length_mismatch, "pearson_test needs at least 3 observations");

  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  CorrelationTest out;
  if (sxx <= 0.0 || syy <= 0.0) {
    out.constant = true;
    return out;  // r = 0, p = 1 by convention
  }
  out.r = sxy / std::sqrt(sxx * syy);
  out.r = std::clamp(out.r, -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double r2 = out.r * out.r;
  if (r2 >= 1.0) {
    out.p = 0.0;
  } else {
    const double t = out.r * std::sqrt(df / (1.0 - r2));
    out.p = prob::student_t_two_sided(t, df);
  }
  return out;
}

namespace {

// Exact two-sided rank-sum p-value by dynamic programming over the null
// distribution of the rank sum of the first sample (tie-free ranks 1..n).
double exact_rank_sum_p(std::size_t n0, std::size_t n, double w_observed) {
  const std::size_t max_sum = n * (n + 1) / 2;
  // ways[m][s] = number of m-subsets of {1..n} with rank sum s
  std::vector<std::vector<double>> ways(n0 + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t value = 1; value <= n; ++value)
    for (std::size_t m = std::min(value, n0); m >= 1; --m)
      for (std::size_t s = max_sum; s >= value; --s)
        ways[m][s] += ways[m - 1][s - value];

  const double mean = static_cast<double>(n0) * static_cast<double>(n + 1) / 2.0;
  const double dev = std::fabs(w_observed - mean);
  double favorable = 0.0, total = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    total += ways[n0][s];
    if (std::fabs(static_cast<double>(s) - mean) >= dev - 1e-12) favorable += ways[n0][s];
  }
  return favorable / total;
}

}  // namespace

RankSumTest wilcoxon_rank_sum(const std::vector<double>& x0, const std::vector<double>& x1) {
  if (x0.empty() || x1.empty()) raise(errc::empty_group, "wilcoxon_rank_sum needs nonempty groups");
  const std::size_t n0 = x0.size(), n1 = x1.size(), n = n0 + n1;

  std::vector<double> pooled(x0);
  pooled.insert(pooled.end(), x1.begin(), x1.end());
  const std::vector<double> ranks = mid_ranks(pooled);
  double w0 = 0.0;
  for (std::size_t i = 0; i < n0; ++i) w0 += ranks[i];
  const double u0 = w0 - static_cast<double>(n0) * static_cast<double>(n0 + 1) / 2.0;

  RankSumTest out;
  out.w_stat = u0;

  std::set<double> distinct(pooled.begin(), pooled.end());
  const bool tie_free = distinct.size() == pooled.size();
  if (n <= 20 && tie_free) {
    out.exact = true;
    out.p = exact_rank_sum_p(n0, n, w0);
    return out;
  }

  const double mean_u = static_cast<double>(n0) * static_cast<double>(n1) / 2.0;
  const double tie_sum = tie_correction_sum(pooled);
  const double nn = static_cast<double>(n);
  double var_u = (static_cast<double>(n0) * static_cast<double>(n1) / 12.0) *
                 ((nn + 1.0) - tie_sum / (nn * (nn - 1.0)));
  if (var_u <= 0.0) {
    out.p = 1.0;  // every observation tied
    return out;
  }
  const double z = std::max(0.0, std::fabs(u0 - mean_u) - 0.5) / std::sqrt(var_u);
  out.p = prob::normal_two_sided(z);
  return out;
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  std::vector<double> adjusted(m);
  double running_min = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    const double scaled = p_values[order[i]] * static_cast<double>(m) / static_cast<double>(i + 1);
    running_min = std::min(running_min, scaled);
    adjusted[order[i]] = std::min(1.0, running_min);
  }
  return adjusted;
}

SelectedFeatureSet select_features(const Dataset& ds, const FilterSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
    raise(errc::config_invalid, "alpha must be in (0,1)");
  ds.validate();

  std::vector<double> y_num(ds.y.begin(), ds.y.end());
  SelectedFeatureSet result;
  result.spec = spec;
  std::vector<double> p_cor, p_sig;
  for (std::size_t j = 0; j < ds.p(); ++j) {
    const std::vector<double> x = ds.X.column(j);
    FeatureTestRecord rec;
    rec.feature_index = j;
    rec.feature_name = ds.feature_names[j];

    const CorrelationTest cor = pearson_test(x, y_num);
    rec.r = cor.r;
    rec.p_r = cor.p;
    rec.constant = cor.constant;

    std::vector<double> g0, g1;
    for (std::size_t i = 0; i < ds.n(); ++i) (ds.y[i] == 0 ? g0 : g1).push_back(x[i]);
    const RankSumTest sig = wilcoxon_rank_sum(g0, g1);
    rec.w_stat = sig.w_stat;
    rec.p_sig = sig.p;

    p_cor.push_back(rec.p_r);
    p_sig.push_back(rec.p_sig);
    result.records.push_back(std::move(rec));
  }

  // BH runs separately within each test family.
  const std::vector<double> adj_cor = bh_adjust(p_cor);
  const std::vector<double> adj_sig = bh_adjust(p_sig);
  for (std::size_t j = 0; j < result.records.size(); ++j) {
    auto& rec = result.records[j];
    rec.p_r_adj = adj_cor[j];
    rec.p_sig_adj = adj_sig[j];
    rec.in_s_cor = !rec.constant && rec.p_r_adj < spec.alpha;
    rec.in_s_sig = rec.p_sig_adj < spec.alpha;
  }

  for (const auto& rec : result.records) {
    bool keep = false;
    switch (spec.mode) {
      case FilterMode::none: keep = true; break;
      case FilterMode::correlation_only: keep = rec.in_s_cor; break;
      case FilterMode::significance_only: keep = rec.in_s_sig; break;
      case FilterMode::intersection: keep = rec.in_s_cor && rec.in_s_sig; break;
    }
    if (keep) result.selected.push_back(rec.feature_index);
  }
  if (result.selected.empty())
    raise(errc::no_features_selected,
          "no feature passed mode '" + to_string(spec.mode) + "' at alpha " + std::to_string(spec.alpha));
  return result;
}

Dataset apply_selection(const Dataset& ds, const SelectedFeatureSet& selection) {
  Dataset out;
  out.name = ds.name;
  out.target_name = ds.target_name;
  out.positive_label = ds.positive_label;
  out.negative_label = ds.negative_label;
  out.y = ds.y;
  out.row_ids = ds.row_ids;
  out.X = ds.X.select_cols(selection.selected);
  std::vector<std::size_t> new_index(ds.p(), SIZE_MAX);
  for (std::size_t i = 0; i < selection.selected.size(); ++i) {
    const std::size_t j = selection.selected[i];
    new_index[j] = i;
    out.feature_names.push_back(ds.feature_names[j]);
    out.feature_kinds.push_back(ds.feature_kinds[j]);
  }
  for (const auto& group : ds.one_hot_groups) {
    OneHotGroup g;
    g.source_name = group.source_name;
    for (const std::size_t c : group.columns)
      if (new_index[c] != SIZE_MAX) g.columns.push_back(new_index[c]);
    if (!g.columns.empty()) out.one_hot_groups.push_back(std::move(g));
  }
  return out;
}

void write_filter_report_csv(const SelectedFeatureSet& selection, std::ostream& out) {
  out << "feature_index,feature_name,r,p_r,p_r_adj,w_stat,p_sig,p_sig_adj,constant,in_s_cor,in_s_sig,selected\n";
  std::set<std::size_t> chosen(selection.selected.begin(), selection.selected.end());
  out.precision(12);
  for (const auto& rec : selection.records) {
    out << rec.feature_index << ',' << rec.feature_name << ',' << rec.r << ',' << rec.p_r << ','
        << rec.p_r_adj << ',' << rec.w_stat << ',' << rec.p_sig << ',' << rec.p_sig_adj << ','
        << (rec.constant ? 1 : 0) << ',' << (rec.in_s_cor ? 1 : 0) << ',' << (rec.in_s_sig ? 1 : 0)
        << ',' << (chosen.count(rec.feature_index) ? 1 : 0) << '\n';
  }
}

}  // namespace rashlab
