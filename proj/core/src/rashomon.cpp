#include "rashlab/rashomon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rashlab/error.hpp"
#include "rashlab/rank.hpp"

namespace rashlab {

LossKind loss_kind_from_string(std::string_view name) {
  if (name == "auc" || name == "one_minus_auc") return LossKind::one_minus_auc;
  if (name == "error" || name == "error_rate") return LossKind::error_rate;
  raise(errc::unknown_method, "unknown loss '" + std::string(name) + "'");
}

std::string to_string(LossKind kind) {
  return kind == LossKind::one_minus_auc ? "one_minus_auc" : "error_rate";
}

double auc_score(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) raise(errc::length_mismatch, "auc inputs differ in length");
  std::size_t n1 = 0;
  for (const int y : labels) n1 += (y == 1);
  const std::size_t n0 = labels.size() - n1;
  if (n0 == 0 || n1 == 0) raise(errc::single_class_eval, "AUC needs both classes in eval data");

  const std::vector<double> ranks = mid_ranks(scores);
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) rank_sum_pos += ranks[i];
  const double u = rank_sum_pos - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
  return u / (static_cast<double>(n0) * static_cast<double>(n1));
}

double evaluate_loss(const TrainedModel& model, const Dataset& eval, LossKind kind) {
  const std::vector<double> scores = model.score_all(eval.X);
  if (kind == LossKind::one_minus_auc) return 1.0 - auc_score(scores, eval.y);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    errors += (scores[i] >= 0.5 ? 1 : 0) != eval.y[i];
  return static_cast<double>(errors) / static_cast<double>(scores.size());
}

std::size_t reference_model(const std::vector<double>& losses) {
  if (losses.empty()) raise(errc::empty_group, "reference_model needs a nonempty loss vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < losses.size(); ++i)
    if (losses[i] < losses[best]) best = i;
  return best;
}

std::vector<std::size_t> rashomon_members(const std::vector<double>& losses, double epsilon) {
  if (epsilon < 0.0) raise(errc::config_invalid, "epsilon must be >= 0");
  const double bound = losses[reference_model(losses)] + epsilon;
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < losses.size(); ++i)
    if (losses[i] <= bound) members.push_back(i);
  return members;
}

RashomonSet build_rashomon_set(std::vector<TrainedModel> pool, const Dataset& eval,
                               double epsilon, LossKind kind) {
  if (pool.empty()) raise(errc::empty_group, "empty model pool");

  RashomonSet rset;
  rset.epsilon = epsilon;
  rset.loss_kind = kind;
  rset.losses.reserve(pool.size());
  for (const auto& model : pool) rset.losses.push_back(evaluate_loss(model, eval, kind));
  rset.reference_index = reference_model(rset.losses);
  rset.member_indices = rashomon_members(rset.losses, epsilon);
  rset.pool = std::move(pool);
  return rset;
}

PredictionMatrix prediction_matrix(const RashomonSet& rset, const Matrix& X,
                                   const std::vector<std::int64_t>& obs_ids) {
  if (rset.member_indices.empty()) raise(errc::empty_group, "empty Rashomon set");
  if (!obs_ids.empty() && obs_ids.size() != X.rows())
    raise(errc::dimension_mismatch, "obs_ids length does not match X rows");
  for (const std::size_t m : rset.member_indices)
    if (rset.pool[m].n_features() != X.cols())
      raise(errc::dimension_mismatch,
            "X has " + std::to_string(X.cols()) + " columns, model expects " +
                std::to_string(rset.pool[m].n_features()));

  PredictionMatrix pm;
  pm.n_obs = X.rows();
  pm.n_members = rset.member_indices.size();
  pm.preds.assign(pm.n_obs * pm.n_members, 0);
  pm.obs_ids = obs_ids;
  for (std::size_t m = 0; m < pm.n_members; ++m) {
    const std::size_t pool_index = rset.member_indices[m];
    if (pool_index == rset.reference_index) pm.reference_column = m;
    const TrainedModel& model = rset.pool[pool_index];
    for (std::size_t i = 0; i < pm.n_obs; ++i)
      pm.preds[i * pm.n_members + m] = model.score(X.row(i)) >= 0.5 ? 1 : 0;
  }
  return pm;
}

namespace {

std::vector<double> member_disagreements(const PredictionMatrix& pm) {
  std::vector<double> out(pm.n_members, 0.0);
  for (std::size_t i = 0; i < pm.n_obs; ++i) {
    const std::uint8_t ref = pm.at(i, pm.reference_column);
    for (std::size_t m = 0; m < pm.n_members; ++m)
      if (pm.at(i, m) != ref) out[m] += 1.0;
  }
  for (double& v : out) v /= static_cast<double>(pm.n_obs);
  return out;
}

}  // namespace

double discrepancy(const PredictionMatrix& pm, const MultiplicityOptions&) {
  // The reference column disagrees with itself on nothing, so including it
  // never changes the maximum; a lone reference gives 0.
  const std::vector<double> per_member = member_disagreements(pm);
  double max_disagreement = 0.0;
  for (std::size_t m = 0; m < pm.n_members; ++m)
    if (m != pm.reference_column) max_disagreement = std::max(max_disagreement, per_member[m]);
  return max_disagreement;
}

double obscurity(const PredictionMatrix& pm, const MultiplicityOptions& options) {
  const std::size_t denom = options.include_reference ? pm.n_members : pm.n_members - 1;
  if (denom == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pm.n_obs; ++i) {
    const std::uint8_t ref = pm.at(i, pm.reference_column);
    std::size_t conflicts = 0;
    for (std::size_t m = 0; m < pm.n_members; ++m)
      if (pm.at(i, m) != ref) ++conflicts;
    total += static_cast<double>(conflicts) / static_cast<double>(denom);
  }
  return total / static_cast<double>(pm.n_obs);
}

MultiplicityReport multiplicity_report(const PredictionMatrix& pm, double epsilon,
                                       const MultiplicityOptions& options) {
  MultiplicityReport report;
  report.epsilon = epsilon;
  report.n_members = pm.n_members;
  report.per_model_disagreement = member_disagreements(pm);
  report.discrepancy = discrepancy(pm, options);

  const std::size_t denom = options.include_reference ? pm.n_members : pm.n_members - 1;
  report.per_obs_conflict.assign(pm.n_obs, 0.0);
  for (std::size_t i = 0; i < pm.n_obs; ++i) {
    const std::uint8_t ref = pm.at(i, pm.reference_column);
    std::size_t conflicts = 0;
    for (std::size_t m = 0; m < pm.n_members; ++m)
      if (pm.at(i, m) != ref) ++conflicts;
    report.per_obs_conflict[i] =
        denom == 0 ? 0.0 : static_cast<double>(conflicts) / static_cast<double>(denom);
  }
  report.obscurity =
      std::accumulate(report.per_obs_conflict.begin(), report.per_obs_conflict.end(), 0.0) /
      static_cast<double>(pm.n_obs);
  return report;
}

double performance_gain(double auc_after, double auc_before) { return auc_after - auc_before; }

}  // namespace rashlab
