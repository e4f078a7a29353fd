#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rashlab/dataset.hpp"
#include "rashlab/models.hpp"

namespace rashlab {

enum class LossKind { one_minus_auc, error_rate };

LossKind loss_kind_from_string(std::string_view name);  // "auc" | "error"
std::string to_string(LossKind kind);

/// Rank-based AUC (Mann-Whitney, ties counted 1/2). Throws SingleClassEval
/// when labels contain one class only.
double auc_score(const std::vector<double>& scores, const std::vector<int>& labels);

double evaluate_loss(const TrainedModel& model, const Dataset& eval, LossKind kind);

/// Index of the minimum loss; ties break to the lowest index.
std::size_t reference_model(const std::vector<double>& losses);

/// Indices within epsilon of the best loss, ascending.
std::vector<std::size_t> rashomon_members(const std::vector<double>& losses, double epsilon);

struct RashomonSet {
  std::vector<TrainedModel> pool;
  std::vector<double> losses;
  std::size_t reference_index = 0;
  std::vector<std::size_t> member_indices;  // ascending; always contains the reference
  double epsilon = 0.05;
  LossKind loss_kind = LossKind::one_minus_auc;
};

/// Members are the pool models within epsilon of the best loss.
RashomonSet build_rashomon_set(std::vector<TrainedModel> pool, const Dataset& eval,
                               double epsilon, LossKind kind = LossKind::one_minus_auc);

/// Binary member predictions (threshold 0.5, scores of exactly 0.5 go to 1).
struct PredictionMatrix {
  std::size_t n_obs = 0;
  std::size_t n_members = 0;
  std::size_t reference_column = 0;
  std::vector<std::uint8_t> preds;  // n_obs x n_members, row-major
  std::vector<std::int64_t> obs_ids;

  std::uint8_t at(std::size_t obs, std::size_t member) const {
    return preds[obs * n_members + member];
  }
};

PredictionMatrix prediction_matrix(const RashomonSet& rset, const Matrix& X,
                                   const std::vector<std::int64_t>& obs_ids = {});

struct MultiplicityOptions {
  /// When set, obscurity averages over all members (the reference's zero
  /// disagreement included) instead of the non-reference members.
  bool include_reference = false;
};

/// Largest fraction of observations on which some member contradicts the
/// reference column.
double discrepancy(const PredictionMatrix& pm, const MultiplicityOptions& options = {});

/// Mean, over observations, of the fraction of members contradicting the
/// reference.
double obscurity(const PredictionMatrix& pm, const MultiplicityOptions& options = {});

struct MultiplicityReport {
  double discrepancy = 0.0;
  double obscurity = 0.0;
  std::vector<double> per_model_disagreement;  // one per member column (reference = 0)
  std::vector<double> per_obs_conflict;
  double epsilon = 0.0;
  std::size_t n_members = 0;
};

MultiplicityReport multiplicity_report(const PredictionMatrix& pm, double epsilon,
                                       const MultiplicityOptions& options = {});

/// AUC improvement over a baseline; negative when preprocessing hurts.
double performance_gain(double auc_after, double auc_before);

}  // namespace rashlab
