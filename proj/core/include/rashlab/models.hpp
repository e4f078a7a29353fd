#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rashlab/dataset.hpp"

namespace rashlab {

enum class ModelFamily { decision_tree, random_forest, gradient_boosting };

std::string to_string(ModelFamily family);
ModelFamily model_family_from_string(std::string_view name);

struct ModelSpec {
  ModelFamily family = ModelFamily::decision_tree;
  int max_depth = 0;              // 0 = unlimited
  int min_leaf = 1;
  int n_trees = 1;                // forest size / boosting rounds
  double feature_subsample = 1.0; // per-split feature fraction (forest)
  double learning_rate = 0.1;    // boosting shrinkage
  std::uint64_t seed = 0;
};

namespace detail {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> row) const {
    int idx = 0;
    while (nodes[idx].feature >= 0)
      idx = row[static_cast<std::size_t>(nodes[idx].feature)] <= nodes[idx].threshold
                ? nodes[idx].left
                : nodes[idx].right;
    return nodes[idx].value;
  }
};

}  // namespace detail

/// A fitted classifier scoring rows into [0,1].
class TrainedModel {
 public:
  const ModelSpec& spec() const noexcept { return spec_; }

  double score(std::span<const double> row) const;
  std::vector<double> score_all(const Matrix& X) const;

  double training_error() const noexcept { return training_error_; }
  std::size_t n_features() const noexcept { return n_features_; }

 private:
  friend TrainedModel train_model(const Dataset& train, const ModelSpec& spec);
  ModelSpec spec_;
  std::vector<detail::Tree> trees_;
  double base_score_ = 0.0;  // boosting intercept (log-odds)
  double training_error_ = 0.0;
  std::size_t n_features_ = 0;
};

TrainedModel train_model(const Dataset& train, const ModelSpec& spec);

/// Hyperparameter specs drawn from the documented random-search grids.
std::vector<ModelSpec> sample_pool_specs(std::size_t pool_size, std::uint64_t seed);

/// Trains `pool_size` models with seeded random hyperparameters. Per-model
/// seeds derive from (seed, ordinal), so any thread count yields the same
/// pool.
std::vector<TrainedModel> train_pool(const Dataset& train, std::size_t pool_size,
                                     std::uint64_t seed, int threads = 1);

}  // namespace rashlab
