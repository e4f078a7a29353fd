#include "rashlab/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>

#include "rashlab/error.hpp"
#include "rashlab/rng.hpp"

namespace rashlab {

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::decision_tree: return "decision_tree";
    case ModelFamily::random_forest: return "random_forest";
    case ModelFamily::gradient_boosting: return "gradient_boosting";
  }
  return "decision_tree";
}

ModelFamily model_family_from_string(std::string_view name) {
  if (name == "decision_tree") return ModelFamily::decision_tree;
  if (name == "random_forest") return ModelFamily::random_forest;
  if (name == "gradient_boosting") return ModelFamily::gradient_boosting;
  raise(errc::unknown_method, "unknown model family '" + std::string(name) + "'");
}

namespace {

using detail::Tree;
using detail::TreeNode;

struct GrowParams {
  int max_depth = 0;
  int min_leaf = 1;
  double feature_subsample = 1.0;
  Rng* rng = nullptr;  // used only when feature_subsample < 1
};

// Least-squares regression tree on target values. For 0/1 targets the
// variance criterion coincides with Gini, so the same grower serves the
// classifiers and the boosting residual fits.
class TreeGrower {
 public:
  TreeGrower(const Matrix& X, const std::vector<double>& targets, const GrowParams& params)
      : x_(X), t_(targets), params_(params) {}

  Tree grow(std::vector<std::size_t> rows, std::vector<int>* leaf_of_row = nullptr) {
    tree_.nodes.clear();
    if (leaf_of_row) leaf_of_row->assign(x_.rows(), -1);
    grow_node(std::move(rows), 0, leaf_of_row);
    return std::move(tree_);
  }

 private:
  int grow_node(std::vector<std::size_t> rows, int depth, std::vector<int>* leaf_of_row) {
    const int node_index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    double sum = 0.0, sum_sq = 0.0;
    for (const std::size_t r : rows) {
      sum += t_[r];
      sum_sq += t_[r] * t_[r];
    }
    const double n = static_cast<double>(rows.size());
    const double node_sse = sum_sq - sum * sum / n;

    const bool depth_ok = params_.max_depth == 0 || depth < params_.max_depth;
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    if (depth_ok && node_sse > 1e-12 &&
        rows.size() >= 2 * static_cast<std::size_t>(params_.min_leaf)) {
      const auto candidates = candidate_features();
      std::vector<std::pair<double, double>> column;  // (x, target)
      for (const std::size_t f : candidates) {
        column.clear();
        for (const std::size_t r : rows) column.emplace_back(x_(r, f), t_[r]);
        std::sort(column.begin(), column.end());

        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
          left_sum += column[i].second;
          left_sq += column[i].second * column[i].second;
          if (column[i].first == column[i + 1].first) continue;
          const std::size_t nl = i + 1, nr = column.size() - nl;
          if (nl < static_cast<std::size_t>(params_.min_leaf) ||
              nr < static_cast<std::size_t>(params_.min_leaf))
            continue;
          const double right_sum = sum - left_sum;
          const double right_sq = sum_sq - left_sq;
          const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                             (right_sq - right_sum * right_sum / static_cast<double>(nr));
          const double gain = node_sse - sse;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_threshold = 0.5 * (column[i].first + column[i + 1].first);
          }
        }
      }
    }

    if (best_feature < 0) {
      tree_.nodes[node_index].value = sum / n;
      if (leaf_of_row)
        for (const std::size_t r : rows) (*leaf_of_row)[r] = node_index;
      return node_index;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (const std::size_t r : rows)
      (x_(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[node_index].feature = best_feature;
    tree_.nodes[node_index].threshold = best_threshold;
    const int left = grow_node(std::move(left_rows), depth + 1, leaf_of_row);
    tree_.nodes[node_index].left = left;
    const int right = grow_node(std::move(right_rows), depth + 1, leaf_of_row);
    tree_.nodes[node_index].right = right;
    return node_index;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> all(x_.cols());
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (params_.feature_subsample >= 1.0 || !params_.rng) return all;
    const std::size_t want = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(params_.feature_subsample *
                                                 static_cast<double>(x_.cols()))));
    params_.rng->shuffle(all);
    all.resize(std::min(want, all.size()));
    std::sort(all.begin(), all.end());
    return all;
  }

  const Matrix& x_;
  const std::vector<double>& t_;
  GrowParams params_;
  Tree tree_;
};

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

double TrainedModel::score(std::span<const double> row) const {
  switch (spec_.family) {
    case ModelFamily::decision_tree:
      return trees_[0].predict(row);
    case ModelFamily::random_forest: {
      double acc = 0.0;
      for (const auto& t : trees_) acc += t.predict(row);
      return acc / static_cast<double>(trees_.size());
    }
    case ModelFamily::gradient_boosting: {
      double f = base_score_;
      for (const auto& t : trees_) f += t.predict(row);
      return sigmoid(f);
    }
  }
  return 0.0;
}

std::vector<double> TrainedModel::score_all(const Matrix& X) const {
  std::vector<double> scores(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) scores[i] = score(X.row(i));
  return scores;
}

TrainedModel train_model(const Dataset& train, const ModelSpec& spec) {
  const std::size_t pos = train.count_label(1);
  if (pos == 0 || pos == train.n()) raise(errc::single_class, "training requires both classes");

  const std::size_t n = train.n();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(train.y[i]);

  TrainedModel model;
  model.spec_ = spec;
  model.n_features_ = train.p();
  Rng rng(spec.seed);

  switch (spec.family) {
    case ModelFamily::decision_tree: {
      GrowParams params{spec.max_depth, spec.min_leaf, 1.0, nullptr};
      TreeGrower grower(train.X, y, params);
      model.trees_.push_back(grower.grow(iota_rows(n)));
      break;
    }
    case ModelFamily::random_forest: {
      for (int t = 0; t < spec.n_trees; ++t) {
        Rng tree_rng(hash_combine(spec.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) bootstrap[i] = tree_rng.next_index(n);
        GrowParams params{spec.max_depth, spec.min_leaf, spec.feature_subsample, &tree_rng};
        TreeGrower grower(train.X, y, params);
        model.trees_.push_back(grower.grow(std::move(bootstrap)));
      }
      break;
    }
    case ModelFamily::gradient_boosting: {
      const double prior =
          std::clamp(static_cast<double>(pos) / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
      model.base_score_ = std::log(prior / (1.0 - prior));
      std::vector<double> f(n, model.base_score_);
      std::vector<double> residual(n), hessian(n);
      for (int round = 0; round < spec.n_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
          const double p = sigmoid(f[i]);
          residual[i] = y[i] - p;
          hessian[i] = std::max(p * (1.0 - p), 1e-12);
        }
        GrowParams params{spec.max_depth, spec.min_leaf, 1.0, nullptr};
        TreeGrower grower(train.X, residual, params);
        std::vector<int> leaf_of_row;
        Tree tree = grower.grow(iota_rows(n), &leaf_of_row);

        // Newton leaf values, shrunk and folded into the tree so prediction
        // is a plain sum.
        std::vector<double> g_sum(tree.nodes.size(), 0.0), h_sum(tree.nodes.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          g_sum[static_cast<std::size_t>(leaf_of_row[i])] += residual[i];
          h_sum[static_cast<std::size_t>(leaf_of_row[i])] += hessian[i];
        }
        for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
          if (tree.nodes[node].feature >= 0) continue;
          const double gamma =
              std::clamp(g_sum[node] / (h_sum[node] + 1e-12), -10.0, 10.0);
          tree.nodes[node].value = spec.learning_rate * gamma;
        }
        for (std::size_t i = 0; i < n; ++i)
          f[i] += tree.nodes[static_cast<std::size_t>(leaf_of_row[i])].value;
        model.trees_.push_back(std::move(tree));
      }
      break;
    }
  }

  std::size_t errors = 0;
  for (std::size_t i = 0; i < n; ++i)
    errors += (model.score(train.X.row(i)) >= 0.5 ? 1 : 0) != train.y[i];
  model.training_error_ = static_cast<double>(errors) / static_cast<double>(n);
  return model;
}

std::vector<ModelSpec> sample_pool_specs(std::size_t pool_size, std::uint64_t seed) {
  // Random-search grids; one family picked uniformly per slot.
  static const int dt_depths[] = {2, 3, 4, 6, 8, 12, 16, 0};
  static const int dt_min_leaf[] = {1, 2, 5, 10, 20};
  static const int rf_trees[] = {25, 50, 100};
  static const int rf_depths[] = {4, 8, 12, 0};
  static const int rf_min_leaf[] = {1, 5, 10};
  static const double rf_subsample[] = {0.3, 0.5, 0.7, 1.0};
  static const int gb_rounds[] = {25, 50, 100, 150};
  static const double gb_lr[] = {0.05, 0.1, 0.2, 0.3};
  static const int gb_depths[] = {2, 3, 4};
  static const int gb_min_leaf[] = {1, 5, 10};

  Rng rng(seed);
  auto pick = [&rng](const auto& grid) {
    return grid[rng.next_index(std::size(grid))];
  };

  std::vector<ModelSpec> specs;
  specs.reserve(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    ModelSpec spec;
    switch (rng.next_index(3)) {
      case 0:
        spec.family = ModelFamily::decision_tree;
        spec.max_depth = pick(dt_depths);
        spec.min_leaf = pick(dt_min_leaf);
        spec.n_trees = 1;
        break;
      case 1:
        spec.family = ModelFamily::random_forest;
        spec.n_trees = pick(rf_trees);
        spec.max_depth = pick(rf_depths);
        spec.min_leaf = pick(rf_min_leaf);
        spec.feature_subsample = pick(rf_subsample);
        break;
      default:
        spec.family = ModelFamily::gradient_boosting;
        spec.n_trees = pick(gb_rounds);
        spec.learning_rate = pick(gb_lr);
        spec.max_depth = pick(gb_depths);
        spec.min_leaf = pick(gb_min_leaf);
        break;
    }
    spec.seed = hash_combine(seed, i);
    specs.push_back(spec);
  }
  return specs;
}

std::vector<TrainedModel> train_pool(const Dataset& train, std::size_t pool_size,
                                     std::uint64_t seed, int threads) {
  if (pool_size < 2) raise(errc::config_invalid, "pool_size must be >= 2");
  const std::size_t pos = train.count_label(1);
  if (pos == 0 || pos == train.n()) raise(errc::single_class, "pool training requires both classes");

  const std::vector<ModelSpec> specs = sample_pool_specs(pool_size, seed);
  std::vector<TrainedModel> pool(pool_size);
  if (threads <= 1) {
    for (std::size_t i = 0; i < pool_size; ++i) pool[i] = train_model(train, specs[i]);
    return pool;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pool_size) return;
      pool[i] = train_model(train, specs[i]);
    }
  };
  std::vector<std::future<void>> futures;
  for (int t = 0; t < threads; ++t) futures.push_back(std::async(std::launch::async, worker));
  for (auto& f : futures) f.get();
  return pool;
}

}  // namespace rashlab
