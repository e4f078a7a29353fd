#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rashlab/error.hpp"
#include "rashlab/models.hpp"
#include "rashlab/rashomon.hpp"
#include "rashlab/rng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace rashlab;

namespace {

// Hand-built prediction matrix for metric tests.
PredictionMatrix matrix_of(std::vector<std::uint8_t> preds, std::size_t n_obs,
                           std::size_t n_members, std::size_t ref = 0) {
  PredictionMatrix pm;
  pm.preds = std::move(preds);
  pm.n_obs = n_obs;
  pm.n_members = n_members;
  pm.reference_column = ref;
  return pm;
}

}  // namespace

TEST_CASE("auc hand instances") {
  CHECK(auc_score({0.9, 0.2, 0.6, 0.1}, {1, 1, 0, 0}) == doctest::Approx(0.75));
  CHECK(auc_score({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
  CHECK(auc_score({0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(auc_score({0.1, 0.2}, {1, 1}), Error);
}

TEST_CASE("auc equals the pairwise Mann-Whitney oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 5 + rng.next_index(96);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_both = false;
    for (std::size_t i = 0; i < n; ++i) {
      // quantized scores force plenty of ties
      scores[i] = std::round(rng.next_double() * 8.0) / 8.0;
      labels[i] = rng.next_double() < 0.4 ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    has_both = true;
    REQUIRE(has_both);
    CHECK(auc_score(scores, labels) ==
          doctest::Approx(oracles::auc_pairwise(scores, labels)).epsilon(1e-12));
  }
}

TEST_CASE("reference_model picks the argmin with lowest-index ties") {
  CHECK(reference_model({0.3, 0.1, 0.2}) == 1);
  CHECK(reference_model({0.5, 0.5, 0.5}) == 0);
  CHECK(reference_model({0.7}) == 0);
}

TEST_CASE("rashomon_members threshold arithmetic") {
  CHECK(rashomon_members({0.10, 0.12, 0.16}, 0.05) == std::vector<std::size_t>{0, 1});
  // epsilon 0 keeps loss ties with the reference only
  CHECK(rashomon_members({0.2, 0.1, 0.1, 0.3}, 0.0) == std::vector<std::size_t>{1, 2});
  // epsilon covering the spread saturates to the whole pool
  CHECK(rashomon_members({0.2, 0.1, 0.3}, 0.2) == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(rashomon_members({0.1}, -0.01), Error);
}

TEST_CASE("build_rashomon_set membership thresholds") {
  const Dataset ds = synthetic::gaussian_blobs({.n_majority = 60,
                                                .n_minority = 30,
                                                .informative = 2,
                                                .noise = 2,
                                                .separation = 1.0,
                                                .label_noise = 0.1,
                                                .seed = 5});
  std::vector<TrainedModel> pool = train_pool(ds, 12, 77);
  const RashomonSet rset = build_rashomon_set(std::move(pool), ds, 0.05);

  CHECK(std::find(rset.member_indices.begin(), rset.member_indices.end(), rset.reference_index) !=
        rset.member_indices.end());
  const double best = rset.losses[rset.reference_index];
  for (const std::size_t m : rset.member_indices) CHECK(rset.losses[m] <= best + 0.05 + 1e-12);
  for (std::size_t i = 0; i < rset.losses.size(); ++i) {
    const bool member = std::find(rset.member_indices.begin(), rset.member_indices.end(), i) !=
                        rset.member_indices.end();
    CHECK(member == (rset.losses[i] <= best + 0.05 + 1e-12));
  }
}

TEST_CASE("member set grows monotonically in epsilon and saturates") {
  const Dataset ds = synthetic::gaussian_blobs({.n_majority = 50,
                                                .n_minority = 25,
                                                .informative = 2,
                                                .noise = 3,
                                                .separation = 0.8,
                                                .label_noise = 0.15,
                                                .seed = 7});
  std::size_t previous = 0;
  for (const double epsilon : {0.0, 0.025, 0.05, 0.1}) {
    const RashomonSet rset = build_rashomon_set(train_pool(ds, 15, 9), ds, epsilon);
    CHECK(rset.member_indices.size() >= previous);
    previous = rset.member_indices.size();
  }
  // epsilon covering the whole loss range admits the whole pool
  std::vector<TrainedModel> pool = train_pool(ds, 15, 9);
  RashomonSet all = build_rashomon_set(std::move(pool), ds, 1.0);
  CHECK(all.member_indices.size() == 15);

  // epsilon = 0 keeps only loss ties with the reference
  RashomonSet best_only = build_rashomon_set(train_pool(ds, 15, 9), ds, 0.0);
  const double best = best_only.losses[best_only.reference_index];
  for (const std::size_t m : best_only.member_indices)
    CHECK(best_only.losses[m] == doctest::Approx(best));
}

TEST_CASE("prediction_matrix shape, threshold rule and reference column") {
  const Dataset ds = synthetic::gaussian_blobs(
      {.n_majority = 40, .n_minority = 20, .informative = 2, .noise = 1, .seed = 11});
  const RashomonSet rset = build_rashomon_set(train_pool(ds, 8, 13), ds, 0.2);
  const PredictionMatrix pm = prediction_matrix(rset, ds.X, ds.row_ids);
  CHECK(pm.n_obs == ds.n());
  CHECK(pm.n_members == rset.member_indices.size());
  CHECK(pm.reference_column < pm.n_members);
  CHECK(rset.member_indices[pm.reference_column] == rset.reference_index);
  for (std::size_t i = 0; i < pm.n_obs; ++i)
    for (std::size_t m = 0; m < pm.n_members; ++m) CHECK((pm.at(i, m) == 0 || pm.at(i, m) == 1));

  // single-member set: the matrix is exactly the reference column
  const RashomonSet lone = build_rashomon_set(train_pool(ds, 2, 13), ds, 0.0);
  if (lone.member_indices.size() == 1) {
    const PredictionMatrix single = prediction_matrix(lone, ds.X);
    CHECK(single.n_members == 1);
    CHECK(discrepancy(single) == doctest::Approx(0.0));
    CHECK(obscurity(single) == doctest::Approx(0.0));
  }
}

TEST_CASE("prediction_matrix rejects column-incompatible observations") {
  const Dataset ds = synthetic::gaussian_blobs(
      {.n_majority = 30, .n_minority = 15, .informative = 2, .noise = 1, .seed = 71});
  const RashomonSet rset = build_rashomon_set(train_pool(ds, 4, 3), ds, 0.5);
  const Matrix wrong(5, ds.p() + 2);
  CHECK_THROWS_AS(prediction_matrix(rset, wrong), Error);
}

TEST_CASE("scores of exactly one half predict class 1") {
  // a pure leaf with equal counts emits 0.5, which must threshold to 1
  const Dataset ds = synthetic::from_rows({{0}, {0}, {1}, {1}}, {1, 0, 1, 0});
  ModelSpec spec;
  spec.family = ModelFamily::decision_tree;
  spec.max_depth = 1;
  spec.min_leaf = 2;
  const TrainedModel model = train_model(ds, spec);
  const double score = model.score(ds.X.row(0));
  CHECK(score == doctest::Approx(0.5));
  std::vector<TrainedModel> pool;
  pool.push_back(model);
  pool.push_back(model);
  RashomonSet rset;
  rset.pool = std::move(pool);
  rset.losses = {0.5, 0.5};
  rset.reference_index = 0;
  rset.member_indices = {0, 1};
  rset.epsilon = 0.0;
  const PredictionMatrix pm = prediction_matrix(rset, ds.X);
  CHECK(pm.at(0, 0) == 1);
}

TEST_CASE("discrepancy and obscurity hand instances") {
  // 4 observations x 4 members (reference first); disagreement counts 1,2,3
  // -> per-member fractions 0.25, 0.5, 0.75
  const PredictionMatrix pm = matrix_of(
      {
          0, 1, 1, 1,  // obs 0: members 1,2,3 all disagree
          0, 0, 1, 1,  // obs 1: members 2,3 disagree
          0, 0, 0, 1,  // obs 2: member 3 disagrees... counts per member: 0,1,2,3
          0, 0, 0, 0,
      },
      4, 4, 0);
  CHECK(discrepancy(pm) == doctest::Approx(0.75));
  // mean over members = mean over observations = 0.5
  CHECK(obscurity(pm) == doctest::Approx((0.25 + 0.5 + 0.75) / 3.0));
  CHECK(obscurity(pm) == doctest::Approx(0.5));

  // identical columns
  const PredictionMatrix same = matrix_of({1, 1, 1, 1, 1, 1}, 2, 3, 0);
  CHECK(discrepancy(same) == doctest::Approx(0.0));
  CHECK(obscurity(same) == doctest::Approx(0.0));

  // complement member maximizes conflict
  const PredictionMatrix complement = matrix_of({0, 1, 1, 0, 0, 1, 1, 0}, 4, 2, 0);
  CHECK(discrepancy(complement) == doctest::Approx(1.0));

  // single observation, half of four non-reference members disagree
  const PredictionMatrix half = matrix_of({0, 1, 1, 0, 0}, 1, 5, 0);
  CHECK(obscurity(half) == doctest::Approx(0.5));
}

TEST_CASE("include_reference recovers the literal averaged form") {
  const PredictionMatrix pm = matrix_of({0, 1, 0, 1, 0, 0}, 3, 2, 0);
  MultiplicityOptions literal;
  literal.include_reference = true;
  // 2 conflicts over 3 obs; non-reference denominator 1 vs literal 2
  CHECK(obscurity(pm) == doctest::Approx(2.0 / 3.0));
  CHECK(obscurity(pm, literal) == doctest::Approx(1.0 / 3.0));
  CHECK(discrepancy(pm, literal) == doctest::Approx(discrepancy(pm)));
}

TEST_CASE("metrics match the double-loop oracle on fuzzed matrices") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n_obs = 1 + rng.next_index(20);
    const std::size_t n_members = 2 + rng.next_index(9);
    const std::size_t ref = rng.next_index(n_members);
    std::vector<std::uint8_t> preds(n_obs * n_members);
    for (auto& v : preds) v = static_cast<std::uint8_t>(rng.next_index(2));
    const PredictionMatrix pm = matrix_of(preds, n_obs, n_members, ref);

    const auto oracle = oracles::multiplicity_double_loop(preds, n_obs, n_members, ref);
    const double disc = discrepancy(pm);
    const double obsc = obscurity(pm);
    CHECK(disc == doctest::Approx(oracle.discrepancy).epsilon(1e-12));
    CHECK(obsc == doctest::Approx(oracle.obscurity).epsilon(1e-12));
    CHECK(obsc <= disc + 1e-12);

    const MultiplicityReport report = multiplicity_report(pm, 0.05);
    CHECK(report.discrepancy == doctest::Approx(disc));
    CHECK(report.obscurity == doctest::Approx(obsc));
    CHECK(report.per_model_disagreement.size() == n_members);
    CHECK(report.per_obs_conflict.size() == n_obs);
  }
}

TEST_CASE("metrics are invariant to member and observation permutations") {
  Rng rng(23);
  const std::size_t n_obs = 12, n_members = 6;
  std::vector<std::uint8_t> preds(n_obs * n_members);
  for (auto& v : preds) v = static_cast<std::uint8_t>(rng.next_index(2));
  const PredictionMatrix pm = matrix_of(preds, n_obs, n_members, 2);
  const double disc = discrepancy(pm);
  const double obsc = obscurity(pm);

  // permute observations
  std::vector<std::size_t> obs_perm(n_obs);
  std::iota(obs_perm.begin(), obs_perm.end(), std::size_t{0});
  rng.shuffle(obs_perm);
  std::vector<std::uint8_t> shuffled(n_obs * n_members);
  for (std::size_t i = 0; i < n_obs; ++i)
    for (std::size_t m = 0; m < n_members; ++m)
      shuffled[i * n_members + m] = preds[obs_perm[i] * n_members + m];
  const PredictionMatrix pm_obs = matrix_of(shuffled, n_obs, n_members, 2);
  CHECK(discrepancy(pm_obs) == doctest::Approx(disc));
  CHECK(obscurity(pm_obs) == doctest::Approx(obsc));

  // swap two non-reference member columns
  std::vector<std::uint8_t> swapped = preds;
  for (std::size_t i = 0; i < n_obs; ++i)
    std::swap(swapped[i * n_members + 0], swapped[i * n_members + 4]);
  const PredictionMatrix pm_mem = matrix_of(swapped, n_obs, n_members, 2);
  CHECK(discrepancy(pm_mem) == doctest::Approx(disc));
  CHECK(obscurity(pm_mem) == doctest::Approx(obsc));
}

TEST_CASE("train_pool is reproducible and validates inputs") {
  const Dataset ds = synthetic::gaussian_blobs(
      {.n_majority = 40, .n_minority = 20, .informative = 2, .noise = 1, .seed = 29});
  const std::vector<ModelSpec> specs_a = sample_pool_specs(20, 31);
  const std::vector<ModelSpec> specs_b = sample_pool_specs(20, 31);
  for (std::size_t i = 0; i < specs_a.size(); ++i) {
    CHECK(specs_a[i].family == specs_b[i].family);
    CHECK(specs_a[i].max_depth == specs_b[i].max_depth);
    CHECK(specs_a[i].n_trees == specs_b[i].n_trees);
    CHECK(specs_a[i].seed == specs_b[i].seed);
  }

  const auto pool_a = train_pool(ds, 6, 31);
  const auto pool_b = train_pool(ds, 6, 31);
  const auto pool_mt = train_pool(ds, 6, 31, 4);
  for (std::size_t i = 0; i < pool_a.size(); ++i) {
    const auto sa = pool_a[i].score_all(ds.X);
    const auto sb = pool_b[i].score_all(ds.X);
    const auto sm = pool_mt[i].score_all(ds.X);
    CHECK(sa == sb);
    CHECK(sa == sm);  // thread schedule must not matter
  }

  CHECK_THROWS_AS(train_pool(ds, 1, 31), Error);
  Dataset single = ds;
  std::fill(single.y.begin(), single.y.end(), 1);
  CHECK_THROWS_AS(train_pool(single, 5, 31), Error);
}

TEST_CASE("an unlimited-depth tree memorizes a separable toy set") {
  const Dataset ds = synthetic::gaussian_blobs({.n_majority = 30,
                                                .n_minority = 15,
                                                .informative = 2,
                                                .noise = 0,
                                                .separation = 5.0,
                                                .seed = 37});
  ModelSpec spec;
  spec.family = ModelFamily::decision_tree;
  spec.max_depth = 0;
  spec.min_leaf = 1;
  const TrainedModel model = train_model(ds, spec);
  CHECK(model.training_error() == doctest::Approx(0.0));
}

TEST_CASE("model families emit calibrated-range scores") {
  const Dataset ds = synthetic::gaussian_blobs({.n_majority = 50,
                                                .n_minority = 25,
                                                .informative = 2,
                                                .noise = 2,
                                                .label_noise = 0.1,
                                                .seed = 41});
  for (const ModelFamily family :
       {ModelFamily::decision_tree, ModelFamily::random_forest, ModelFamily::gradient_boosting}) {
    ModelSpec spec;
    spec.family = family;
    spec.max_depth = 4;
    spec.min_leaf = 2;
    spec.n_trees = 20;
    spec.seed = 5;
    const TrainedModel model = train_model(ds, spec);
    for (const double s : model.score_all(ds.X)) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(std::isfinite(s));
    }
  }
}

TEST_CASE("evaluate_loss kinds and performance_gain") {
  const Dataset ds = synthetic::gaussian_blobs({.n_majority = 40,
                                                .n_minority = 20,
                                                .informative = 2,
                                                .noise = 0,
                                                .separation = 4.0,
                                                .seed = 43});
  ModelSpec spec;
  spec.family = ModelFamily::decision_tree;
  const TrainedModel model = train_model(ds, spec);
  const double auc_loss = evaluate_loss(model, ds, LossKind::one_minus_auc);
  const double err_loss = evaluate_loss(model, ds, LossKind::error_rate);
  CHECK(auc_loss >= 0.0);
  CHECK(auc_loss <= 1.0);
  CHECK(err_loss >= 0.0);
  CHECK(err_loss <= 1.0);
  CHECK(auc_loss == doctest::Approx(0.0));  // separable

  CHECK(performance_gain(0.8, 0.7) == doctest::Approx(0.1));
  CHECK(performance_gain(0.6, 0.6) == doctest::Approx(0.0));
  CHECK(performance_gain(0.6, 0.9) == doctest::Approx(-0.3));
}
