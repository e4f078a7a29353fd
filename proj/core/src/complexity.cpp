#include "rashlab/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "rashlab/error.hpp"
#include "rashlab/linalg.hpp"
#include "rashlab/rng.hpp"

namespace rashlab {

const std::array<const char*, ComplexityProfile::count>& ComplexityProfile::measure_names() {
  static const std::array<const char*, count> names = {
      "t2", "t3", "t4", "l1", "l2", "l3", "f1", "f1v", "f2",
      "f3", "f4", "n1", "n2", "n3", "n4", "t1", "lsc"};
  return names;
}

std::array<std::optional<double>, ComplexityProfile::count> ComplexityProfile::values() const {
  return {t2, t3, t4, l1, l2, l3, f1, f1v, f2, f3, f4, n1, n2, n3, n4, t1, lsc};
}

DimensionalityMetrics dimensionality_metrics(const Dataset& ds, const ComplexityOptions& options) {
  const double n = static_cast<double>(ds.n());
  const double p = static_cast<double>(ds.p());
  // Centered raw covariance by default (prcomp convention); correlation-PCA
  // sits behind the flag.
  const std::vector<double> eigenvalues = symmetric_eigenvalues(
      covariance_matrix(options.pca_standardize ? standardized(ds.X) : ds.X));

  const double total = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  std::size_t k95 = 0;
  if (total > 0.0) {
    double cumulative = 0.0;
    for (const double ev : eigenvalues) {
      cumulative += ev;
      ++k95;
      if (cumulative >= 0.95 * total) break;
    }
  }

  DimensionalityMetrics m;
  m.k95 = k95;
  if (options.legacy_orientation) {
    m.t2 = n / p;
    m.t3 = k95 > 0 ? n / static_cast<double>(k95) : 0.0;
  } else {
    m.t2 = p / n;
    m.t3 = static_cast<double>(k95) / n;
  }
  m.t4 = static_cast<double>(k95) / p;
  return m;
}

LinearModel train_linear_classifier(const Dataset& ds, std::uint64_t seed) {
  const std::size_t pos = ds.count_label(1);
  if (pos == 0 || pos == ds.n()) raise(errc::single_class, "linear classifier needs both classes");

  const Matrix Z = standardized(ds.X);
  const std::size_t n = Z.rows(), p = Z.cols();
  std::vector<double> sign(n);
  for (std::size_t i = 0; i < n; ++i) sign[i] = ds.y[i] == 1 ? 1.0 : -1.0;

  // Soft-margin objective with C = 1:
  //   J = lambda/2 * |w|^2 + mean hinge,   lambda = 1 / (C * n)
  // minimized by full-batch subgradient steps, lr = 0.01 / sqrt(epoch),
  // 500 epochs. Deterministic; the seed only sets the starting point.
  const double lambda = 1.0 / static_cast<double>(n);
  const std::size_t epochs = 500;

  LinearModel model;
  model.weights.assign(p, 0.0);
  Rng rng(seed);
  for (double& w : model.weights) w = (rng.next_double() - 0.5) * 0.02;

  std::vector<double> grad(p);
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    double hinge_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = Z.row(i);
      const double margin = sign[i] * model.decision(row);
      if (margin < 1.0) {
        hinge_total += 1.0 - margin;
        for (std::size_t c = 0; c < p; ++c) grad[c] -= sign[i] * row[c];
        grad_b -= sign[i];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const double lr = 0.01 / std::sqrt(static_cast<double>(epoch));
    double norm_sq = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      norm_sq += model.weights[c] * model.weights[c];
      model.weights[c] -= lr * (lambda * model.weights[c] + grad[c] * inv_n);
    }
    model.bias -= lr * grad_b * inv_n;
    model.loss_trace.push_back(0.5 * lambda * norm_sq + hinge_total * inv_n);
  }
  return model;
}

namespace {

int predicted_class(double decision) { return decision >= 0.0 ? 1 : 0; }

// Interpolated same-class points in standardized space: pick a row (class
// follows the data distribution), a random partner of the same class,
// lambda ~ U(0,1).
struct Interpolants {
  Matrix Z;
  std::vector<int> labels;
};

Interpolants make_interpolants(const Matrix& Z, const std::vector<int>& y, std::size_t count,
                               Rng& rng) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);

  Interpolants out;
  out.Z = Matrix(count, Z.cols());
  out.labels.resize(count);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t i = rng.next_index(Z.rows());
    const auto& pool = by_class[y[i]];
    const std::size_t j = pool[rng.next_index(pool.size())];
    const double lambda = rng.next_double();
    const auto a = Z.row(i), b = Z.row(j);
    auto dest = out.Z.row(t);
    for (std::size_t c = 0; c < Z.cols(); ++c) dest[c] = a[c] + lambda * (b[c] - a[c]);
    out.labels[t] = y[i];
  }
  return out;
}

}  // namespace

LinearityMetrics linearity_metrics(const Dataset& ds, std::uint64_t seed) {
  const LinearModel model = train_linear_classifier(ds, seed);
  const Matrix Z = standardized(ds.X);
  const std::size_t n = Z.rows();

  double norm = 0.0;
  for (const double w : model.weights) norm += w * w;
  norm = std::sqrt(norm);

  std::size_t errors = 0;
  double error_distance = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double decision = model.decision(Z.row(i));
    if (predicted_class(decision) != ds.y[i]) {
      ++errors;
      if (norm > 0.0) error_distance += std::fabs(decision) / norm;
    }
  }
  LinearityMetrics m;
  m.l2 = static_cast<double>(errors) / static_cast<double>(n);
  // Mean distance-to-boundary of the misclassified points, squashed into
  // [0,1) so separable data scores 0.
  const double s = error_distance / static_cast<double>(n);
  m.l1 = s / (s + 1.0);

  Rng rng(hash_combine(seed, "l3"));
  const Interpolants interp = make_interpolants(Z, ds.y, n, rng);
  std::size_t interp_errors = 0;
  for (std::size_t t = 0; t < interp.Z.rows(); ++t)
    if (predicted_class(model.decision(interp.Z.row(t))) != interp.labels[t]) ++interp_errors;
  m.l3 = static_cast<double>(interp_errors) / static_cast<double>(interp.Z.rows());
  return m;
}

namespace {

struct FeatureClassSummary {
  double mean[2], var[2], min[2], max[2];
};

std::vector<FeatureClassSummary> per_feature_class_summaries(const Dataset& ds) {
  const std::size_t p = ds.p();
  std::vector<FeatureClassSummary> s(
      p, {{0, 0}, {0, 0}, {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
          {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}});
  std::size_t counts[2] = {0, 0};
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const int c = ds.y[i];
    ++counts[c];
    const auto row = ds.X.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      s[j].mean[c] += row[j];
      s[j].min[c] = std::min(s[j].min[c], row[j]);
      s[j].max[c] = std::max(s[j].max[c], row[j]);
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (const int c : {0, 1}) s[j].mean[c] /= static_cast<double>(counts[c]);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const int c = ds.y[i];
    const auto row = ds.X.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      const double d = row[j] - s[j].mean[c];
      s[j].var[c] += d * d;
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (const int c : {0, 1})
      s[j].var[c] = counts[c] > 1 ? s[j].var[c] / static_cast<double>(counts[c] - 1) : 0.0;
  return s;
}

}  // namespace

namespace {

void require_two_per_class(const Dataset& ds, const char* who) {
  const std::size_t pos = ds.count_label(1);
  const std::size_t neg = ds.n() - pos;
  if (pos == 0 || neg == 0)
    raise(errc::single_class, std::string(who) + " needs both classes");
  if (pos < 2 || neg < 2)
    raise(errc::degenerate_class_size, std::string(who) + " needs >= 2 rows per class");
}

}  // namespace

OverlapMetrics overlapping_metrics(const Dataset& ds) {
  const std::size_t n = ds.n(), p = ds.p();
  require_two_per_class(ds, "overlapping metrics");

  const std::vector<FeatureClassSummary> s = per_feature_class_summaries(ds);

  OverlapMetrics m;
  // F1: transformed max Fisher ratio. Zero-variance features with equal
  // means are skipped; with distinct means they separate perfectly.
  double max_fisher = -1.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double mean_gap = s[j].mean[0] - s[j].mean[1];
    const double pooled_var = s[j].var[0] + s[j].var[1];
    if (pooled_var <= 0.0) {
      if (std::fabs(mean_gap) > 0.0) max_fisher = std::numeric_limits<double>::infinity();
      continue;  // DegenerateVariance: NA contribution
    }
    max_fisher = std::max(max_fisher, mean_gap * mean_gap / pooled_var);
  }
  if (max_fisher < 0.0) raise(errc::degenerate_variance, "every feature has zero pooled variance");
  m.raw_max_fisher = max_fisher;
  m.f1 = std::isinf(max_fisher) ? 0.0 : 1.0 / (1.0 + max_fisher);

  // F1v: directional Fisher criterion. With d = W^-1 (mu1 - mu2) the ratio
  // (d'Bd)/(d'Wd) collapses to (mu1-mu2)' W^-1 (mu1-mu2).
  {
    std::vector<std::size_t> rows0, rows1;
    for (std::size_t i = 0; i < n; ++i) (ds.y[i] == 0 ? rows0 : rows1).push_back(i);
    const Matrix x0 = ds.X.select_rows(rows0);
    const Matrix x1 = ds.X.select_rows(rows1);
    const Matrix c0 = covariance_matrix(x0);
    const Matrix c1 = covariance_matrix(x1);
    const double p0 = static_cast<double>(rows0.size()) / static_cast<double>(n);
    const double p1 = 1.0 - p0;
    const ColumnStats st0 = column_stats(x0);
    const ColumnStats st1 = column_stats(x1);
    Matrix w(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) w(i, j) = p0 * c0(i, j) + p1 * c1(i, j);
    for (std::size_t i = 0; i < p; ++i) w(i, i) += 1e-6;  // ridge for singular scatter
    std::vector<double> delta(p);
    for (std::size_t j = 0; j < p; ++j) delta[j] = st0.mean[j] - st1.mean[j];
    const std::vector<double> solved = solve_spd(w, delta);
    double df = 0.0;
    for (std::size_t j = 0; j < p; ++j) df += delta[j] * solved[j];
    m.f1v = 1.0 / (1.0 + std::max(0.0, df));
  }

  // F2: product of per-feature overlap fractions; F3: best single-feature
  // discrimination rate.
  double f2 = 1.0;
  bool any_f2 = false;
  std::size_t best_non_overlap = 0;
  for (std::size_t j = 0; j < p; ++j) {
    const double lo = std::max(s[j].min[0], s[j].min[1]);
    const double hi = std::min(s[j].max[0], s[j].max[1]);
    const double range = std::max(s[j].max[0], s[j].max[1]) - std::min(s[j].min[0], s[j].min[1]);
    if (range > 0.0) {
      f2 *= std::max(0.0, hi - lo) / range;
      any_f2 = true;
    }
    std::size_t non_overlap = 0;
    if (hi < lo) {
      non_overlap = n;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double v = ds.X(i, j);
        if (v < lo || v > hi) ++non_overlap;
      }
    }
    best_non_overlap = std::max(best_non_overlap, non_overlap);
  }
  m.f2 = any_f2 ? f2 : 0.0;
  m.f3 = static_cast<double>(best_non_overlap) / static_cast<double>(n);

  // F4: greedily apply the F3 rule, removing discriminated rows and the used
  // feature, until nothing more separates.
  {
    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::vector<bool> feature_used(p, false);
    while (!remaining.empty()) {
      std::size_t best_feature = p;
      std::vector<std::size_t> best_outside;
      for (std::size_t j = 0; j < p; ++j) {
        if (feature_used[j]) continue;
        double mn[2] = {std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
        double mx[2] = {-std::numeric_limits<double>::infinity(),
                        -std::numeric_limits<double>::infinity()};
        for (const std::size_t i : remaining) {
          const int c = ds.y[i];
          mn[c] = std::min(mn[c], ds.X(i, j));
          mx[c] = std::max(mx[c], ds.X(i, j));
        }
        const double lo = std::max(mn[0], mn[1]);
        const double hi = std::min(mx[0], mx[1]);
        std::vector<std::size_t> outside;
        for (const std::size_t i : remaining) {
          const double v = ds.X(i, j);
          if (hi < lo || v < lo || v > hi) outside.push_back(i);
        }
        if (outside.size() > best_outside.size()) {
          best_outside = std::move(outside);
          best_feature = j;
        }
      }
      if (best_feature == p || best_outside.empty()) break;
      feature_used[best_feature] = true;
      std::vector<std::size_t> next;
      std::set_difference(remaining.begin(), remaining.end(), best_outside.begin(),
                          best_outside.end(), std::back_inserter(next));
      remaining = std::move(next);
    }
    m.f4 = static_cast<double>(n - remaining.size()) / static_cast<double>(n);
  }
  return m;
}

namespace {

// Per-point nearest-neighbor facts shared by the neighborhood measures.
struct NeighborFacts {
  std::vector<double> nearest_same;    // distance to nearest same-class point
  std::vector<double> nearest_enemy;   // distance to nearest other-class point
  std::vector<std::size_t> nearest_overall;  // index of nearest point, tie -> lower index
  std::vector<std::size_t> local_set_size;   // same-class points closer than the nearest enemy
};

NeighborFacts gather_neighbor_facts(const Matrix& Z, const std::vector<int>& y) {
  const std::size_t n = Z.rows();
  NeighborFacts facts;
  facts.nearest_same.assign(n, std::numeric_limits<double>::infinity());
  facts.nearest_enemy.assign(n, std::numeric_limits<double>::infinity());
  facts.nearest_overall.assign(n, 0);
  facts.local_set_size.assign(n, 0);

  std::vector<double> row_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto zi = Z.row(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        row_dist[j] = std::numeric_limits<double>::infinity();
        continue;
      }
      const double d = squared_distance(zi, Z.row(j));
      row_dist[j] = d;
      if (d < best) {
        best = d;
        best_idx = j;
      }
      if (y[j] == y[i])
        facts.nearest_same[i] = std::min(facts.nearest_same[i], d);
      else
        facts.nearest_enemy[i] = std::min(facts.nearest_enemy[i], d);
    }
    facts.nearest_overall[i] = best_idx;
    const double enemy = facts.nearest_enemy[i];
    std::size_t ls = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && y[j] == y[i] && row_dist[j] < enemy) ++ls;
    facts.local_set_size[i] = ls;
  }
  // store true distances
  for (std::size_t i = 0; i < n; ++i) {
    facts.nearest_same[i] = std::sqrt(facts.nearest_same[i]);
    facts.nearest_enemy[i] = std::sqrt(facts.nearest_enemy[i]);
  }
  return facts;
}

// Exact MST by Prim's method with on-the-fly distances; returns the fraction
// of vertices touching a cross-class edge.
double mst_borderline_fraction(const Matrix& Z, const std::vector<int>& y) {
  const std::size_t n = Z.rows();
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, 0);
  std::vector<bool> borderline(n, false);

  in_tree[0] = true;
  for (std::size_t j = 1; j < n; ++j) {
    best[j] = squared_distance(Z.row(0), Z.row(j));
    parent[j] = 0;
  }
  for (std::size_t added = 1; added < n; ++added) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j)
      if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
    in_tree[next] = true;
    if (y[next] != y[parent[next]]) {
      borderline[next] = true;
      borderline[parent[next]] = true;
    }
    const auto zn = Z.row(next);
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      const double d = squared_distance(zn, Z.row(j));
      if (d < best[j]) {
        best[j] = d;
        parent[j] = next;
      }
    }
  }
  std::size_t count = 0;
  for (const bool b : borderline) count += b;
  return static_cast<double>(count) / static_cast<double>(n);
}

// Enemy-bounded hyperspheres, larger spheres absorbing nested ones.
double hypersphere_fraction(const Matrix& Z, const std::vector<double>& radius) {
  const std::size_t n = Z.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (radius[a] != radius[b]) return radius[a] > radius[b];
    return a < b;
  });
  std::vector<std::size_t> kept;
  for (const std::size_t i : order) {
    bool nested = false;
    for (const std::size_t j : kept) {
      const double d = euclidean_distance(Z.row(i), Z.row(j));
      if (d + radius[i] <= radius[j] + 1e-12) {
        nested = true;
        break;
      }
    }
    if (!nested) kept.push_back(i);
  }
  return static_cast<double>(kept.size()) / static_cast<double>(n);
}

}  // namespace

NeighborhoodMetrics neighborhood_metrics(const Dataset& ds, const ComplexityOptions& options) {
  NeighborhoodMetrics m;
  require_two_per_class(ds, "neighborhood metrics");

  Matrix X = ds.X;
  std::vector<int> y = ds.y;
  if (ds.n() > options.neighborhood_cutoff) {
    if (!options.subsample_large) {
      m.na_reason = "n=" + std::to_string(ds.n()) + " exceeds cutoff " +
                    std::to_string(options.neighborhood_cutoff);
      return m;
    }
    std::vector<std::size_t> rows(ds.n());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(hash_combine(options.seed, "subsample"));
    rng.shuffle(rows);
    rows.resize(options.neighborhood_cutoff);
    std::sort(rows.begin(), rows.end());
    X = ds.X.select_rows(rows);
    y.clear();
    for (const std::size_t r : rows) y.push_back(ds.y[r]);
  }

  const Matrix Z = options.standardize ? standardized(X) : X;
  const std::size_t n = Z.rows();
  const NeighborFacts facts = gather_neighbor_facts(Z, y);

  m.n1 = mst_borderline_fraction(Z, y);

  double intra = 0.0, extra = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(facts.nearest_same[i])) intra += facts.nearest_same[i];
    extra += facts.nearest_enemy[i];
  }
  if (extra > 0.0) {
    const double r = intra / extra;
    m.n2 = r / (1.0 + r);
  } else {
    m.n2 = intra > 0.0 ? 1.0 : 0.0;
  }

  std::size_t loo_errors = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (y[facts.nearest_overall[i]] != y[i]) ++loo_errors;
  m.n3 = static_cast<double>(loo_errors) / static_cast<double>(n);

  {
    Rng rng(hash_combine(options.seed, "n4"));
    const Interpolants interp = make_interpolants(Z, y, n, rng);
    std::size_t errors = 0;
    for (std::size_t t = 0; t < interp.Z.rows(); ++t) {
      const auto zt = interp.Z.row(t);
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_idx = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = squared_distance(zt, Z.row(j));
        if (d < best) {
          best = d;
          best_idx = j;
        }
      }
      if (y[best_idx] != interp.labels[t]) ++errors;
    }
    m.n4 = static_cast<double>(errors) / static_cast<double>(n);
  }

  m.t1 = hypersphere_fraction(Z, facts.nearest_enemy);

  double ls_total = 0.0;
  for (const std::size_t size : facts.local_set_size) ls_total += static_cast<double>(size);
  m.lsc = 1.0 - ls_total / (static_cast<double>(n) * static_cast<double>(n));
  return m;
}

ComplexityProfile complexity_profile(const Dataset& ds, const ComplexityOptions& options) {
  ds.validate();
  class_stats(ds);  // both classes required

  ComplexityProfile profile;
  profile.dataset_name = ds.name;

  const DimensionalityMetrics dim = dimensionality_metrics(ds, options);
  profile.t2 = dim.t2;
  profile.t3 = dim.t3;
  profile.t4 = dim.t4;

  const LinearityMetrics lin = linearity_metrics(ds, options.seed);
  profile.l1 = lin.l1;
  profile.l2 = lin.l2;
  profile.l3 = lin.l3;

  const OverlapMetrics overlap = overlapping_metrics(ds);
  profile.f1 = overlap.f1;
  profile.f1v = overlap.f1v;
  profile.f2 = overlap.f2;
  profile.f3 = overlap.f3;
  profile.f4 = overlap.f4;
  profile.raw_max_fisher = overlap.raw_max_fisher;

  const NeighborhoodMetrics nb = neighborhood_metrics(ds, options);
  profile.n1 = nb.n1;
  profile.n2 = nb.n2;
  profile.n3 = nb.n3;
  profile.n4 = nb.n4;
  profile.t1 = nb.t1;
  profile.lsc = nb.lsc;
  return profile;
}

ClusterAssignment cluster_datasets(const std::vector<ComplexityProfile>& profiles, std::size_t k,
                                   std::uint64_t seed) {
  if (k == 0 || profiles.size() < k)
    raise(errc::too_few_profiles, "need at least k=" + std::to_string(k) + " profiles, have " +
                                      std::to_string(profiles.size()));
  const std::size_t n = profiles.size();
  constexpr std::size_t d = ComplexityProfile::count;

  // Impute NA by per-measure median, then z-score.
  Matrix features(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> present;
    for (const auto& p : profiles) {
      const auto v = p.values()[j];
      if (v) present.push_back(*v);
    }
    double median = 0.0;
    if (!present.empty()) {
      std::sort(present.begin(), present.end());
      const std::size_t mid = present.size() / 2;
      median = present.size() % 2 ? present[mid] : 0.5 * (present[mid - 1] + present[mid]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = profiles[i].values()[j];
      features(i, j) = v ? *v : median;
    }
  }
  const Matrix Z = standardized(features);

  ClusterAssignment best;
  best.inertia = std::numeric_limits<double>::infinity();
  const std::size_t restarts = 20;
  for (std::size_t restart = 0; restart < restarts; ++restart) {
    Rng rng(hash_combine(seed, restart));
    std::vector<std::size_t> init(n);
    std::iota(init.begin(), init.end(), std::size_t{0});
    rng.shuffle(init);
    Matrix centroids(k, d);
    for (std::size_t c = 0; c < k; ++c) {
      const auto src = Z.row(init[c]);
      std::copy(src.begin(), src.end(), centroids.row(c).begin());
    }

    std::vector<int> assignment(n, -1);
    for (std::size_t iter = 0; iter < 200; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t nearest = 0;
        double nearest_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
          const double dd = squared_distance(Z.row(i), centroids.row(c));
          if (dd < nearest_d) {
            nearest_d = dd;
            nearest = c;
          }
        }
        if (assignment[i] != static_cast<int>(nearest)) {
          assignment[i] = static_cast<int>(nearest);
          changed = true;
        }
      }
      // Recompute centroids; an emptied cluster takes the point farthest
      // from its centroid.
      std::vector<std::size_t> counts(k, 0);
      Matrix sums(k, d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        ++counts[assignment[i]];
        const auto row = Z.row(i);
        auto dest = sums.row(assignment[i]);
        for (std::size_t c = 0; c < d; ++c) dest[c] += row[c];
      }
      for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
          std::size_t farthest = 0;
          double far_d = -1.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double dd =
                squared_distance(Z.row(i), centroids.row(assignment[i]));
            if (dd > far_d) {
              far_d = dd;
              farthest = i;
            }
          }
          assignment[farthest] = static_cast<int>(c);
          const auto src = Z.row(farthest);
          std::copy(src.begin(), src.end(), centroids.row(c).begin());
          changed = true;
          continue;
        }
        auto dest = centroids.row(c);
        const auto src = sums.row(c);
        for (std::size_t col = 0; col < d; ++col)
          dest[col] = src[col] / static_cast<double>(counts[c]);
      }
      if (!changed) break;
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      inertia += squared_distance(Z.row(i), centroids.row(assignment[i]));
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.centroids = centroids;
      best.cluster.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) best.cluster[i] = assignment[i] + 1;
    }
  }
  best.names.reserve(n);
  for (const auto& p : profiles) best.names.push_back(p.dataset_name);
  return best;
}

namespace {

std::string format_value(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream os;
  os.precision(12);
  os << *v;
  return os.str();
}

}  // namespace

void write_profile_csv_header(std::ostream& out) {
  out << "dataset";
  for (const char* name : ComplexityProfile::measure_names()) out << ',' << name;
  out << '\n';
}

void write_profile_csv_row(const ComplexityProfile& profile, std::ostream& out) {
  out << profile.dataset_name;
  for (const auto& v : profile.values()) out << ',' << format_value(v);
  out << '\n';
}

std::vector<ComplexityProfile> read_profiles_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(errc::file_not_found, path.string());
  std::string line;
  if (!std::getline(in, line)) raise(errc::empty_store, "empty profile file " + path.string());

  std::vector<ComplexityProfile> profiles;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 1 + ComplexityProfile::count)
      raise(errc::config_invalid, "malformed profile row in " + path.string());
    ComplexityProfile p;
    p.dataset_name = cells[0];
    std::array<std::optional<double>*, ComplexityProfile::count> slots = {
        &p.t2, &p.t3, &p.t4, &p.l1, &p.l2, &p.l3, &p.f1, &p.f1v, &p.f2,
        &p.f3, &p.f4, &p.n1, &p.n2, &p.n3, &p.n4, &p.t1, &p.lsc};
    for (std::size_t j = 0; j < ComplexityProfile::count; ++j) {
      if (cells[j + 1] == "NA")
        *slots[j] = std::nullopt;
      else
        *slots[j] = std::stod(cells[j + 1]);
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<ComplexityProfile> read_profiles_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) raise(errc::file_not_found, dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ComplexityProfile> profiles;
  for (const auto& f : files) {
    auto batch = read_profiles_csv(f);
    profiles.insert(profiles.end(), batch.begin(), batch.end());
  }
  if (profiles.empty()) raise(errc::too_few_profiles, "no profiles found under " + dir.string());
  return profiles;
}

}  // namespace rashlab
