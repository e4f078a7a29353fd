#include "rashlab/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rashlab/error.hpp"
#include "rashlab/rng.hpp"

namespace rashlab {

BalanceMethod balance_method_from_string(std::string_view name) {
  if (name == "none") return BalanceMethod::none;
  if (name == "oversample") return BalanceMethod::oversample;
  if (name == "undersample") return BalanceMethod::undersample;
  if (name == "nearmiss") return BalanceMethod::nearmiss;
  if (name == "smote") return BalanceMethod::smote;
  if (name == "adasyn") return BalanceMethod::adasyn;
  if (name == "blsmote") return BalanceMethod::blsmote;
  if (name == "dbsmote") return BalanceMethod::dbsmote;
  if (name == "rslsmote") return BalanceMethod::rslsmote;
  if (name == "ansmote") return BalanceMethod::ansmote;
  if (name == "slsmote") return BalanceMethod::slsmote;
  raise(errc::unknown_method, "unknown balancing method '" + std::string(name) + "'");
}

std::string to_string(BalanceMethod method) {
  switch (method) {
    case BalanceMethod::none: return "none";
    case BalanceMethod::oversample: return "oversample";
    case BalanceMethod::undersample: return "undersample";
    case BalanceMethod::nearmiss: return "nearmiss";
    case BalanceMethod::smote: return "smote";
    case BalanceMethod::adasyn: return "adasyn";
    case BalanceMethod::blsmote: return "blsmote";
    case BalanceMethod::dbsmote: return "dbsmote";
    case BalanceMethod::rslsmote: return "rslsmote";
    case BalanceMethod::ansmote: return "ansmote";
    case BalanceMethod::slsmote: return "slsmote";
  }
  return "none";
}

const std::vector<BalanceMethod>& all_balance_methods() {
  static const std::vector<BalanceMethod> methods = {
      BalanceMethod::oversample, BalanceMethod::undersample, BalanceMethod::nearmiss,
      BalanceMethod::smote,      BalanceMethod::adasyn,      BalanceMethod::blsmote,
      BalanceMethod::dbsmote,    BalanceMethod::rslsmote,    BalanceMethod::ansmote,
      BalanceMethod::slsmote};
  return methods;
}

namespace {

struct ClassSplit {
  int minority_label = 1;
  int majority_label = 0;
  std::vector<std::size_t> minority;  // row indices, ascending
  std::vector<std::size_t> majority;
};

ClassSplit split_classes(const Dataset& ds) {
  ClassSplit cs;
  const std::size_t pos = ds.count_label(1);
  const std::size_t neg = ds.n() - pos;
  if (pos == 0 || neg == 0) raise(errc::single_class, "balancing requires both classes");
  cs.minority_label = (pos <= neg) ? 1 : 0;
  cs.majority_label = 1 - cs.minority_label;
  for (std::size_t i = 0; i < ds.n(); ++i)
    (ds.y[i] == cs.minority_label ? cs.minority : cs.majority).push_back(i);
  return cs;
}

void require_k_below_minority(const BalanceSpec& spec, const ClassSplit& cs) {
  if (spec.k == 0 || spec.k >= cs.minority.size())
    raise(errc::k_too_large, "k=" + std::to_string(spec.k) + " requires more than k minority rows (have " +
                                 std::to_string(cs.minority.size()) + ")");
}

// Synthetic rows needed so that n_maj / (n_min + G) hits the target ratio.
std::size_t synthetic_deficit(std::size_t n_maj, std::size_t n_min, double target_ratio) {
  const long long want_min = std::llround(static_cast<double>(n_maj) / target_ratio);
  const long long g = want_min - static_cast<long long>(n_min);
  return g > 0 ? static_cast<std::size_t>(g) : 0;
}

// Majority rows to keep so that kept / n_min hits the target ratio.
std::size_t keep_majority_count(std::size_t n_maj, std::size_t n_min, double target_ratio) {
  const long long keep = std::llround(target_ratio * static_cast<double>(n_min));
  return static_cast<std::size_t>(std::clamp<long long>(keep, 1, static_cast<long long>(n_maj)));
}

// Apportions `total` across nonnegative weights, largest-remainder rounding.
// Zero-weight entries never receive a share.
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> alloc(weights.size(), 0);
  if (total == 0 || sum <= 0.0) return alloc;
  std::vector<std::pair<double, std::size_t>> remainders;  // (-frac, index) for stable ordering
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = weights[i] / sum * static_cast<double>(total);
    alloc[i] = static_cast<std::size_t>(std::floor(quota));
    assigned += alloc[i];
    if (weights[i] > 0.0) remainders.emplace_back(-(quota - std::floor(quota)), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t r = 0; assigned < total; ++r) {
    alloc[remainders[r % remainders.size()].second] += 1;
    ++assigned;
  }
  return alloc;
}

ResampleOutcome identity_outcome(const Dataset& ds) {
  ResampleOutcome out;
  out.data = ds;
  out.provenance.assign(ds.n(), RowTag::original);
  out.trace.n_original = ds.n();
  return out;
}

// Builds an outcome that keeps `kept` original rows (ascending) and appends
// extra rows afterwards. Appended rows get fresh row ids.
struct OutcomeBuilder {
  explicit OutcomeBuilder(const Dataset& source) : src(source) {
    next_id = 0;
    for (const std::int64_t id : source.row_ids) next_id = std::max(next_id, id + 1);
  }

  void keep_rows(const std::vector<std::size_t>& rows) {
    for (const std::size_t r : rows) {
      out.data.X.append_row(src.X.row(r));
      out.data.y.push_back(src.y[r]);
      out.data.row_ids.push_back(src.row_ids[r]);
      out.provenance.push_back(RowTag::original);
      ++out.trace.n_original;
    }
  }

  void append_row(std::span<const double> values, int label, RowTag tag) {
    out.data.X.append_row(values);
    out.data.y.push_back(label);
    out.data.row_ids.push_back(next_id++);
    out.provenance.push_back(tag);
    if (tag == RowTag::duplicate) ++out.trace.n_duplicate;
    if (tag == RowTag::synthetic) ++out.trace.n_synthetic;
  }

  ResampleOutcome finish() {
    out.data.name = src.name;
    out.data.feature_names = src.feature_names;
    out.data.feature_kinds = src.feature_kinds;
    out.data.target_name = src.target_name;
    out.data.positive_label = src.positive_label;
    out.data.negative_label = src.negative_label;
    out.data.one_hot_groups = src.one_hot_groups;
    return std::move(out);
  }

  const Dataset& src;
  ResampleOutcome out;
  std::int64_t next_id;
};

std::vector<std::size_t> all_rows(const Dataset& ds) {
  std::vector<std::size_t> rows(ds.n());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Shared state for the SMOTE family: minority indices, the minority-only
// neighbor table, and per-row majority counts among the k nearest overall.
struct SmoteContext {
  ClassSplit cs;
  std::size_t G = 0;                 // synthetic samples to emit
  NeighborGraph minority_knn;        // neighbors within the minority class
  std::vector<std::size_t> delta;    // majority neighbors among k nearest (all rows)
  std::vector<double> safe_level;    // per minority point: same-class fraction
};

SmoteContext make_smote_context(const Dataset& ds, const BalanceSpec& spec, bool need_delta) {
  SmoteContext ctx;
  ctx.cs = split_classes(ds);
  require_k_below_minority(spec, ctx.cs);
  ctx.G = synthetic_deficit(ctx.cs.majority.size(), ctx.cs.minority.size(), spec.target_ratio);

  // One z-scoring over the whole training set; the minority-only neighbor
  // table must live in the same metric as the all-rows one.
  const Matrix Z = spec.standardize_distances ? standardized(ds.X) : ds.X;
  KnnOptions raw;
  raw.standardize = false;
  ctx.minority_knn = knn(Z.select_rows(ctx.cs.minority), spec.k, {}, raw);

  if (need_delta) {
    const NeighborGraph all_knn = knn(Z, spec.k, ctx.cs.minority, raw);
    ctx.delta.resize(ctx.cs.minority.size(), 0);
    ctx.safe_level.resize(ctx.cs.minority.size(), 0.0);
    for (std::size_t i = 0; i < ctx.cs.minority.size(); ++i) {
      std::size_t maj = 0;
      for (const std::size_t nb : all_knn.neighbors(i))
        if (ds.y[nb] == ctx.cs.majority_label) ++maj;
      ctx.delta[i] = maj;
      ctx.safe_level[i] =
          static_cast<double>(spec.k - maj) / static_cast<double>(spec.k);
    }
  }
  return ctx;
}

std::span<const double> row_of(const Dataset& ds, std::size_t r) { return ds.X.row(r); }

void interpolate(std::span<const double> a, std::span<const double> b, double lambda,
                 std::vector<double>& out) {
  out.resize(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) out[c] = a[c] + lambda * (b[c] - a[c]);
}

// Round-robin SMOTE emission over a fixed anchor order. `pick_neighbor` maps
// (anchor position in minority list, rng) to a minority row index;
// `make_lambda` supplies the interpolation weight.
template <typename PickNeighbor, typename MakeLambda, typename AnchorCoords>
ResampleOutcome emit_synthetics(const Dataset& ds, const SmoteContext& ctx,
                                std::vector<std::size_t> anchors, std::size_t total,
                                Rng& rng, PickNeighbor pick_neighbor, MakeLambda make_lambda,
                                AnchorCoords anchor_coords, MethodTrace trace = {}) {
  rng.shuffle(anchors);
  OutcomeBuilder builder(ds);
  builder.keep_rows(all_rows(ds));
  std::vector<double> synthetic;
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t a = anchors[t % anchors.size()];
    const std::size_t neighbor_row = pick_neighbor(a, rng);
    const double lambda = make_lambda(a, neighbor_row, rng);
    interpolate(anchor_coords(a), row_of(ds, neighbor_row), lambda, synthetic);
    builder.append_row(synthetic, ctx.cs.minority_label, RowTag::synthetic);
  }
  ResampleOutcome out = builder.finish();
  out.trace.n_skipped_noise = trace.n_skipped_noise;
  out.trace.fallback_uniform_allocation = trace.fallback_uniform_allocation;
  return out;
}

// Allocation-driven variant (ADASYN / DBSMOTE): per-anchor quotas instead of
// round-robin.
ResampleOutcome emit_allocated(const Dataset& ds, const SmoteContext& ctx,
                               const std::vector<std::size_t>& allocation, Rng& rng,
                               MethodTrace trace) {
  OutcomeBuilder builder(ds);
  builder.keep_rows(all_rows(ds));
  std::vector<double> synthetic;
  for (std::size_t a = 0; a < allocation.size(); ++a) {
    for (std::size_t t = 0; t < allocation[a]; ++t) {
      const std::size_t pick = rng.next_index(ctx.minority_knn.k);
      const std::size_t neighbor_row = ctx.cs.minority[ctx.minority_knn.neighbors(a)[pick]];
      const double lambda = rng.next_double();
      interpolate(row_of(ds, ctx.cs.minority[a]), row_of(ds, neighbor_row), lambda, synthetic);
      builder.append_row(synthetic, ctx.cs.minority_label, RowTag::synthetic);
    }
  }
  ResampleOutcome out = builder.finish();
  out.trace.n_skipped_noise = trace.n_skipped_noise;
  out.trace.fallback_uniform_allocation = trace.fallback_uniform_allocation;
  return out;
}

}  // namespace

ResampleOutcome random_oversample(const Dataset& train, const BalanceSpec& spec) {
  const ClassSplit cs = split_classes(train);
  const std::size_t G = synthetic_deficit(cs.majority.size(), cs.minority.size(), spec.target_ratio);
  Rng rng(spec.seed);
  OutcomeBuilder builder(train);
  builder.keep_rows(all_rows(train));
  for (std::size_t t = 0; t < G; ++t) {
    const std::size_t r = cs.minority[rng.next_index(cs.minority.size())];
    builder.append_row(train.X.row(r), cs.minority_label, RowTag::duplicate);
  }
  return builder.finish();
}

ResampleOutcome random_undersample(const Dataset& train, const BalanceSpec& spec) {
  const ClassSplit cs = split_classes(train);
  const std::size_t keep = keep_majority_count(cs.majority.size(), cs.minority.size(), spec.target_ratio);
  if (keep >= cs.majority.size()) return identity_outcome(train);

  std::vector<std::size_t> majority = cs.majority;
  Rng rng(spec.seed);
  rng.shuffle(majority);
  std::vector<std::size_t> kept(majority.begin(), majority.begin() + keep);

  std::vector<std::size_t> retained = cs.minority;
  retained.insert(retained.end(), kept.begin(), kept.end());
  std::sort(retained.begin(), retained.end());

  OutcomeBuilder builder(train);
  builder.keep_rows(retained);
  ResampleOutcome out = builder.finish();
  std::vector<std::size_t> removed(majority.begin() + keep, majority.end());
  std::sort(removed.begin(), removed.end());
  for (const std::size_t r : removed) out.removed_row_ids.push_back(train.row_ids[r]);
  out.trace.n_removed = removed.size();
  return out;
}

ResampleOutcome near_miss(const Dataset& train, const BalanceSpec& spec) {
  const ClassSplit cs = split_classes(train);
  const std::size_t keep = keep_majority_count(cs.majority.size(), cs.minority.size(), spec.target_ratio);
  if (keep >= cs.majority.size()) return identity_outcome(train);

  const std::size_t k_eff = std::min(spec.k, cs.minority.size());
  if (k_eff == 0) raise(errc::k_too_large, "near_miss requires k >= 1");

  const Matrix Z = spec.standardize_distances ? standardized(train.X) : train.X;
  std::vector<std::pair<double, std::size_t>> ranking;  // (mean distance, majority row)
  ranking.reserve(cs.majority.size());
  std::vector<double> dists(cs.minority.size());
  for (const std::size_t m : cs.majority) {
    for (std::size_t i = 0; i < cs.minority.size(); ++i)
      dists[i] = squared_distance(Z.row(m), Z.row(cs.minority[i]));
    std::nth_element(dists.begin(), dists.begin() + (k_eff - 1), dists.end());
    double mean = 0.0;
    for (std::size_t i = 0; i < k_eff; ++i) mean += std::sqrt(dists[i]);
    ranking.emplace_back(mean / static_cast<double>(k_eff), m);
  }
  std::sort(ranking.begin(), ranking.end());  // ties resolve to lower row index

  std::vector<std::size_t> retained = cs.minority;
  for (std::size_t i = 0; i < keep; ++i) retained.push_back(ranking[i].second);
  std::sort(retained.begin(), retained.end());

  OutcomeBuilder builder(train);
  builder.keep_rows(retained);
  ResampleOutcome out = builder.finish();
  std::vector<std::size_t> removed;
  for (std::size_t i = keep; i < ranking.size(); ++i) removed.push_back(ranking[i].second);
  std::sort(removed.begin(), removed.end());
  for (const std::size_t r : removed) out.removed_row_ids.push_back(train.row_ids[r]);
  out.trace.n_removed = removed.size();
  return out;
}

ResampleOutcome smote(const Dataset& train, const BalanceSpec& spec) {
  SmoteContext ctx = make_smote_context(train, spec, /*need_delta=*/false);
  Rng rng(spec.seed);
  std::vector<std::size_t> anchors(ctx.cs.minority.size());
  std::iota(anchors.begin(), anchors.end(), std::size_t{0});
  const auto& cs = ctx.cs;
  const auto& mk = ctx.minority_knn;
  return emit_synthetics(
      train, ctx, std::move(anchors), ctx.G, rng,
      [&](std::size_t a, Rng& r) { return cs.minority[mk.neighbors(a)[r.next_index(mk.k)]]; },
      [](std::size_t, std::size_t, Rng& r) { return r.next_double(); },
      [&](std::size_t a) { return train.X.row(cs.minority[a]); });
}

ResampleOutcome adasyn(const Dataset& train, const BalanceSpec& spec) {
  SmoteContext ctx = make_smote_context(train, spec, /*need_delta=*/true);
  std::vector<double> r(ctx.delta.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = static_cast<double>(ctx.delta[i]) / static_cast<double>(spec.k);
  MethodTrace trace;
  const double r_sum = std::accumulate(r.begin(), r.end(), 0.0);
  if (r_sum <= 0.0) {
    // No borderline minority points; fall back to a uniform allocation so the
    // grid cell still reaches the target ratio.
    std::fill(r.begin(), r.end(), 1.0);
    trace.fallback_uniform_allocation = true;
  }
  const std::vector<std::size_t> allocation = largest_remainder(r, ctx.G);
  Rng rng(spec.seed);
  return emit_allocated(train, ctx, allocation, rng, trace);
}

ResampleOutcome borderline_smote(const Dataset& train, const BalanceSpec& spec) {
  SmoteContext ctx = make_smote_context(train, spec, /*need_delta=*/true);
  // DANGER: at least half the neighborhood is majority but not all of it.
  std::vector<std::size_t> danger;
  for (std::size_t i = 0; i < ctx.delta.size(); ++i)
    if (2 * ctx.delta[i] >= spec.k && ctx.delta[i] < spec.k) danger.push_back(i);
  if (danger.empty())
    raise(errc::empty_danger_set, "no borderline minority points for blsmote");

  Rng rng(spec.seed);
  const auto& cs = ctx.cs;
  const auto& mk = ctx.minority_knn;
  return emit_synthetics(
      train, ctx, std::move(danger), ctx.G, rng,
      [&](std::size_t a, Rng& r) { return cs.minority[mk.neighbors(a)[r.next_index(mk.k)]]; },
      [](std::size_t, std::size_t, Rng& r) { return r.next_double(); },
      [&](std::size_t a) { return train.X.row(cs.minority[a]); });
}

ResampleOutcome db_smote(const Dataset& train, const BalanceSpec& spec) {
  SmoteContext ctx = make_smote_context(train, spec, /*need_delta=*/false);
  // Density proxy: mean distance to the k nearest minority neighbors.
  // Denser anchors (small d) receive proportionally more synthetics.
  std::vector<double> weights(ctx.cs.minority.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double mean = 0.0;
    for (const double d : ctx.minority_knn.neighbor_distances(i)) mean += d;
    mean /= static_cast<double>(spec.k);
    weights[i] = 1.0 / std::max(mean, std::numeric_limits<double>::epsilon());
  }
  const std::vector<std::size_t> allocation = largest_remainder(weights, ctx.G);
  Rng rng(spec.seed);
  return emit_allocated(train, ctx, allocation, rng, {});
}

namespace {

// λ drawn uniform then pulled toward the safer endpoint: scaled by
// s(x_j) / (s(x_i) + s(x_j)), so an unsafe neighbor keeps the sample near x_i.
double biased_lambda(double s_anchor, double s_neighbor, Rng& rng) {
  const double denom = s_anchor + s_neighbor;
  const double scale = denom > 0.0 ? s_neighbor / denom : 0.5;
  return rng.next_double() * scale;
}

}  // namespace

ResampleOutcome safe_level_smote(const Dataset& train, const BalanceSpec& spec) {
  SmoteContext ctx = make_smote_context(train, spec, /*need_delta=*/true);
  std::vector<std::size_t> anchors;
  for (std::size_t i = 0; i < ctx.safe_level.size(); ++i)
    if (ctx.safe_level[i] > 0.5) anchors.push_back(i);
  if (anchors.empty()) raise(errc::no_safe_anchors, "no minority point has safe level > 0.5");

  Rng rng(spec.seed);
  const auto& cs = ctx.cs;
  const auto& mk = ctx.minority_knn;
  std::size_t last_neighbor_pos = 0;  // minority-list position of the neighbor just picked
  return emit_synthetics(
      train, ctx, std::move(anchors), ctx.G, rng,
      [&](std::size_t a, Rng& r) {
        last_neighbor_pos = mk.neighbors(a)[r.next_index(mk.k)];
        return cs.minority[last_neighbor_pos];
      },
      [&](std::size_t a, std::size_t, Rng& r) {
        return biased_lambda(ctx.safe_level[a], ctx.safe_level[last_neighbor_pos], r);
      },
      [&](std::size_t a) { return train.X.row(cs.minority[a]); });
}

ResampleOutcome rsl_smote(const Dataset& train, const BalanceSpec& spec) {
  SmoteContext ctx = make_smote_context(train, spec, /*need_delta=*/true);
  const auto& cs = ctx.cs;
  const auto& mk = ctx.minority_knn;

  // Relocate unsafe anchors to the midpoint between the anchor and its safest
  // minority neighbor; safe anchors keep their coordinates, matching
  // safe_level_smote exactly when every anchor is safe.
  Matrix anchor_coords(cs.minority.size(), train.p());
  for (std::size_t a = 0; a < cs.minority.size(); ++a) {
    const auto original = train.X.row(cs.minority[a]);
    auto dest = anchor_coords.row(a);
    if (ctx.safe_level[a] > 0.5) {
      std::copy(original.begin(), original.end(), dest.begin());
      continue;
    }
    std::size_t safest = mk.neighbors(a)[0];
    for (const std::size_t nb : mk.neighbors(a))
      if (ctx.safe_level[nb] > ctx.safe_level[safest]) safest = nb;
    const auto target = train.X.row(cs.minority[safest]);
    for (std::size_t c = 0; c < train.p(); ++c) dest[c] = 0.5 * (original[c] + target[c]);
  }

  std::vector<std::size_t> anchors(cs.minority.size());
  std::iota(anchors.begin(), anchors.end(), std::size_t{0});
  Rng rng(spec.seed);
  std::size_t last_neighbor_pos = 0;
  return emit_synthetics(
      train, ctx, std::move(anchors), ctx.G, rng,
      [&](std::size_t a, Rng& r) {
        last_neighbor_pos = mk.neighbors(a)[r.next_index(mk.k)];
        return cs.minority[last_neighbor_pos];
      },
      [&](std::size_t a, std::size_t, Rng& r) {
        return biased_lambda(ctx.safe_level[a], ctx.safe_level[last_neighbor_pos], r);
      },
      [&](std::size_t a) {
        return std::span<const double>(anchor_coords.row(a));
      });
}

ResampleOutcome an_smote(const Dataset& train, const BalanceSpec& spec) {
  SmoteContext ctx = make_smote_context(train, spec, /*need_delta=*/false);
  const auto& cs = ctx.cs;
  const std::size_t cap = 3 * spec.k;

  // Per anchor: the minority neighbors within the adaptive neighborhood,
  // i.e. the k' nearest rows of any class where k' grows until a minority
  // neighbor appears (k' <= 3k).
  KnnOptions opts;
  opts.standardize = spec.standardize_distances;
  const std::size_t probe = std::min(cap, train.n() - 1);
  const NeighborGraph wide = knn(train.X, probe, cs.minority, opts);

  std::vector<std::vector<std::size_t>> reachable(cs.minority.size());
  MethodTrace trace;
  std::vector<std::size_t> usable;
  for (std::size_t a = 0; a < cs.minority.size(); ++a) {
    const auto nbs = wide.neighbors(a);
    std::size_t k_prime = 0;
    for (std::size_t j = 0; j < nbs.size(); ++j) {
      if (train.y[nbs[j]] == cs.minority_label) {
        k_prime = j + 1;
        break;
      }
    }
    if (k_prime == 0) {
      ++trace.n_skipped_noise;  // isolated anchor, no minority within the cap
      continue;
    }
    for (std::size_t j = 0; j < k_prime; ++j)
      if (train.y[nbs[j]] == cs.minority_label) reachable[a].push_back(nbs[j]);
    usable.push_back(a);
  }
  if (usable.empty())
    raise(errc::no_safe_anchors, "every minority point is isolated beyond 3k neighbors");

  Rng rng(spec.seed);
  return emit_synthetics(
      train, ctx, std::move(usable), ctx.G, rng,
      [&](std::size_t a, Rng& r) { return reachable[a][r.next_index(reachable[a].size())]; },
      [](std::size_t, std::size_t, Rng& r) { return r.next_double(); },
      [&](std::size_t a) { return train.X.row(cs.minority[a]); }, trace);
}

ResampleOutcome balance(const Dataset& train, const BalanceSpec& spec) {
  switch (spec.method) {
    case BalanceMethod::none: return identity_outcome(train);
    case BalanceMethod::oversample: return random_oversample(train, spec);
    case BalanceMethod::undersample: return random_undersample(train, spec);
    case BalanceMethod::nearmiss: return near_miss(train, spec);
    case BalanceMethod::smote: return smote(train, spec);
    case BalanceMethod::adasyn: return adasyn(train, spec);
    case BalanceMethod::blsmote: return borderline_smote(train, spec);
    case BalanceMethod::dbsmote: return db_smote(train, spec);
    case BalanceMethod::rslsmote: return rsl_smote(train, spec);
    case BalanceMethod::ansmote: return an_smote(train, spec);
    case BalanceMethod::slsmote: return safe_level_smote(train, spec);
  }
  raise(errc::unknown_method, "unhandled balancing method");
}

}  // namespace rashlab
