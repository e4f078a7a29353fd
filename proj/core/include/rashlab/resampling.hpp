#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rashlab/dataset.hpp"

namespace rashlab {

enum class BalanceMethod {
  none,
  oversample,
  undersample,
  nearmiss,
  smote,
  adasyn,
  blsmote,
  dbsmote,
  rslsmote,
  ansmote,
  slsmote,
};

BalanceMethod balance_method_from_string(std::string_view name);
std::string to_string(BalanceMethod method);

/// The ten balancing methods, in canonical order (excludes `none`).
const std::vector<BalanceMethod>& all_balance_methods();

struct BalanceSpec {
  BalanceMethod method = BalanceMethod::smote;
  std::size_t k = 5;              // neighbor count for distance-based methods
  double target_ratio = 1.0;      // desired post-balancing imbalance ratio
  std::uint64_t seed = 0;
  bool standardize_distances = true;  // z-score columns before neighbor search
};

enum class RowTag { original, duplicate, synthetic, removed };

struct MethodTrace {
  std::size_t n_original = 0;
  std::size_t n_duplicate = 0;
  std::size_t n_synthetic = 0;
  std::size_t n_removed = 0;
  std::size_t n_skipped_noise = 0;            // ANSMOTE anchors with no reachable minority
  bool fallback_uniform_allocation = false;   // ADASYN degenerate case (all r_i = 0)
};

/// Balanced dataset plus per-row provenance. `provenance[i]` tags row i of
/// `data`; rows dropped by undersampling methods are listed separately by id.
struct ResampleOutcome {
  Dataset data;
  std::vector<RowTag> provenance;
  std::vector<std::int64_t> removed_row_ids;
  MethodTrace trace;
};

ResampleOutcome random_oversample(const Dataset& train, const BalanceSpec& spec);
ResampleOutcome random_undersample(const Dataset& train, const BalanceSpec& spec);

/// NearMiss-1: keeps the majority rows whose mean distance to their nearest
/// minority rows is smallest. k is clamped to the minority size.
ResampleOutcome near_miss(const Dataset& train, const BalanceSpec& spec);

ResampleOutcome smote(const Dataset& train, const BalanceSpec& spec);
ResampleOutcome adasyn(const Dataset& train, const BalanceSpec& spec);
ResampleOutcome borderline_smote(const Dataset& train, const BalanceSpec& spec);
ResampleOutcome db_smote(const Dataset& train, const BalanceSpec& spec);
ResampleOutcome safe_level_smote(const Dataset& train, const BalanceSpec& spec);
ResampleOutcome rsl_smote(const Dataset& train, const BalanceSpec& spec);
ResampleOutcome an_smote(const Dataset& train, const BalanceSpec& spec);

/// Dispatches on spec.method with a uniform error surface.
ResampleOutcome balance(const Dataset& train, const BalanceSpec& spec);

}  // namespace rashlab
