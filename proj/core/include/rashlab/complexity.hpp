#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rashlab/dataset.hpp"

namespace rashlab {

struct ComplexityOptions {
  std::uint64_t seed = 0;
  std::size_t neighborhood_cutoff = 15000;  // larger datasets get NA neighborhood measures
  bool subsample_large = false;             // uniform subsample to the cutoff instead of NA
  bool standardize = true;                  // z-score columns before distance work
  bool legacy_orientation = false;          // report T2=n/p, T3=n/k95, T4 unchanged
  bool pca_standardize = false;             // PCA on z-scored columns instead of raw covariance
};

/// The seventeen complexity measures of one dataset. Missing values carry an
/// NA flag (neighborhood family only, for oversized inputs).
struct ComplexityProfile {
  std::string dataset_name;
  std::optional<double> t2, t3, t4;
  std::optional<double> l1, l2, l3;
  std::optional<double> f1, f1v, f2, f3, f4;
  std::optional<double> n1, n2, n3, n4, t1, lsc;
  double raw_max_fisher = 0.0;  // untransformed companion to f1

  static constexpr std::size_t count = 17;
  static const std::array<const char*, count>& measure_names();
  std::array<std::optional<double>, count> values() const;
};

struct DimensionalityMetrics {
  double t2 = 0.0, t3 = 0.0, t4 = 0.0;
  std::size_t k95 = 0;  // PCA components reaching 95% cumulative variance
};

DimensionalityMetrics dimensionality_metrics(const Dataset& ds,
                                             const ComplexityOptions& options = {});

/// Hinge-loss linear SVM fit by deterministic full-batch subgradient descent
/// on standardized features; seed only perturbs the initial weights.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> loss_trace;

  /// Signed decision value on a standardized row.
  double decision(std::span<const double> row) const {
    double acc = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * row[i];
    return acc;
  }
};

LinearModel train_linear_classifier(const Dataset& ds, std::uint64_t seed);

struct LinearityMetrics {
  double l1 = 0.0, l2 = 0.0, l3 = 0.0;
};

LinearityMetrics linearity_metrics(const Dataset& ds, std::uint64_t seed);

struct OverlapMetrics {
  double f1 = 0.0, f1v = 0.0, f2 = 0.0, f3 = 0.0, f4 = 0.0;
  double raw_max_fisher = 0.0;
};

OverlapMetrics overlapping_metrics(const Dataset& ds);

struct NeighborhoodMetrics {
  std::optional<double> n1, n2, n3, n4, t1, lsc;
  std::string na_reason;
};

NeighborhoodMetrics neighborhood_metrics(const Dataset& ds, const ComplexityOptions& options = {});

ComplexityProfile complexity_profile(const Dataset& ds, const ComplexityOptions& options = {});

struct ClusterAssignment {
  std::vector<std::string> names;
  std::vector<int> cluster;  // 1-based ids, aligned with names
  Matrix centroids;          // k x 17, in z-scored measure space
  double inertia = 0.0;
};

/// K-means over z-scored measures (NA imputed by per-measure median),
/// 20 seeded restarts, best inertia kept.
ClusterAssignment cluster_datasets(const std::vector<ComplexityProfile>& profiles, std::size_t k,
                                   std::uint64_t seed);

void write_profile_csv_header(std::ostream& out);
void write_profile_csv_row(const ComplexityProfile& profile, std::ostream& out);
std::vector<ComplexityProfile> read_profiles_csv(const std::filesystem::path& path);
std::vector<ComplexityProfile> read_profiles_dir(const std::filesystem::path& dir);

}  // namespace rashlab
