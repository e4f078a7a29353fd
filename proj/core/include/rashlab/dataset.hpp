#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rashlab/matrix.hpp"

namespace rashlab {

enum class FeatureKind { numeric, categorical };

/// Indicator columns produced by one-hot encoding a single source column.
struct OneHotGroup {
  std::string source_name;
  std::vector<std::size_t> columns;
};

/// Encoded tabular data with binary labels.
///
/// Immutable by convention after construction: every operation in the library
/// takes a Dataset by const reference and returns new objects, so shared
/// instances are safe to use concurrently.
struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;  // post-encoding column names
  std::vector<FeatureKind> feature_kinds;  // per post-encoding column
  Matrix X;                                // n x p, no NaN after ingestion
  std::vector<int> y;                      // 0/1; 1 = positive class
  std::string target_name;
  std::string positive_label;              // source level mapped to 1
  std::string negative_label;
  std::vector<std::int64_t> row_ids;       // stable provenance ids
  std::vector<OneHotGroup> one_hot_groups;

  std::size_t n() const noexcept { return X.rows(); }
  std::size_t p() const noexcept { return X.cols(); }

  std::size_t count_label(int label) const {
    std::size_t c = 0;
    for (const int v : y) c += (v == label);
    return c;
  }

  /// Throws on any violated structural invariant.
  void validate() const;
};

struct ClassStats {
  std::size_t n_min = 0;
  std::size_t n_maj = 0;
  double ir = 1.0;  // n_maj / n_min, always >= 1
};

struct SplitPair {
  Dataset train;
  Dataset test;
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// Exact k-nearest-neighbor table under Euclidean distance.
/// Row i of indices/distances answers query_rows[i]; distances are
/// nondecreasing along each row and never include the query point itself.
struct NeighborGraph {
  std::size_t k = 0;
  std::vector<std::size_t> query_rows;
  std::vector<std::size_t> indices;   // query_rows.size() x k, row-major
  std::vector<double> distances;      // same shape
  std::vector<int> neighbor_labels;   // same shape; empty when no labels given

  std::span<const std::size_t> neighbors(std::size_t q) const {
    return {indices.data() + q * k, k};
  }
  std::span<const double> neighbor_distances(std::size_t q) const {
    return {distances.data() + q * k, k};
  }
  std::span<const int> labels(std::size_t q) const {
    return {neighbor_labels.data() + q * k, k};
  }
};

struct CsvLoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped_missing = 0;
};

/// Loads a CSV (UTF-8, header row, comma delimiter, quoted fields allowed).
///
/// Numeric columns are parsed as-is; categorical columns are one-hot encoded
/// with one indicator per level. Rows containing missing values are dropped
/// and counted in `report`. The class given by `positive_label` maps to 1;
/// when empty, the minority class is used.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::string& positive_label = "", CsvLoadReport* report = nullptr);

/// Writes the encoded dataset back out as CSV (feature columns plus target).
void write_csv(const Dataset& ds, const std::filesystem::path& path);

ClassStats class_stats(const Dataset& ds);

/// Deterministic stratified split; per-class test share within one row of
/// `test_fraction`, and both partitions keep at least one row per class.
SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

struct KnnOptions {
  bool standardize = true;               // z-score columns before measuring distance
  const std::vector<int>* labels = nullptr;  // optional class labels to record per neighbor
};

/// Exact k nearest neighbors for each query row (all rows when empty),
/// searched over every row of X, self excluded, ties broken by lower index.
NeighborGraph knn(const Matrix& X, std::size_t k,
                  const std::vector<std::size_t>& query_rows = {},
                  const KnnOptions& options = {});

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> sd;  // sample standard deviation; 0 for constant columns
};

ColumnStats column_stats(const Matrix& X);

/// Z-scores every column; constant columns become all-zero.
Matrix standardized(const Matrix& X);
Matrix standardized(const Matrix& X, const ColumnStats& stats);

}  // namespace rashlab
