#include "rashlab/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rashlab/error.hpp"
#include "rashlab/rng.hpp"

namespace rashlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  return cell == "NA" || cell == "na" || cell == "N/A" || cell == "n/a" || cell == "?" ||
         cell == "NaN" || cell == "nan" || cell == "NULL" || cell == "null";
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) return false;
  return std::isfinite(out);
}

// RFC-4180-style record reader: handles quoted fields, doubled quotes and
// CR/LF/CRLF terminators. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    saw_any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get();
      fields.push_back(field);
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!saw_any) return false;
  fields.push_back(field);
  return true;
}

}  // namespace

void Dataset::validate() const {
  if (n() < 2) raise(errc::empty_after_cleaning, "dataset '" + name + "' has fewer than 2 rows");
  if (p() < 1) raise(errc::empty_after_cleaning, "dataset '" + name + "' has no features");
  if (y.size() != n() || row_ids.size() != n())
    raise(errc::dimension_mismatch, "label/row_id length does not match X rows");
  if (feature_names.size() != p() || feature_kinds.size() != p())
    raise(errc::dimension_mismatch, "feature metadata does not match X columns");
  for (const int v : y)
    if (v != 0 && v != 1) raise(errc::non_binary_target, "labels must be 0/1");
  for (const double v : X.data())
    if (!std::isfinite(v)) raise(errc::empty_after_cleaning, "non-finite value in X");
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::string& positive_label, CsvLoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::file_not_found, path.string());

  std::vector<std::string> header;
  if (!read_record(in, header) || header.empty())
    raise(errc::empty_after_cleaning, "no header row in " + path.string());
  for (auto& h : header) h = trim(h);
  // Strip a UTF-8 BOM if present.
  if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
    header[0] = header[0].substr(3);

  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end())
    raise(errc::missing_dataset, "target column '" + target_column + "' not found in " + path.string());
  const std::size_t target_idx = static_cast<std::size_t>(target_it - header.begin());
  const std::size_t n_cols = header.size();

  std::vector<std::vector<std::string>> rows;
  std::vector<std::int64_t> source_ids;
  CsvLoadReport rep;
  std::vector<std::string> record;
  std::int64_t source_row = 0;
  while (read_record(in, record)) {
    if (record.size() == 1 && trim(record[0]).empty()) continue;  // blank line
    ++rep.rows_read;
    if (record.size() != n_cols)
      raise(errc::empty_after_cleaning, "row " + std::to_string(rep.rows_read) + " has " +
                                            std::to_string(record.size()) + " fields, expected " +
                                            std::to_string(n_cols));
    bool missing = false;
    for (auto& cell : record) {
      cell = trim(cell);
      if (is_missing(cell)) missing = true;
    }
    if (missing) {
      ++rep.rows_dropped_missing;
    } else {
      rows.push_back(record);
      source_ids.push_back(source_row);
    }
    ++source_row;
  }
  if (report) *report = rep;
  if (rows.size() < 2) raise(errc::empty_after_cleaning, "fewer than 2 usable rows in " + path.string());

  // Column typing: numeric iff every retained value parses as a finite double.
  std::vector<bool> numeric(n_cols, true);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      double v;
      if (numeric[c] && !parse_double(r[c], v)) numeric[c] = false;
    }
  }

  // Target levels and orientation.
  std::map<std::string, std::size_t> level_counts;
  for (const auto& r : rows) ++level_counts[r[target_idx]];
  if (level_counts.size() != 2)
    raise(errc::non_binary_target, "target '" + target_column + "' has " +
                                       std::to_string(level_counts.size()) + " distinct values");
  std::string positive = positive_label;
  if (positive.empty()) {
    // Default orientation: minority class is positive; ties pick the
    // lexicographically larger level so "1" beats "0".
    auto it = level_counts.begin();
    const auto& a = *it;
    const auto& b = *std::next(it);
    if (a.second == b.second)
      positive = std::max(a.first, b.first);
    else
      positive = (a.second < b.second) ? a.first : b.first;
  } else if (!level_counts.count(positive)) {
    raise(errc::non_binary_target,
          "positive label '" + positive + "' is not a level of '" + target_column + "'");
  }
  std::string negative;
  for (const auto& [level, _] : level_counts)
    if (level != positive) negative = level;

  Dataset ds;
  ds.name = path.stem().string();
  ds.target_name = target_column;
  ds.positive_label = positive;
  ds.negative_label = negative;
  ds.row_ids = std::move(source_ids);
  ds.y.reserve(rows.size());
  for (const auto& r : rows) ds.y.push_back(r[target_idx] == positive ? 1 : 0);

  // Build encoded columns: numeric passthrough, categorical one-hot with
  // levels in sorted order for determinism.
  std::vector<std::vector<double>> columns;
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (c == target_idx) continue;
    if (numeric[c]) {
      std::vector<double> col(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) parse_double(rows[r][c], col[r]);
      columns.push_back(std::move(col));
      ds.feature_names.push_back(header[c]);
      ds.feature_kinds.push_back(FeatureKind::numeric);
    } else {
      std::set<std::string> levels;
      for (const auto& r : rows) levels.insert(r[c]);
      OneHotGroup group;
      group.source_name = header[c];
      for (const auto& level : levels) {
        std::vector<double> col(rows.size(), 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r)
          if (rows[r][c] == level) col[r] = 1.0;
        group.columns.push_back(columns.size());
        columns.push_back(std::move(col));
        ds.feature_names.push_back(header[c] + "=" + level);
        ds.feature_kinds.push_back(FeatureKind::categorical);
      }
      ds.one_hot_groups.push_back(std::move(group));
    }
  }
  if (columns.empty()) raise(errc::empty_after_cleaning, "no feature columns in " + path.string());

  ds.X = Matrix(rows.size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r) ds.X(r, c) = columns[c][r];

  if (ds.count_label(1) == 0 || ds.count_label(0) == 0)
    raise(errc::single_class, "only one class present after cleaning");
  ds.validate();
  return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::file_not_found, "cannot open for writing: " + path.string());
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) {
      if (c == '"') q += "\"\"";
      else q += c;
    }
    return q + "\"";
  };
  for (const auto& f : ds.feature_names) out << quote(f) << ',';
  out << quote(ds.target_name.empty() ? std::string("target") : ds.target_name) << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < ds.n(); ++r) {
    for (const double v : ds.X.row(r)) out << v << ',';
    const std::string& label = ds.y[r] == 1 ? ds.positive_label : ds.negative_label;
    out << quote(label.empty() ? std::to_string(ds.y[r]) : label) << '\n';
  }
}

ClassStats class_stats(const Dataset& ds) {
  const std::size_t pos = ds.count_label(1);
  const std::size_t neg = ds.n() - pos;
  if (pos == 0 || neg == 0) raise(errc::single_class, "class_stats requires both classes");
  ClassStats st;
  st.n_min = std::min(pos, neg);
  st.n_maj = std::max(pos, neg);
  st.ir = static_cast<double>(st.n_maj) / static_cast<double>(st.n_min);
  return st;
}

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.name = ds.name;
  out.feature_names = ds.feature_names;
  out.feature_kinds = ds.feature_kinds;
  out.target_name = ds.target_name;
  out.positive_label = ds.positive_label;
  out.negative_label = ds.negative_label;
  out.one_hot_groups = ds.one_hot_groups;
  out.X = ds.X.select_rows(rows);
  out.y.reserve(rows.size());
  out.row_ids.reserve(rows.size());
  for (const std::size_t r : rows) {
    out.y.push_back(ds.y[r]);
    out.row_ids.push_back(ds.row_ids[r]);
  }
  return out;
}

}  // namespace

SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    raise(errc::degenerate_class_size,
          "test_fraction must be in (0,1), got " + std::to_string(test_fraction));

  std::vector<std::size_t> test_rows, train_rows;
  for (const int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (ds.y[i] == label) members.push_back(i);
    if (members.size() < 2)
      raise(errc::degenerate_class_size,
            "class " + std::to_string(label) + " has fewer than 2 rows");
    std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    Rng rng(hash_combine(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(members);
    test_rows.insert(test_rows.end(), members.begin(), members.begin() + n_test);
    train_rows.insert(train_rows.end(), members.begin() + n_test, members.end());
  }
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  SplitPair pair;
  pair.train = take_rows(ds, train_rows);
  pair.test = take_rows(ds, test_rows);
  pair.test_fraction = test_fraction;
  pair.seed = seed;
  return pair;
}

ColumnStats column_stats(const Matrix& X) {
  ColumnStats st;
  st.mean.assign(X.cols(), 0.0);
  st.sd.assign(X.cols(), 0.0);
  if (X.rows() == 0) return st;
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) st.mean[c] += X(r, c);
  for (double& m : st.mean) m /= static_cast<double>(X.rows());
  if (X.rows() < 2) return st;
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) {
      const double d = X(r, c) - st.mean[c];
      st.sd[c] += d * d;
    }
  for (double& s : st.sd) s = std::sqrt(s / static_cast<double>(X.rows() - 1));
  return st;
}

Matrix standardized(const Matrix& X, const ColumnStats& stats) {
  Matrix Z(X.rows(), X.cols());
  for (std::size_t c = 0; c < X.cols(); ++c) {
    const double sd = stats.sd[c];
    if (sd <= 0.0) continue;  // constant column -> zeros
    for (std::size_t r = 0; r < X.rows(); ++r) Z(r, c) = (X(r, c) - stats.mean[c]) / sd;
  }
  return Z;
}

Matrix standardized(const Matrix& X) { return standardized(X, column_stats(X)); }

NeighborGraph knn(const Matrix& X, std::size_t k, const std::vector<std::size_t>& query_rows,
                  const KnnOptions& options) {
  const std::size_t n = X.rows();
  if (k == 0 || k >= n)
    raise(errc::k_too_large, "k=" + std::to_string(k) + " with n=" + std::to_string(n));
  if (options.labels && options.labels->size() != n)
    raise(errc::length_mismatch, "labels length does not match X rows");

  const Matrix Z = options.standardize ? standardized(X) : Matrix();
  const Matrix& M = options.standardize ? Z : X;

  NeighborGraph graph;
  graph.k = k;
  if (query_rows.empty()) {
    graph.query_rows.resize(n);
    std::iota(graph.query_rows.begin(), graph.query_rows.end(), std::size_t{0});
  } else {
    graph.query_rows = query_rows;
  }
  const std::size_t q = graph.query_rows.size();
  graph.indices.resize(q * k);
  graph.distances.resize(q * k);
  if (options.labels) graph.neighbor_labels.resize(q * k);

  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(n);
  for (std::size_t qi = 0; qi < q; ++qi) {
    const std::size_t self = graph.query_rows[qi];
    const auto self_row = M.row(self);
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == self) continue;
      cand.emplace_back(squared_distance(self_row, M.row(j)), j);
    }
    // (distance, index) is a strict total order, so the k smallest are unique
    // and the tie rule (lower row index) is automatic.
    std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
    std::sort(cand.begin(), cand.begin() + k);
    for (std::size_t j = 0; j < k; ++j) {
      graph.indices[qi * k + j] = cand[j].second;
      graph.distances[qi * k + j] = std::sqrt(cand[j].first);
      if (options.labels) graph.neighbor_labels[qi * k + j] = (*options.labels)[cand[j].second];
    }
  }
  return graph;
}

}  // namespace rashlab
