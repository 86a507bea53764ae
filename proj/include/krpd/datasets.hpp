#pragma once

#include "krpd/common.hpp"
#include "krpd/rng.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace krpd {

/// A data cloud: N samples in d dimensions, optionally labelled 0 (inlier) / 1 (outlier).
class DataCloud {
 public:
  DataCloud() = default;

  explicit DataCloud(RowMatrix features, std::optional<std::vector<int>> labels = std::nullopt)
      : features_(std::move(features)), labels_(std::move(labels)) {
    if (features_.rows() < 1 || features_.cols() < 1) {
      throw DataError("data cloud must have N >= 1 and d >= 1");
    }
    if (!features_.allFinite()) throw DataError("data cloud contains non-finite values");
    if (labels_) {
      if (static_cast<Eigen::Index>(labels_->size()) != features_.rows()) {
        throw DataError("label count does not match sample count");
      }
      for (int v : *labels_) {
        if (v != 0 && v != 1) throw DataError("labels must be 0 or 1");
      }
    }
  }

  const RowMatrix& features() const noexcept { return features_; }
  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<int>& labels() const {
    if (!labels_) throw DataError("labels required");
    return *labels_;
  }
  Eigen::Index n_samples() const noexcept { return features_.rows(); }
  Eigen::Index n_dims() const noexcept { return features_.cols(); }

  /// Sub-cloud made of the given rows, in the given order.
  DataCloud subset(const std::vector<Eigen::Index>& rows) const {
    RowMatrix f(static_cast<Eigen::Index>(rows.size()), n_dims());
    std::optional<std::vector<int>> l;
    if (labels_) l.emplace();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      f.row(static_cast<Eigen::Index>(i)) = features_.row(rows[i]);
      if (l) l->push_back((*labels_)[static_cast<std::size_t>(rows[i])]);
    }
    return DataCloud(std::move(f), std::move(l));
  }

 private:
  RowMatrix features_;
  std::optional<std::vector<int>> labels_;
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Read a rectangular numeric CSV with one header row.
///
/// Every column except `label_column` becomes a feature, in header order.
/// Errors name the offending (1-based) file line and column header.
inline DataCloud load_csv(const std::filesystem::path& path,
                          const std::optional<std::string>& label_column = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = detail::split_csv_line(line);
  for (auto& h : header) h = std::string(detail::trim(h));

  std::optional<std::size_t> label_idx;
  if (label_column) {
    auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) throw DataError(path.string() + ": no column named '" + *label_column + "'");
    label_idx = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t n_cols = header.size();
  const std::size_t n_features = n_cols - (label_idx ? 1 : 0);
  if (n_features == 0) throw DataError(path.string() + ": no feature columns");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  std::size_t n_rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != n_cols) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(n_cols));
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      auto v = detail::parse_double(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw DataError(path.string() + ": non-numeric value '" + cells[c] + "' at row " + std::to_string(line_no) +
                        ", column '" + header[c] + "'");
      }
      if (label_idx && c == *label_idx) {
        if (*v != 0.0 && *v != 1.0) {
          throw DataError(path.string() + ": label value '" + cells[c] + "' at row " + std::to_string(line_no) +
                          " is not 0 or 1");
        }
        labels.push_back(static_cast<int>(*v));
      } else {
        values.push_back(*v);
      }
    }
    ++n_rows;
  }
  if (n_rows == 0) throw DataError(path.string() + ": no data rows");

  RowMatrix features = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(n_rows),
                                             static_cast<Eigen::Index>(n_features));
  if (label_idx) return DataCloud(std::move(features), std::move(labels));
  return DataCloud(std::move(features));
}

/// Write `cloud` with header f0..f{d-1}[,label]. Values round-trip exactly through load_csv.
inline void save_csv(const DataCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const auto& f = cloud.features();
  for (Eigen::Index j = 0; j < f.cols(); ++j) out << (j ? "," : "") << 'f' << j;
  if (cloud.has_labels()) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) out << (j ? "," : "") << detail::format_double(f(i, j));
    if (cloud.has_labels()) out << ',' << cloud.labels()[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw DataError("I/O error writing " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic clouds
// ---------------------------------------------------------------------------

enum class ToyKind { Unimodal, Multimodal, Cross, Moons };

inline constexpr int kToyInliers = 300;
inline constexpr int kToyOutliers = 100;
inline constexpr double kToyBox = 6.0;
inline constexpr double kToyScale = 0.3;
inline constexpr double kToyNoise = 0.05;

inline std::string_view to_string(ToyKind kind) {
  switch (kind) {
    case ToyKind::Unimodal: return "unimodal";
    case ToyKind::Multimodal: return "multimodal";
    case ToyKind::Cross: return "cross";
    case ToyKind::Moons: return "moons";
  }
  return "?";
}

inline std::optional<ToyKind> parse_toy_kind(std::string_view name) {
  for (auto k : {ToyKind::Unimodal, ToyKind::Multimodal, ToyKind::Cross, ToyKind::Moons}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

/// 300 inliers of the requested shape followed by 100 outliers uniform on [-6, 6]^2.
///
/// Geometry of the inlier shapes:
///  - Unimodal: N(0, 0.3^2 I).
///  - Multimodal: 100 points each from N(c, 0.3^2 I), c in {(-2,-2), (2,-2), (0,2)}.
///  - Cross: a plus sign; 150 points uniform on each of the segments [-3,3]x{0} and {0}x[-3,3].
///  - Moons: 150 points on the upper unit semicircle at the origin and 150 on the
///    lower semicircle centred at (1, 0.5).
/// Cross and Moons inliers get isotropic N(0, 0.05^2) noise.
inline DataCloud generate_toy(ToyKind kind, std::uint64_t seed) {
  Rng rng(derive_seed(seed, tag("toy")));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

  constexpr int n = kToyInliers + kToyOutliers;
  RowMatrix x(n, 2);
  std::vector<int> labels(n, 0);

  for (int i = 0; i < kToyInliers; ++i) {
    double px = 0.0;
    double py = 0.0;
    switch (kind) {
      case ToyKind::Unimodal:
        px = kToyScale * normal(rng);
        py = kToyScale * normal(rng);
        break;
      case ToyKind::Multimodal: {
        static constexpr double centers[3][2] = {{-2.0, -2.0}, {2.0, -2.0}, {0.0, 2.0}};
        const auto& c = centers[i / 100];
        px = c[0] + kToyScale * normal(rng);
        py = c[1] + kToyScale * normal(rng);
        break;
      }
      case ToyKind::Cross: {
        const double t = uniform(-3.0, 3.0);
        if (i < kToyInliers / 2) {
          px = t;
        } else {
          py = t;
        }
        px += kToyNoise * normal(rng);
        py += kToyNoise * normal(rng);
        break;
      }
      case ToyKind::Moons: {
        const double t = uniform(0.0, std::numbers::pi);
        if (i < kToyInliers / 2) {
          px = std::cos(t);
          py = std::sin(t);
        } else {
          px = 1.0 - std::cos(t);
          py = 0.5 - std::sin(t);
        }
        px += kToyNoise * normal(rng);
        py += kToyNoise * normal(rng);
        break;
      }
    }
    x(i, 0) = px;
    x(i, 1) = py;
  }
  for (int i = kToyInliers; i < n; ++i) {
    x(i, 0) = uniform(-kToyBox, kToyBox);
    x(i, 1) = uniform(-kToyBox, kToyBox);
    labels[static_cast<std::size_t>(i)] = 1;
  }
  return DataCloud(std::move(x), std::move(labels));
}

// ---------------------------------------------------------------------------
// Stratified splitting
// ---------------------------------------------------------------------------

struct SplitPlan {
  std::vector<Eigen::Index> train_indices;
  std::vector<Eigen::Index> test_indices;
  std::uint64_t seed = 0;
};

namespace detail {

/// Per-class index lists (class 0 then class 1), each shuffled by `rng`.
inline std::array<std::vector<Eigen::Index>, 2> shuffled_classes(const DataCloud& cloud, Rng& rng) {
  if (!cloud.has_labels()) throw DataError("labels required");
  std::array<std::vector<Eigen::Index>, 2> classes;
  const auto& labels = cloud.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) classes[static_cast<std::size_t>(labels[i])].push_back(static_cast<Eigen::Index>(i));
  for (auto& c : classes) std::shuffle(c.begin(), c.end(), rng);
  return classes;
}

}  // namespace detail

/// Per class, floor(train_fraction * class size) members go to train and the rest to test.
inline SplitPlan stratified_split(const DataCloud& cloud, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  auto classes = detail::shuffled_classes(cloud, rng);
  SplitPlan plan;
  plan.seed = seed;
  for (const auto& members : classes) {
    if (members.empty()) continue;
    if (members.size() < 2) throw DataError("every class needs at least 2 members for a stratified split");
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(members.size())));
    plan.train_indices.insert(plan.train_indices.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    plan.test_indices.insert(plan.test_indices.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  return plan;
}

/// k stratified folds. Fold i validates on the i-th round-robin slice of each shuffled class.
inline std::vector<SplitPlan> stratified_kfold(const DataCloud& cloud, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  Rng rng(seed);
  auto classes = detail::shuffled_classes(cloud, rng);
  for (const auto& members : classes) {
    if (!members.empty() && members.size() < static_cast<std::size_t>(k)) {
      throw DataError("a class has fewer members (" + std::to_string(members.size()) + ") than folds (" +
                      std::to_string(k) + ")");
    }
  }
  std::vector<SplitPlan> folds(static_cast<std::size_t>(k));
  for (auto& f : folds) f.seed = seed;
  for (const auto& members : classes) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t owner = i % static_cast<std::size_t>(k);
      for (std::size_t f = 0; f < folds.size(); ++f) {
        (f == owner ? folds[f].test_indices : folds[f].train_indices).push_back(members[i]);
      }
    }
  }
  return folds;
}

}  // namespace krpd
