#pragma once

#include "krpd/common.hpp"
#include "krpd/datasets.hpp"
#include "krpd/detector.hpp"
#include "krpd/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace krpd {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// ROC AUC via the Mann-Whitney statistic with mid-ranks for ties.
/// Label 1 marks the positive (outlier) class; higher scores should mean "more outlying".
inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("roc_auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    // ranks i+1 .. j+1 share their mean
    const double mid_rank = 0.5 * static_cast<double>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid_rank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw DataError("roc_auc: both classes must be present");
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

inline double roc_auc(const Vector& scores, const std::vector<int>& labels) {
  return roc_auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), labels);
}

/// The 100(1 - contamination) percentile of `scores`, interpolating linearly
/// between order statistics. Points scoring strictly above it are outliers.
inline double percentile_threshold(std::span<const double> scores, double contamination) {
  if (scores.empty()) throw std::invalid_argument("percentile_threshold: empty scores");
  if (!(contamination > 0.0 && contamination < 1.0)) {
    throw std::invalid_argument("percentile_threshold: contamination must lie in (0, 1)");
  }
  std::vector<double> s(scores.begin(), scores.end());
  std::sort(s.begin(), s.end());
  const double pos = (1.0 - contamination) * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

inline double percentile_threshold(const Vector& scores, double contamination) {
  return percentile_threshold(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                              contamination);
}

struct Confusion {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

inline Confusion confusion_at(const Vector& scores, const std::vector<int>& labels, double threshold) {
  Confusion c;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const bool flagged = scores(i) > threshold;
    const bool outlier = labels[static_cast<std::size_t>(i)] == 1;
    if (flagged && outlier) ++c.tp;
    else if (flagged) ++c.fp;
    else if (outlier) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
inline double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// Hyperparameter search
// ---------------------------------------------------------------------------

struct SearchSpace {
  double gamma_min = 1e-5;
  double gamma_max = 1.0;
  Eigen::Index size_min = 10;   ///< M (KRPD, KPCA) or D (KRPD-RFF)
  Eigen::Index size_max = 500;
  std::vector<Eigen::Index> knn_choices{1, 5, 10, 20};
  Eigen::Index directions = 1000;  ///< L, fixed
  int budget = 25;
  int folds = 5;
  std::uint64_t seed = 0;
  EigenSolver solver = EigenSolver::Tridiagonal;

  void validate() const {
    if (!(gamma_min > 0.0 && gamma_min <= gamma_max)) throw std::invalid_argument("search space: bad gamma range");
    if (size_min < 1 || size_min > size_max) throw std::invalid_argument("search space: bad size range");
    if (knn_choices.empty()) throw std::invalid_argument("search space: no k choices");
    if (budget < 1) throw std::invalid_argument("search space: budget must be >= 1");
    if (folds < 2) throw std::invalid_argument("search space: folds must be >= 2");
    if (directions < 1) throw std::invalid_argument("search space: directions must be >= 1");
  }
};

struct SearchTrial {
  HyperParams params;
  double cv_auc = -std::numeric_limits<double>::infinity();  ///< -inf when any fold failed
};

struct SearchResult {
  HyperParams best;
  double best_cv_auc = -std::numeric_limits<double>::infinity();
  std::vector<SearchTrial> trials;
};

/// Draw one configuration. gamma is log-uniform, sizes uniform on the integer range.
inline HyperParams sample_params(DetectorKind kind, const SearchSpace& space, Rng& rng) {
  HyperParams p;
  p.directions = space.directions;
  const double lg = std::log(space.gamma_min) + rng.uniform() * (std::log(space.gamma_max) - std::log(space.gamma_min));
  p.gamma = std::exp(lg);
  const auto span = static_cast<std::uint64_t>(space.size_max - space.size_min + 1);
  p.size = space.size_min + static_cast<Eigen::Index>(rng() % span);
  if (kind == DetectorKind::Knn) p.size = space.knn_choices[rng() % space.knn_choices.size()];
  return p;
}

/// Seed used for the detector's own randomness (directions, RFF map) in search trial `trial`.
inline std::uint64_t trial_fit_seed(std::uint64_t search_seed, int trial) {
  return derive_seed(search_seed, tag("fit") + static_cast<std::uint64_t>(trial));
}

/// Mean validation AUC of `params` over stratified folds of `train`; -inf if any fold fails.
inline double cross_validate(DetectorKind kind, const HyperParams& params, const DataCloud& train,
                             const std::vector<SplitPlan>& folds, std::uint64_t fit_seed, EigenSolver solver) {
  double total = 0.0;
  try {
    for (const auto& fold : folds) {
      const DataCloud fit_part = train.subset(fold.train_indices);
      const DataCloud val_part = train.subset(fold.test_indices);
      const Detector det = fit_detector(kind, params, fit_part.features(), fit_seed, solver);
      total += roc_auc(det.score(val_part.features()), val_part.labels());
    }
  } catch (const std::exception&) {
    return -std::numeric_limits<double>::infinity();
  }
  return total / static_cast<double>(folds.size());
}

/// Seeded random search maximising mean stratified-CV ROC AUC.
///
/// Every trial is evaluated on the same folds. Failed trials score -inf and are
/// kept in the trial log. RPD has no searched parameters, so only one trial is run.
/// Ties go to the earliest trial.
inline SearchResult random_search(const DataCloud& train, const SearchSpace& space, DetectorKind kind) {
  space.validate();
  const auto folds = stratified_kfold(train, space.folds, derive_seed(space.seed, tag("folds")));
  const int budget = kind == DetectorKind::Rpd ? 1 : space.budget;
  SearchResult result;
  for (int t = 0; t < budget; ++t) {
    Rng rng(derive_seed(space.seed, tag("trial") + static_cast<std::uint64_t>(t)));
    SearchTrial trial{sample_params(kind, space, rng)};
    trial.cv_auc = cross_validate(kind, trial.params, train, folds, trial_fit_seed(space.seed, t), space.solver);
    if (result.trials.empty() || trial.cv_auc > result.best_cv_auc) {
      result.best = trial.params;
      result.best_cv_auc = trial.cv_auc;
    }
    result.trials.push_back(trial);
  }
  if (!std::isfinite(result.best_cv_auc)) throw NumericalError("random_search: every trial failed");
  return result;
}

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

struct NamedCloud {
  std::string name;
  DataCloud cloud;
};

struct BenchmarkConfig {
  int trials = 5;
  std::uint64_t seed = 0;
  double train_fraction = 0.6;
  SearchSpace space;  ///< space.seed is ignored; each trial derives its own
};

struct TrialReport {
  double auc = 0.0;         ///< test ROC AUC
  double cv_auc = 0.0;      ///< winning mean validation AUC
  double threshold = 0.0;   ///< percentile threshold from training scores at the training contamination
  Confusion confusion;      ///< on the test split
  HyperParams params;
};

/// One dataset x detector cell of the benchmark table.
struct EvalReport {
  std::string dataset;
  DetectorKind detector = DetectorKind::Krpd;
  std::vector<TrialReport> trials;
  int n_trials_aggregated = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
  double seconds = 0.0;
  std::string error;  ///< non-empty when the cell failed

  bool ok() const noexcept { return error.empty(); }
};

/// Run one trial of the protocol: stratified split, CV search on train, refit, test AUC.
///
/// Both the split and the detector randomness change with `trial_seed`.
inline TrialReport run_trial(const DataCloud& cloud, DetectorKind kind, const BenchmarkConfig& cfg,
                             std::uint64_t trial_seed) {
  const SplitPlan split = stratified_split(cloud, cfg.train_fraction, derive_seed(trial_seed, tag("split")));
  const DataCloud train = cloud.subset(split.train_indices);
  const DataCloud test = cloud.subset(split.test_indices);

  SearchSpace space = cfg.space;
  space.seed = derive_seed(trial_seed, tag("search"));
  const SearchResult search = random_search(train, space, kind);

  const Detector det = fit_detector(kind, search.best, train.features(), derive_seed(trial_seed, tag("final")), space.solver);
  const Vector train_scores = det.score(train.features());
  const Vector test_scores = det.score(test.features());

  const auto& train_labels = train.labels();
  const double contamination =
      static_cast<double>(std::count(train_labels.begin(), train_labels.end(), 1)) / static_cast<double>(train_labels.size());

  TrialReport r;
  r.params = search.best;
  r.cv_auc = search.best_cv_auc;
  r.auc = roc_auc(test_scores, test.labels());
  r.threshold = percentile_threshold(train_scores, contamination);
  r.confusion = confusion_at(test_scores, test.labels(), r.threshold);
  return r;
}

inline EvalReport run_cell(const NamedCloud& data, DetectorKind kind, const BenchmarkConfig& cfg) {
  EvalReport rep;
  rep.dataset = data.name;
  rep.detector = kind;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::vector<double> aucs;
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(cfg.seed, tag("trial") + static_cast<std::uint64_t>(t));
      rep.trials.push_back(run_trial(data.cloud, kind, cfg, trial_seed));
      aucs.push_back(rep.trials.back().auc);
    }
    rep.n_trials_aggregated = static_cast<int>(aucs.size());
    rep.auc_mean = mean_of(aucs);
    rep.auc_std = sample_std(aucs);
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// Every (dataset, detector) cell, datasets outermost. Failed cells carry an error and the run continues.
inline std::vector<EvalReport> run_benchmark(const std::vector<NamedCloud>& datasets,
                                             const std::vector<DetectorKind>& detectors, const BenchmarkConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_benchmark: trials must be >= 1");
  for (const auto& d : datasets) {
    if (!d.cloud.has_labels()) throw DataError("run_benchmark: dataset '" + d.name + "' has no labels");
  }
  std::vector<EvalReport> out;
  for (const auto& d : datasets) {
    for (auto kind : detectors) out.push_back(run_cell(d, kind, cfg));
  }
  return out;
}

}  // namespace krpd
