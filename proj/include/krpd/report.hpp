#pragma once

#include "krpd/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace krpd {

/// Hyperparameters summarised over trials: per-field median of the per-trial winners.
inline HyperParams median_params(const EvalReport& r) {
  HyperParams p;
  if (r.trials.empty()) return p;
  std::vector<double> g, s, l;
  for (const auto& t : r.trials) {
    g.push_back(std::log(t.params.gamma));
    s.push_back(static_cast<double>(t.params.size));
    l.push_back(static_cast<double>(t.params.directions));
  }
  p.gamma = std::exp(median(g));
  p.size = static_cast<Eigen::Index>(std::llround(median(s)));
  p.directions = static_cast<Eigen::Index>(std::llround(median(l)));
  return p;
}

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

/// Machine-readable table: dataset,detector,auc_mean,auc_std,gamma,M,L,seconds.
///
/// gamma/M/L are the median winning values over trials and are left empty where
/// the detector has no such parameter. M holds D for krpd-rff and k for knn.
/// Failed cells have empty AUC fields. With `timing` off the seconds column is 0.
inline void write_benchmark_table(std::ostream& out, const std::vector<EvalReport>& reports, bool timing = true) {
  out << "dataset,detector,auc_mean,auc_std,gamma,M,L,seconds\n";
  for (const auto& r : reports) {
    out << r.dataset << ',' << to_string(r.detector) << ',';
    if (r.ok()) {
      const HyperParams p = median_params(r);
      out << detail::format_double(r.auc_mean) << ',' << detail::format_double(r.auc_std) << ',';
      out << (uses_gamma(r.detector) ? detail::format_double(p.gamma) : "") << ',';
      out << (uses_size(r.detector) ? std::to_string(p.size) : "") << ',';
      out << (uses_directions(r.detector) ? std::to_string(p.directions) : "") << ',';
    } else {
      out << ",,,,,";
    }
    out << (timing ? fmt("%.3f", r.seconds) : std::string("0")) << '\n';
  }
}

inline std::string mean_pm_std(const EvalReport& r) {
  if (!r.ok()) return "failed";
  return fmt("%.3f", r.auc_mean) + " +- " + fmt("%.3f", r.auc_std);
}

namespace detail {

inline void write_pivot(std::ostream& out, const std::vector<std::string>& datasets,
                        const std::vector<std::pair<DetectorKind, std::string>>& columns,
                        const std::map<std::pair<std::string, DetectorKind>, const EvalReport*>& cell) {
  std::size_t w0 = 7;
  for (const auto& d : datasets) w0 = std::max(w0, d.size());
  constexpr std::size_t w = 16;
  auto pad = [](std::string s, std::size_t n) {
    s.resize(std::max(s.size(), n), ' ');
    return s;
  };
  out << pad("dataset", w0);
  for (const auto& c : columns) out << " | " << pad(c.second, w);
  out << '\n';
  std::vector<std::vector<double>> col_means(columns.size());
  for (const auto& d : datasets) {
    out << pad(d, w0);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      auto it = cell.find({d, columns[c].first});
      std::string text = "-";
      if (it != cell.end()) {
        text = mean_pm_std(*it->second);
        if (it->second->ok()) col_means[c].push_back(it->second->auc_mean);
      }
      out << " | " << pad(text, w);
    }
    out << '\n';
  }
  out << pad("Average", w0);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& v = col_means[c];
    out << " | " << pad(v.empty() ? "-" : fmt("%.3f", mean_of(v)) + " +- " + fmt("%.3f", sample_std(v)), w);
  }
  out << '\n';
}

}  // namespace detail

/// Human-readable report: one record per cell, the ROC AUC table (mean +- std over
/// trials), and the with/without-KPCA ablation table when both KRPD variants ran.
inline void write_benchmark_text(std::ostream& out, const std::vector<EvalReport>& reports, int trials, bool timing = true) {
  std::vector<std::string> datasets;
  std::vector<DetectorKind> detectors;
  std::map<std::pair<std::string, DetectorKind>, const EvalReport*> cell;
  for (const auto& r : reports) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
    if (std::find(detectors.begin(), detectors.end(), r.detector) == detectors.end()) detectors.push_back(r.detector);
    cell[{r.dataset, r.detector}] = &r;
  }

  out << "# records\n";
  for (const auto& r : reports) {
    out << "dataset=" << r.dataset << " detector=" << to_string(r.detector);
    if (r.ok()) {
      const HyperParams p = median_params(r);
      out << " auc_mean=" << fmt("%.4f", r.auc_mean) << " auc_std=" << fmt("%.4f", r.auc_std)
          << " trials=" << r.n_trials_aggregated;
      if (uses_gamma(r.detector)) out << " gamma=" << fmt("%.4g", p.gamma);
      if (uses_size(r.detector)) out << (r.detector == DetectorKind::Knn ? " k=" : r.detector == DetectorKind::KrpdRff ? " D=" : " M=") << p.size;
      if (uses_directions(r.detector)) out << " L=" << p.directions;
    } else {
      out << " error=\"" << r.error << '"';
    }
    if (timing) out << " seconds=" << fmt("%.2f", r.seconds);
    out << '\n';
  }

  out << "\n# ROC AUC (average of " << trials << " independent trials)\n";
  std::vector<std::pair<DetectorKind, std::string>> columns;
  for (auto k : detectors) columns.emplace_back(k, std::string(to_string(k)));
  detail::write_pivot(out, datasets, columns, cell);

  const bool ablation = std::find(detectors.begin(), detectors.end(), DetectorKind::KrpdRff) != detectors.end() &&
                        std::find(detectors.begin(), detectors.end(), DetectorKind::Krpd) != detectors.end();
  if (ablation) {
    out << "\n# KRPD w/o and w/ KPCA (average of " << trials << " independent trials)\n";
    detail::write_pivot(out, datasets, {{DetectorKind::KrpdRff, "w/o KPCA (RFF)"}, {DetectorKind::Krpd, "w/ KPCA"}}, cell);
  }
}

}  // namespace krpd
