#pragma once

#include "krpd/common.hpp"
#include "krpd/depth.hpp"
#include "krpd/knn.hpp"
#include "krpd/kpca.hpp"

#include <optional>
#include <string_view>
#include <variant>

namespace krpd {

enum class DetectorKind { Rpd, Krpd, KrpdRff, Kpca, Knn };

inline constexpr DetectorKind kAllDetectors[] = {DetectorKind::Rpd, DetectorKind::Krpd, DetectorKind::KrpdRff,
                                                 DetectorKind::Kpca, DetectorKind::Knn};

inline std::string_view to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::Rpd: return "rpd";
    case DetectorKind::Krpd: return "krpd";
    case DetectorKind::KrpdRff: return "krpd-rff";
    case DetectorKind::Kpca: return "kpca";
    case DetectorKind::Knn: return "knn";
  }
  return "?";
}

inline std::optional<DetectorKind> parse_detector_kind(std::string_view name) {
  for (auto k : kAllDetectors) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

inline bool uses_gamma(DetectorKind k) {
  return k == DetectorKind::Krpd || k == DetectorKind::KrpdRff || k == DetectorKind::Kpca;
}
inline bool uses_directions(DetectorKind k) {
  return k == DetectorKind::Rpd || k == DetectorKind::Krpd || k == DetectorKind::KrpdRff;
}
inline bool uses_size(DetectorKind k) { return k != DetectorKind::Rpd; }

/// Hyperparameters shared by all detectors. `size` is the KPCA component count M
/// for KRPD/KPCA, the feature count D for KRPD-RFF and k for kNN.
struct HyperParams {
  double gamma = 0.25;
  Eigen::Index size = 100;
  Eigen::Index directions = 1000;

  bool operator==(const HyperParams&) const = default;
};

/// Any fitted detector. score() is an outlier score: higher means more outlying.
class Detector {
 public:
  using Model = std::variant<DepthScorer, KpcaModel, KnnModel>;

  Detector(DetectorKind kind, HyperParams params, Model model)
      : kind_(kind), params_(params), model_(std::move(model)) {}

  DetectorKind kind() const noexcept { return kind_; }
  const HyperParams& params() const noexcept { return params_; }
  const Model& model() const noexcept { return model_; }

  Vector score(const RowMatrix& queries) const {
    return std::visit(
        [&](const auto& m) -> Vector {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, DepthScorer>) return outlier_score(m, queries);
          else if constexpr (std::is_same_v<T, KpcaModel>) return reconstruction_error_score(m, queries);
          else return knn_score(m, queries);
        },
        model_);
  }

 private:
  DetectorKind kind_;
  HyperParams params_;
  Model model_;
};

/// Fit `kind` on `train`. Component counts above N-1 are lowered to N-1 before the
/// KPCA fit (which may cap further at the usable rank); k is lowered to N.
inline Detector fit_detector(DetectorKind kind, const HyperParams& params, const RowMatrix& train, std::uint64_t seed,
                             EigenSolver solver = EigenSolver::Tridiagonal) {
  const Eigen::Index n = train.rows();
  switch (kind) {
    case DetectorKind::Rpd:
      return {kind, params, fit_rpd(train, params.directions, seed)};
    case DetectorKind::Krpd:
      return {kind, params,
              fit_krpd(train, KernelSpec::rbf(params.gamma), std::min(params.size, n - 1), params.directions, seed,
                       solver)};
    case DetectorKind::KrpdRff:
      return {kind, params, fit_krpd_rff(train, params.gamma, params.size, params.directions, seed)};
    case DetectorKind::Kpca:
      return {kind, params, fit_kpca(fit_gram(KernelSpec::rbf(params.gamma), train), std::min(params.size, n - 1), solver)};
    case DetectorKind::Knn:
      return {kind, params, fit_knn(train, std::min(params.size, n))};
  }
  throw std::invalid_argument("unknown detector kind");
}

}  // namespace krpd
