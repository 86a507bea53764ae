#pragma once

#include "krpd/common.hpp"
#include "krpd/datasets.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <string_view>

namespace krpd {

enum class KernelFamily {
  Rbf,     ///< exp(-gamma * |x - y|^2)
  Linear,  ///< x . y  (test oracle only: KPCA with it is ordinary PCA)
};

struct KernelSpec {
  KernelFamily family = KernelFamily::Rbf;
  double gamma = 1.0;

  static KernelSpec rbf(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("RBF gamma must be positive");
    return {KernelFamily::Rbf, gamma};
  }
  static KernelSpec linear() { return {KernelFamily::Linear, 0.0}; }

  template <typename A, typename B>
  double operator()(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) const {
    if (family == KernelFamily::Linear) return x.dot(y);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double diff = x(i) - y(i);
      sq += diff * diff;
    }
    return std::exp(-gamma * sq);
  }
};

inline std::string_view to_string(KernelFamily f) { return f == KernelFamily::Rbf ? "rbf" : "linear"; }

inline std::optional<KernelFamily> parse_kernel_family(std::string_view name) {
  if (name == "rbf") return KernelFamily::Rbf;
  if (name == "linear") return KernelFamily::Linear;
  return std::nullopt;
}

inline double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DataError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  using CMap = Eigen::Map<const Vector>;
  const auto n = static_cast<Eigen::Index>(x.size());
  return spec(CMap(x.data(), n), CMap(y.data(), n));
}

/// Gram matrix of a training cloud plus the statistics needed to centre it and
/// any out-of-sample kernel row in feature space.
class GramModel {
 public:
  GramModel(KernelSpec spec, RowMatrix train, Matrix gram, Vector row_means, double grand_mean)
      : spec_(spec),
        train_(std::move(train)),
        gram_(std::move(gram)),
        row_means_(std::move(row_means)),
        grand_mean_(grand_mean) {}

  const KernelSpec& spec() const noexcept { return spec_; }
  const RowMatrix& train_features() const noexcept { return train_; }
  const Matrix& gram() const noexcept { return gram_; }
  const Vector& row_means() const noexcept { return row_means_; }
  double grand_mean() const noexcept { return grand_mean_; }
  Eigen::Index n_train() const noexcept { return train_.rows(); }
  Eigen::Index n_dims() const noexcept { return train_.cols(); }

  /// K' = K - 1_N K - K 1_N + 1_N K 1_N.
  Matrix centered_gram() const {
    const Eigen::Index n = n_train();
    Matrix kc(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) kc(i, j) = gram_(i, j) - row_means_(i) - row_means_(j) + grand_mean_;
    }
    return kc;
  }

  /// Raw kernel rows K_q[m][n] = k(q_m, x_n).
  Matrix cross_gram(const RowMatrix& queries) const {
    require_dims(n_dims(), queries.cols(), "cross_gram");
    Matrix kq(queries.rows(), n_train());
    for (Eigen::Index m = 0; m < queries.rows(); ++m) {
      for (Eigen::Index n = 0; n < n_train(); ++n) kq(m, n) = spec_(queries.row(m), train_.row(n));
    }
    return kq;
  }

  /// Centre raw kernel rows with the training statistics.
  Matrix center_cross(const Matrix& kq) const {
    Matrix out(kq.rows(), kq.cols());
    for (Eigen::Index m = 0; m < kq.rows(); ++m) {
      const double qmean = kq.row(m).mean();
      for (Eigen::Index n = 0; n < kq.cols(); ++n) out(m, n) = kq(m, n) - row_means_(n) - qmean + grand_mean_;
    }
    return out;
  }

  /// K'_q = K_q - 1' K - K_q 1_N + 1' K 1_N, centred on the training cloud only.
  Matrix cross_gram_centered(const RowMatrix& queries) const { return center_cross(cross_gram(queries)); }

  /// Centred self-kernel k(q,q) - (2/N) sum_n k(q, x_n) + mean(K), one value per query.
  Vector centered_self_kernel(const RowMatrix& queries, const Matrix& kq) const {
    Vector out(queries.rows());
    for (Eigen::Index m = 0; m < queries.rows(); ++m) {
      out(m) = spec_(queries.row(m), queries.row(m)) - 2.0 * kq.row(m).mean() + grand_mean_;
    }
    return out;
  }

 private:
  KernelSpec spec_;
  RowMatrix train_;
  Matrix gram_;
  Vector row_means_;
  double grand_mean_;
};

/// Evaluate the full Gram matrix; only the upper triangle is computed so K is exactly symmetric.
inline GramModel fit_gram(const KernelSpec& spec, const RowMatrix& train) {
  if (train.rows() < 1) throw DataError("fit_gram: empty cloud");
  const Eigen::Index n = train.rows();
  Matrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = spec(train.row(i), train.row(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  Vector row_means = k.rowwise().mean();
  const double grand_mean = row_means.mean();
  return GramModel(spec, train, std::move(k), std::move(row_means), grand_mean);
}

inline GramModel fit_gram(const KernelSpec& spec, const DataCloud& cloud) { return fit_gram(spec, cloud.features()); }

}  // namespace krpd
