#pragma once

#include "krpd/common.hpp"
#include "krpd/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace krpd {

/// k-th nearest neighbour distance detector. Brute force; stores the training cloud.
class KnnModel {
 public:
  KnnModel(RowMatrix train, Eigen::Index k) : train_(std::move(train)), k_(k) {
    if (k_ < 1 || k_ > train_.rows()) {
      throw std::invalid_argument("knn: k must lie in [1, N] = [1, " + std::to_string(train_.rows()) + "], got " +
                                  std::to_string(k_));
    }
  }

  const RowMatrix& train() const noexcept { return train_; }
  Eigen::Index k() const noexcept { return k_; }

  /// Euclidean distance to the k-th nearest training point. A query that equals
  /// a training point counts that point as its first neighbour.
  Vector score(const RowMatrix& queries) const {
    require_dims(train_.cols(), queries.cols(), "knn_score");
    Vector out(queries.rows());
    std::vector<double> sq(static_cast<std::size_t>(train_.rows()));
    const auto kth = sq.begin() + (k_ - 1);
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
      for (Eigen::Index n = 0; n < train_.rows(); ++n) sq[static_cast<std::size_t>(n)] = (train_.row(n) - queries.row(q)).squaredNorm();
      std::nth_element(sq.begin(), kth, sq.end());
      out(q) = std::sqrt(*kth);
    }
    return out;
  }

 private:
  RowMatrix train_;
  Eigen::Index k_;
};

inline KnnModel fit_knn(const DataCloud& cloud, Eigen::Index k) { return KnnModel(cloud.features(), k); }
inline KnnModel fit_knn(const RowMatrix& train, Eigen::Index k) { return KnnModel(train, k); }

inline Vector knn_score(const KnnModel& model, const RowMatrix& queries) { return model.score(queries); }

}  // namespace krpd
