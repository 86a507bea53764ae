#pragma once

#include "krpd/common.hpp"
#include "krpd/datasets.hpp"
#include "krpd/kernels.hpp"
#include "krpd/kpca.hpp"
#include "krpd/rff.hpp"
#include "krpd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace krpd {

// ---------------------------------------------------------------------------
// Robust location and scale
// ---------------------------------------------------------------------------

/// Sample median; the mean of the two middle order statistics for even sizes.
/// Takes its argument by value and partially reorders the copy.
inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

inline double median(std::span<const double> values) { return median(std::vector<double>(values.begin(), values.end())); }

/// Median absolute deviation about the median, without a consistency constant.
inline double mad(std::span<const double> values, double center) {
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(), [center](double v) { return std::abs(v - center); });
  return median(std::move(dev));
}

inline double mad(std::span<const double> values) { return mad(values, median(values)); }

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

struct DirectionSet {
  RowMatrix directions;  ///< L x m, unit rows
  std::uint64_t seed = 0;

  Eigen::Index count() const noexcept { return directions.rows(); }
  Eigen::Index dim() const noexcept { return directions.cols(); }
};

/// L directions uniform on the unit sphere S^{m-1} (normalised Gaussian vectors).
inline DirectionSet sample_directions(Eigen::Index dim, Eigen::Index count, std::uint64_t seed) {
  if (dim < 1 || count < 1) throw std::invalid_argument("sample_directions: dim and count must be >= 1");
  Rng rng(derive_seed(seed, tag("directions")));
  std::normal_distribution<double> normal;
  DirectionSet set;
  set.seed = seed;
  set.directions.resize(count, dim);
  for (Eigen::Index l = 0; l < count; ++l) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < dim; ++j) set.directions(l, j) = normal(rng);
      norm = set.directions.row(l).norm();
    } while (norm == 0.0);
    set.directions.row(l) /= norm;
  }
  return set;
}

// ---------------------------------------------------------------------------
// Scorer
// ---------------------------------------------------------------------------

/// Fitted random projection depth.
///
/// Holds the direction set and, per direction, the median and MAD of the
/// projected training cloud. Queries are first mapped by the optional
/// embedding (KPCA coordinates or random Fourier features); without one the
/// scorer works in input space.
class DepthScorer {
 public:
  using Embedding = std::variant<std::monostate, KpcaModel, RffMap>;

  DepthScorer(DirectionSet directions, Vector medians, Vector mads, std::vector<bool> active, Embedding embedding,
              Eigen::Index input_dim)
      : directions_(std::move(directions)),
        medians_(std::move(medians)),
        mads_(std::move(mads)),
        active_(std::move(active)),
        embedding_(std::move(embedding)),
        input_dim_(input_dim) {}

  const DirectionSet& directions() const noexcept { return directions_; }
  const Vector& medians() const noexcept { return medians_; }
  const Vector& mads() const noexcept { return mads_; }
  const std::vector<bool>& active() const noexcept { return active_; }
  const Embedding& embedding() const noexcept { return embedding_; }
  Eigen::Index input_dim() const noexcept { return input_dim_; }
  Eigen::Index space_dim() const noexcept { return directions_.dim(); }
  Eigen::Index n_active() const noexcept { return std::count(active_.begin(), active_.end(), true); }

  const KpcaModel* kpca() const noexcept { return std::get_if<KpcaModel>(&embedding_); }
  const RffMap* rff() const noexcept { return std::get_if<RffMap>(&embedding_); }

  /// Map input-space queries into the space the directions live in.
  RowMatrix embed(const RowMatrix& queries) const {
    require_dims(input_dim_, queries.cols(), "depth scorer");
    if (const auto* k = kpca()) return k->transform(queries);
    if (const auto* r = rff()) return rff_transform(*r, queries);
    return queries;
  }

  /// max over active directions of |u.z - MED| / MAD, for already-embedded points.
  Vector outlyingness_embedded(const RowMatrix& points) const {
    const Matrix proj = points * directions_.directions.transpose();
    Vector out = Vector::Zero(points.rows());
    for (Eigen::Index l = 0; l < proj.cols(); ++l) {
      if (!active_[static_cast<std::size_t>(l)]) continue;
      const double med = medians_(l);
      const double inv = 1.0 / mads_(l);
      for (Eigen::Index q = 0; q < proj.rows(); ++q) out(q) = std::max(out(q), std::abs(proj(q, l) - med) * inv);
    }
    return out;
  }

  Vector outlyingness(const RowMatrix& queries) const { return outlyingness_embedded(embed(queries)); }

 private:
  DirectionSet directions_;
  Vector medians_;
  Vector mads_;
  std::vector<bool> active_;
  Embedding embedding_;
  Eigen::Index input_dim_;
};

/// Directions with MAD below this are excluded from the max.
inline double mad_threshold(double median_abs_projection) { return 1e-12 * std::max(1.0, median_abs_projection); }

namespace detail {

inline DepthScorer fit_projection_depth(const RowMatrix& points, Eigen::Index n_directions, std::uint64_t seed,
                                        DepthScorer::Embedding embedding, Eigen::Index input_dim) {
  if (points.rows() < 2) throw DataError("projection depth needs at least 2 training samples");
  DirectionSet dirs = sample_directions(points.cols(), n_directions, seed);
  const Matrix proj = points * dirs.directions.transpose();
  Vector medians(n_directions);
  Vector mads(n_directions);
  std::vector<bool> active(static_cast<std::size_t>(n_directions));
  std::vector<double> column(static_cast<std::size_t>(points.rows()));
  std::vector<double> magnitude(column.size());
  for (Eigen::Index l = 0; l < n_directions; ++l) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      column[static_cast<std::size_t>(i)] = proj(i, l);
      magnitude[static_cast<std::size_t>(i)] = std::abs(proj(i, l));
    }
    const double med = median(std::span<const double>(column));
    const double spread = mad(column, med);
    medians(l) = med;
    mads(l) = spread;
    active[static_cast<std::size_t>(l)] = spread >= mad_threshold(median(magnitude));
  }
  if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) {
    throw NumericalError("degenerate projections: every direction has zero MAD");
  }
  return DepthScorer(std::move(dirs), std::move(medians), std::move(mads), std::move(active), std::move(embedding),
                     input_dim);
}

}  // namespace detail

/// Random projection depth in input space.
inline DepthScorer fit_rpd(const RowMatrix& train, Eigen::Index n_directions, std::uint64_t seed) {
  return detail::fit_projection_depth(train, n_directions, seed, std::monostate{}, train.cols());
}

inline DepthScorer fit_rpd(const DataCloud& cloud, Eigen::Index n_directions, std::uint64_t seed) {
  return fit_rpd(cloud.features(), n_directions, seed);
}

/// Kernel random projection depth: projection depth of the KPCA coordinates.
/// Directions are drawn in the effective (rank-capped) component count.
inline DepthScorer fit_krpd(const RowMatrix& train, const KernelSpec& spec, Eigen::Index n_components,
                            Eigen::Index n_directions, std::uint64_t seed,
                            EigenSolver solver = EigenSolver::Tridiagonal) {
  if (train.rows() < 2) throw DataError("KRPD needs at least 2 training samples");
  KpcaModel model = fit_kpca(fit_gram(spec, train), n_components, solver);
  const RowMatrix embedded = model.train_embedding();
  const Eigen::Index d = train.cols();
  return detail::fit_projection_depth(embedded, n_directions, seed, std::move(model), d);
}

inline DepthScorer fit_krpd(const DataCloud& cloud, const KernelSpec& spec, Eigen::Index n_components,
                            Eigen::Index n_directions, std::uint64_t seed,
                            EigenSolver solver = EigenSolver::Tridiagonal) {
  return fit_krpd(cloud.features(), spec, n_components, n_directions, seed, solver);
}

/// KRPD without KPCA: projection depth of random Fourier features (no centring, no PCA).
inline DepthScorer fit_krpd_rff(const RowMatrix& train, double gamma, Eigen::Index n_features,
                                Eigen::Index n_directions, std::uint64_t seed) {
  RffMap map = fit_rff(gamma, train.cols(), n_features, derive_seed(seed, tag("rff-map")));
  const RowMatrix embedded = rff_transform(map, train);
  const Eigen::Index d = train.cols();
  return detail::fit_projection_depth(embedded, n_directions, seed, std::move(map), d);
}

inline DepthScorer fit_krpd_rff(const DataCloud& cloud, double gamma, Eigen::Index n_features,
                                Eigen::Index n_directions, std::uint64_t seed) {
  return fit_krpd_rff(cloud.features(), gamma, n_features, n_directions, seed);
}

inline Vector outlyingness(const DepthScorer& scorer, const RowMatrix& queries) { return scorer.outlyingness(queries); }

/// D = 1 / (1 + O), in (0, 1].
inline Vector depth(const DepthScorer& scorer, const RowMatrix& queries) {
  return outlyingness(scorer, queries).unaryExpr([](double o) { return 1.0 / (1.0 + o); });
}

/// Negative depth: higher means more outlying, values in [-1, 0).
inline Vector outlier_score(const DepthScorer& scorer, const RowMatrix& queries) { return -depth(scorer, queries); }

}  // namespace krpd
