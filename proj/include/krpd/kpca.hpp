#pragma once

#include "krpd/common.hpp"
#include "krpd/jacobi.hpp"
#include "krpd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace krpd {

enum class EigenSolver {
  Tridiagonal,  ///< Householder reduction + implicit QR (Eigen::SelfAdjointEigenSolver)
  Jacobi,       ///< cyclic Jacobi, see jacobi_eigen()
};

/// Descending eigen-decomposition of a symmetric matrix with the chosen solver.
inline SymmetricEigen symmetric_eigen(const Matrix& a, EigenSolver solver) {
  if (solver == EigenSolver::Jacobi) return jacobi_eigen(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  SymmetricEigen out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

/// Eigenvalues of K' at or below this are treated as numerically zero.
inline double rank_threshold(double lambda_max, Eigen::Index n) {
  return std::max(1e-10, 1e-12 * lambda_max) * static_cast<double>(n);
}

/// Kernel PCA of a fitted Gram matrix.
///
/// Column j of coefficients() is alpha_j = v_j / sqrt(lambda_j), where (lambda_j, v_j)
/// is the j-th eigenpair of the centred Gram matrix. That puts the feature-space
/// direction sum_i alpha_ij phi~(x_i) on the unit sphere (lambda_j |alpha_j|^2 = 1),
/// and the j-th principal coordinate of a point q is K'_q alpha_j.
class KpcaModel {
 public:
  KpcaModel(GramModel gram, Vector eigenvalues, Matrix coefficients, Eigen::Index requested)
      : gram_(std::move(gram)),
        eigenvalues_(std::move(eigenvalues)),
        coefficients_(std::move(coefficients)),
        requested_(requested) {
    train_embedding_ = gram_.center_cross(gram_.gram()) * coefficients_;
  }

  const GramModel& gram_model() const noexcept { return gram_; }
  const KernelSpec& spec() const noexcept { return gram_.spec(); }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& coefficients() const noexcept { return coefficients_; }
  const Matrix& train_embedding() const noexcept { return train_embedding_; }
  Eigen::Index n_components() const noexcept { return coefficients_.cols(); }
  Eigen::Index requested_components() const noexcept { return requested_; }
  bool capped() const noexcept { return n_components() < requested_; }
  Eigen::Index n_dims() const noexcept { return gram_.n_dims(); }

  /// Principal coordinates (Q x M) of arbitrary queries.
  Matrix transform(const RowMatrix& queries) const {
    require_dims(n_dims(), queries.cols(), "kpca transform");
    return gram_.cross_gram_centered(queries) * coefficients_;
  }

  /// Squared feature-space distance from each query to its projection on the top-M subspace.
  Vector reconstruction_error(const RowMatrix& queries) const {
    require_dims(n_dims(), queries.cols(), "kpca reconstruction error");
    const Matrix kq = gram_.cross_gram(queries);
    const Matrix beta = gram_.center_cross(kq) * coefficients_;
    Vector score = gram_.centered_self_kernel(queries, kq) - beta.rowwise().squaredNorm();
    return score.cwiseMax(0.0);
  }

 private:
  GramModel gram_;
  Vector eigenvalues_;
  Matrix coefficients_;
  Matrix train_embedding_;
  Eigen::Index requested_;
};

/// Fit kernel PCA keeping the top `n_components` usable eigenpairs.
///
/// Requests above the usable rank are capped (check KpcaModel::capped()); a
/// model with no usable component throws NumericalError. Each coefficient
/// column is sign-fixed so that its largest-magnitude entry is positive.
inline KpcaModel fit_kpca(GramModel gram, Eigen::Index n_components, EigenSolver solver = EigenSolver::Tridiagonal) {
  const Eigen::Index n = gram.n_train();
  if (n_components < 1 || n_components > n - 1) {
    throw std::invalid_argument("fit_kpca: n_components must lie in [1, N-1] = [1, " + std::to_string(n - 1) +
                                "], got " + std::to_string(n_components));
  }
  const SymmetricEigen eig = symmetric_eigen(gram.centered_gram(), solver);
  const double eps = rank_threshold(std::max(eig.values(0), 0.0), n);
  Eigen::Index usable = 0;
  while (usable < n && eig.values(usable) > eps) ++usable;
  const Eigen::Index m = std::min(n_components, usable);
  if (m == 0) throw NumericalError("fit_kpca: centred Gram matrix has no usable eigenvalue (degenerate cloud)");

  Matrix coef(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Vector v = eig.vectors.col(j);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    coef.col(j) = v / std::sqrt(eig.values(j));
  }
  return KpcaModel(std::move(gram), eig.values.head(m), std::move(coef), n_components);
}

/// Outlier score of the KPCA baseline detector: feature-space reconstruction error.
inline Vector reconstruction_error_score(const KpcaModel& model, const RowMatrix& queries) {
  return model.reconstruction_error(queries);
}

}  // namespace krpd
