#pragma once

#include "krpd/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace krpd {

struct SymmetricEigen {
  Vector values;   ///< descending
  Matrix vectors;  ///< column j pairs with values(j), unit norm
  int sweeps = 0;
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;  ///< stop when off(A)_F <= tol * |A|_F
  int max_sweeps = 100;
};

/// Cyclic Jacobi diagonalisation of a dense symmetric matrix.
///
/// Works on a row-major copy so that every rotation touches two contiguous rows
/// of the matrix and two contiguous rows of the transposed eigenvector matrix;
/// the mirrored column entries are written back to keep the copy symmetric.
/// Throws NumericalError if the off-diagonal mass has not dropped below the
/// tolerance after `max_sweeps` sweeps.
inline SymmetricEigen jacobi_eigen(const Matrix& input, const JacobiOptions& opt = {}) {
  if (input.rows() != input.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  const Eigen::Index n = input.rows();
  RowMatrix a = 0.5 * (input + input.transpose());
  RowMatrix vt = RowMatrix::Identity(n, n);

  const double norm = a.norm();
  const double target = opt.relative_tolerance * norm;
  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    }
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  double off = off_norm();
  while (off > target && norm > 0.0) {
    if (sweep == opt.max_sweeps) {
      throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(opt.max_sweeps) + " sweeps");
    }
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip rotations that cannot change the diagonal at working precision.
        if (sweep > 3 && std::abs(apq) * 1e18 < std::abs(app) && std::abs(apq) * 1e18 < std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;

        double* rp = a.row(p).data();
        double* rq = a.row(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = rp[k];
          const double akq = rq[k];
          const double np = akp - s * (akq + tau * akp);
          const double nq = akq + s * (akp - tau * akq);
          rp[k] = np;
          rq[k] = nq;
          a(k, p) = np;
          a(k, q) = nq;
        }
        double* vp = vt.row(p).data();
        double* vq = vt.row(q).data();
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = x - s * (y + tau * x);
          vq[k] = y + s * (x - tau * y);
        }
      }
    }
    off = off_norm();
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    out.vectors.col(j) = vt.row(src).transpose();
  }
  return out;
}

}  // namespace krpd
