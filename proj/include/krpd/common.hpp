#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace krpd {

/// Dense matrix with one sample per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Malformed or inconsistent input data (bad CSV, dimension mismatch, missing labels).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that cannot produce a usable result (zero rank, degenerate projections).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dims(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw DataError(std::string(what) + ": dimension mismatch, expected d=" + std::to_string(expected) +
                    ", got d=" + std::to_string(got));
  }
}

}  // namespace krpd
