#pragma once

#include <cstdint>
#include <random>

#include <Eigen/QR>

#include "qtp/tensor_algebra.hpp"

namespace qtp::testing {

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = Complex(normal(rng), normal(rng));
  }
  return m;
}

// Haar-ish unitary from the QR factor of a Gaussian matrix.
inline ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  const ComplexMatrix g = random_matrix(n, n, seed);
  Eigen::MatrixXcd e(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) e(r, c) = g(r, c);
  }
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(e).householderQ();
  ComplexMatrix u(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) u(r, c) = q(r, c);
  }
  return u;
}

inline ComplexVector random_vector(std::size_t n, std::uint64_t seed) {
  return random_matrix(n, 1, seed).column(0);
}

}  // namespace qtp::testing
