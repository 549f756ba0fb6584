#include "qtp/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qtp/errors.hpp"

namespace qtp {
namespace {

void require_finite(std::span<const Complex> entries) {
  for (const Complex& z : entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ValidationError("non-finite entry in complex array");
    }
  }
}

std::string shape(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

// ComplexVector --------------------------------------------------------------

ComplexVector::ComplexVector(std::size_t dim) : entries_(dim) {}

ComplexVector::ComplexVector(std::vector<Complex> entries) : entries_(std::move(entries)) {
  require_finite(entries_);
}

ComplexVector::ComplexVector(std::initializer_list<Complex> entries) : entries_(entries) {
  require_finite(entries_);
}

ComplexVector ComplexVector::basis(std::size_t dim, std::size_t index) {
  if (index < 1 || index > dim) {
    throw IndexError("basis index " + std::to_string(index) + " outside 1.." +
                     std::to_string(dim));
  }
  ComplexVector v(dim);
  v[index - 1] = 1.0;
  return v;
}

double ComplexVector::norm() const {
  double sum = 0.0;
  for (const Complex& z : entries_) sum += std::norm(z);
  return std::sqrt(sum);
}

Complex inner(const ComplexVector& x, const ComplexVector& y) {
  if (x.dim() != y.dim()) {
    throw DimensionError("inner product of vectors with dims " + std::to_string(x.dim()) +
                         " and " + std::to_string(y.dim()));
  }
  Complex sum = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) sum += std::conj(x[i]) * y[i];
  return sum;
}

double max_abs_diff(const ComplexVector& x, const ComplexVector& y) {
  if (x.dim() != y.dim()) throw DimensionError("vector dims differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

ComplexVector operator*(Complex scale, const ComplexVector& v) {
  ComplexVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = scale * v[i];
  return out;
}

ComplexVector operator-(const ComplexVector& x, const ComplexVector& y) {
  if (x.dim() != y.dim()) throw DimensionError("vector dims differ");
  ComplexVector out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] - y[i];
  return out;
}

// ComplexMatrix --------------------------------------------------------------

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " given " + std::to_string(entries_.size()) + " entries");
  }
  require_finite(entries_);
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged matrix literal");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
  require_finite(entries_);
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const ComplexVector> columns) {
  if (columns.empty()) return {};
  const std::size_t n = columns.front().dim();
  ComplexMatrix m(n, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].dim() != n) throw DimensionError("columns of unequal dimension");
    for (std::size_t r = 0; r < n; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
  ComplexVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

double ComplexMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (const Complex& z : entries_) sum += std::norm(z);
  return std::sqrt(sum);
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (Complex& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("cannot multiply " + shape(a) + " by " + shape(b));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex lhs = a(r, k);
      if (lhs == Complex{}) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += lhs * b(k, c);
    }
  }
  return out;
}

ComplexVector operator*(const ComplexMatrix& m, const ComplexVector& v) {
  if (m.cols() != v.dim()) {
    throw DimensionError("cannot apply " + shape(m) + " to vector of dim " +
                         std::to_string(v.dim()));
  }
  ComplexVector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Complex sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) sum += m(r, c) * v[c];
    out[r] = sum;
  }
  return out;
}

ComplexMatrix operator*(Complex scale, ComplexMatrix m) {
  m *= scale;
  return m;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("cannot add " + shape(a) + " and " + shape(b));
  }
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) + b(r, c);
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a + Complex{-1.0} * b;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("cannot compare " + shape(a) + " and " + shape(b));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return worst;
}

// Products, adjoints, predicates ---------------------------------------------

ComplexVector tensor(const ComplexVector& u, const ComplexVector& v) {
  ComplexVector out(u.dim() * v.dim());
  for (std::size_t i = 0; i < u.dim(); ++i)
    for (std::size_t j = 0; j < v.dim(); ++j) out[i * v.dim() + j] = u[i] * v[j];
  return out;
}

ComplexMatrix tensor(const ComplexMatrix& u, const ComplexMatrix& v) {
  ComplexMatrix out(u.rows() * v.rows(), u.cols() * v.cols());
  for (std::size_t r1 = 0; r1 < u.rows(); ++r1)
    for (std::size_t c1 = 0; c1 < u.cols(); ++c1) {
      const Complex scale = u(r1, c1);
      if (scale == Complex{}) continue;
      for (std::size_t r2 = 0; r2 < v.rows(); ++r2)
        for (std::size_t c2 = 0; c2 < v.cols(); ++c2)
          out(r1 * v.rows() + r2, c1 * v.cols() + c2) = scale * v(r2, c2);
    }
  return out;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = std::conj(m(r, c));
  return out;
}

ComplexMatrix transpose(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

ComplexMatrix conjugate(const ComplexMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = std::conj(m(r, c));
  return out;
}

double unitarity_defect(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionError("unitarity test needs a square matrix, got " + shape(m));
  const std::size_t n = m.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += std::conj(m(r, i)) * m(r, j);
      if (i == j) dot -= 1.0;
      worst = std::max(worst, std::abs(dot));
    }
  }
  return worst;
}

bool is_unitary(const ComplexMatrix& m, double tol) { return unitarity_defect(m) <= tol; }

std::size_t index_mod(std::int64_t x, std::size_t n) {
  const auto modulus = static_cast<std::int64_t>(n);
  std::int64_t r = (x - 1) % modulus;
  if (r < 0) r += modulus;
  return static_cast<std::size_t>(r) + 1;
}

ComplexMatrix cyclic_shift_power(std::size_t n, std::int64_t power) {
  ComplexMatrix out(n, n);
  // Pi^p e_j = e_{j+p}: column j carries a 1 in row index_mod(j + p).
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t row = index_mod(static_cast<std::int64_t>(j) + power, n);
    out(row - 1, j - 1) = 1.0;
  }
  return out;
}

SchmidtResult schmidt(const ComplexMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0 || a.frobenius_norm() == 0.0) {
    throw DegenerateInputError("Schmidt decomposition of a zero matrix");
  }
  Eigen::MatrixXcd mat(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) mat(r, c) = a(r, c);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const auto& u = svd.matrixU();
  const auto& v = svd.matrixV();

  SchmidtResult result;
  const auto rank = static_cast<std::size_t>(sigma.size());
  result.lambdas.resize(rank);
  result.left_basis = ComplexMatrix(a.rows(), rank);
  result.right_basis = ComplexMatrix(a.cols(), rank);
  for (std::size_t m = 0; m < rank; ++m) {
    result.lambdas[m] = sigma(m) * sigma(m);
    for (std::size_t r = 0; r < a.rows(); ++r) result.left_basis(r, m) = u(r, m);
    for (std::size_t r = 0; r < a.cols(); ++r) result.right_basis(r, m) = v(r, m);
  }
  return result;
}

ComplexMatrix orthonormal_completion(const ComplexMatrix& partial) {
  const std::size_t n = partial.rows();
  const std::size_t given = partial.cols();
  if (given > n) throw DimensionError("more columns than dimension: " + shape(partial));

  std::vector<ComplexVector> basis;
  basis.reserve(n);
  for (std::size_t c = 0; c < given; ++c) basis.push_back(partial.column(c));
  for (std::size_t i = 0; i < given; ++i) {
    for (std::size_t j = 0; j < given; ++j) {
      const Complex dot = inner(basis[i], basis[j]);
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-8) {
        throw ValidationError("orthonormal_completion: input columns are not orthonormal");
      }
    }
  }

  const double threshold = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t k = 1; k <= n && basis.size() < n; ++k) {
    ComplexVector candidate = ComplexVector::basis(n, k);
    for (int pass = 0; pass < 2; ++pass) {
      for (const ComplexVector& q : basis) {
        const Complex proj = inner(q, candidate);
        for (std::size_t r = 0; r < n; ++r) candidate[r] -= proj * q[r];
      }
    }
    const double norm = candidate.norm();
    if (norm * norm <= threshold) continue;
    for (std::size_t r = 0; r < n; ++r) candidate[r] /= norm;
    basis.push_back(std::move(candidate));
  }
  return ComplexMatrix::from_columns(basis);
}

namespace {

template <typename Array>
bool phase_equal(const Array& a, const Array& b, double tol) {
  if (a.size() != b.size()) return false;
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (std::abs(a[i]) > std::abs(a[pivot])) pivot = i;
  }
  Complex phase = 1.0;
  if (!a.empty() && std::abs(a[pivot]) > 0.0 && std::abs(b[pivot]) > 0.0) {
    phase = b[pivot] / a[pivot];
    phase /= std::abs(phase);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(b[i] - phase * a[i]) > tol) return false;
  }
  return true;
}

}  // namespace

bool equal_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return phase_equal(a.entries(), b.entries(), tol);
}

bool equal_up_to_phase(const ComplexVector& a, const ComplexVector& b, double tol) {
  return phase_equal(a.entries(), b.entries(), tol);
}

}  // namespace qtp
