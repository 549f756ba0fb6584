#pragma once

// Dense complex vector/matrix kernel used by every other module.
//
// Storage is row-major and 0-based. Domain-level helpers that talk about
// basis vectors, shift powers or cyclic indices (basis(), index_mod(),
// cyclic_shift_power()) use the 1-based conventions of the protocol.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace qtp {

using Complex = std::complex<double>;

// Reconstruction / unitarity checks.
inline constexpr double kNumericTol = 1e-10;
// Pure algebraic identities (permutations, Kronecker products).
inline constexpr double kAlgebraTol = 1e-12;

class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(std::size_t dim);
  explicit ComplexVector(std::vector<Complex> entries);
  ComplexVector(std::initializer_list<Complex> entries);

  // e_index in C^dim, index is 1-based.
  static ComplexVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return entries_.size(); }
  Complex& operator[](std::size_t i) { return entries_[i]; }
  const Complex& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const Complex> entries() const noexcept { return entries_; }
  std::span<Complex> entries() noexcept { return entries_; }

  double norm() const;

 private:
  std::vector<Complex> entries_;
};

Complex inner(const ComplexVector& x, const ComplexVector& y);  // <x|y>
double max_abs_diff(const ComplexVector& x, const ComplexVector& y);
ComplexVector operator*(Complex scale, const ComplexVector& v);
ComplexVector operator-(const ComplexVector& x, const ComplexVector& y);

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  // Matrix whose columns are the given vectors (all of equal dimension).
  static ComplexMatrix from_columns(std::span<const ComplexVector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  std::span<const Complex> entries() const noexcept { return entries_; }

  ComplexVector column(std::size_t c) const;
  double frobenius_norm() const;

  ComplexMatrix& operator*=(Complex scale);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& m, const ComplexVector& v);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker products. Composite index (1-based) is (index_u - 1) * dim_v + index_v.
ComplexVector tensor(const ComplexVector& u, const ComplexVector& v);
ComplexMatrix tensor(const ComplexMatrix& u, const ComplexMatrix& v);

ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix transpose(const ComplexMatrix& m);
ComplexMatrix conjugate(const ComplexMatrix& m);

// max |(M^dagger M - I)_{rc}|. Throws DimensionError for non-square input.
double unitarity_defect(const ComplexMatrix& m);
bool is_unitary(const ComplexMatrix& m, double tol = kNumericTol);

// Pi^power where Pi e_j = e_{j+1} cyclically (Pi has a 1 in row 1, column n and
// ones on the subdiagonal). Negative powers are inverse powers.
ComplexMatrix cyclic_shift_power(std::size_t n, std::int64_t power);

// ((x - 1) mod n) + 1, always in 1..n.
std::size_t index_mod(std::int64_t x, std::size_t n);

// a = left_basis * diag(sqrt(lambdas)) * right_basis^dagger (thin factors).
struct SchmidtResult {
  std::vector<double> lambdas;  // squared singular values, descending
  ComplexMatrix left_basis;     // rows(a) x min(rows, cols), orthonormal columns
  ComplexMatrix right_basis;    // cols(a) x min(rows, cols), orthonormal columns
};

// Throws DegenerateInputError on the zero matrix.
SchmidtResult schmidt(const ComplexMatrix& a);

// Extends the orthonormal columns of `partial` (n x r) to an n x n unitary
// whose first r columns are `partial`. The complement is obtained by
// Gram-Schmidt over e_1, ..., e_n in order, so the result is deterministic.
ComplexMatrix orthonormal_completion(const ComplexMatrix& partial);

// True when b == e^{i phi} a entrywise within tol for some phase phi.
bool equal_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b, double tol);
bool equal_up_to_phase(const ComplexVector& a, const ComplexVector& b, double tol);

}  // namespace qtp
