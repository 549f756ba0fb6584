#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qtp/tensor_algebra.hpp"

namespace qtp {

// Pure state with unit norm (checked to within kNumericTol on construction).
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(ComplexVector amplitudes);

  // Rescales a nonzero vector to unit norm. Throws DegenerateInputError on zero.
  static StateVector normalized(ComplexVector amplitudes);

  std::size_t dim() const noexcept { return amplitudes_.dim(); }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

 private:
  ComplexVector amplitudes_;
};

// Coefficient matrix a_{jk} of a bipartite resource sum_{jk} a_{jk} f_j (x) g_k,
// rows indexing the sender's auxiliary space, columns the receiver's space.
class ResourceMatrix {
 public:
  // Throws ValidationError unless the Frobenius norm is 1 within kNumericTol.
  explicit ResourceMatrix(ComplexMatrix coefficients);

  std::size_t dim_sender() const noexcept { return coefficients_.rows(); }
  std::size_t dim_receiver() const noexcept { return coefficients_.cols(); }
  const ComplexMatrix& coefficients() const noexcept { return coefficients_; }

  // The resource as a vector in H2 (x) H3.
  StateVector state() const;

 private:
  ComplexMatrix coefficients_;
};

// Injective placement of logical indices 1..size() into 1..N (1-based both sides).
struct SupportInjection {
  std::vector<std::size_t> targets;

  std::size_t size() const noexcept { return targets.size(); }
  std::size_t operator()(std::size_t logical) const { return targets.at(logical - 1); }

  static SupportInjection identity(std::size_t n);
  // Throws ValidationError for repeated or out-of-range targets.
  void validate(std::size_t codomain) const;
};

// Complex standard normal components, normalized. Deterministic for a seed.
StateVector random_state(std::size_t dim, std::uint64_t seed);

// a = I / sqrt(N).
ResourceMatrix maximally_entangled_resource(std::size_t n);

// m EPR pairs (|00> + |11>)/sqrt(2), the first particle of every pair on the
// sender side, regrouped as H2 = (x)_i H2_i and H3 = (x)_i H3_i.
ResourceMatrix epr_product_resource(std::size_t m);

// n1 x N3 resource with a[i][inj(i)] = 1/sqrt(n1).
ResourceMatrix injection_resource(std::size_t n1, std::size_t n3, const SupportInjection& inj);

// Normalizes an arbitrary nonzero coefficient matrix.
ResourceMatrix resource_from_matrix(const ComplexMatrix& a);

}  // namespace qtp
