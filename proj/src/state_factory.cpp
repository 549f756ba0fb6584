#include "qtp/state_factory.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qtp/errors.hpp"

namespace qtp {

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.dim() == 0) throw DimensionError("state of dimension 0");
  if (std::abs(amplitudes_.norm() - 1.0) > kNumericTol) {
    throw ValidationError("state is not normalized (norm " + std::to_string(amplitudes_.norm()) +
                          ")");
  }
}

StateVector StateVector::normalized(ComplexVector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw DegenerateInputError("cannot normalize the zero vector");
  for (Complex& z : amplitudes.entries()) z /= norm;
  return StateVector(std::move(amplitudes));
}

ResourceMatrix::ResourceMatrix(ComplexMatrix coefficients) : coefficients_(std::move(coefficients)) {
  if (coefficients_.rows() == 0 || coefficients_.cols() == 0) {
    throw DimensionError("resource with an empty factor");
  }
  if (std::abs(coefficients_.frobenius_norm() - 1.0) > kNumericTol) {
    throw ValidationError("resource coefficients do not have unit Frobenius norm");
  }
}

StateVector ResourceMatrix::state() const {
  return StateVector(ComplexVector(
      std::vector<Complex>(coefficients_.entries().begin(), coefficients_.entries().end())));
}

SupportInjection SupportInjection::identity(std::size_t n) {
  SupportInjection inj;
  for (std::size_t i = 1; i <= n; ++i) inj.targets.push_back(i);
  return inj;
}

void SupportInjection::validate(std::size_t codomain) const {
  std::vector<bool> seen(codomain + 1, false);
  for (std::size_t t : targets) {
    if (t < 1 || t > codomain) {
      throw ValidationError("injection target " + std::to_string(t) + " outside 1.." +
                            std::to_string(codomain));
    }
    if (seen[t]) {
      throw ValidationError("injection is not injective: " + std::to_string(t) +
                            " is hit twice");
    }
    seen[t] = true;
  }
}

StateVector random_state(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw DimensionError("random state of dimension 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = Complex(re, im);
  }
  return StateVector::normalized(std::move(v));
}

ResourceMatrix maximally_entangled_resource(std::size_t n) {
  if (n == 0) throw DimensionError("maximally entangled resource of dimension 0");
  ComplexMatrix a = ComplexMatrix::identity(n);
  a *= 1.0 / std::sqrt(static_cast<double>(n));
  return ResourceMatrix(std::move(a));
}

ResourceMatrix epr_product_resource(std::size_t m) {
  if (m == 0) throw DimensionError("EPR product needs at least one pair");
  if (m > 10) throw SizeError("EPR product with more than 10 pairs");
  const double amp = 1.0 / std::sqrt(2.0);
  // Single pair in H2_p (x) H3_p: index = sender_bit * 2 + receiver_bit.
  const ComplexVector pair{amp, 0.0, 0.0, amp};
  ComplexVector pairs{1.0};
  for (std::size_t p = 0; p < m; ++p) pairs = tensor(pairs, pair);

  const std::size_t side = std::size_t{1} << m;
  ComplexMatrix a(side, side);
  for (std::size_t idx = 0; idx < pairs.dim(); ++idx) {
    if (pairs[idx] == Complex{}) continue;
    std::size_t sender = 0;
    std::size_t receiver = 0;
    for (std::size_t p = 0; p < m; ++p) {
      const std::size_t digit = (idx >> (2 * (m - 1 - p))) & 3U;
      sender = (sender << 1) | (digit >> 1);
      receiver = (receiver << 1) | (digit & 1U);
    }
    a(sender, receiver) = pairs[idx];
  }
  return ResourceMatrix(std::move(a));
}

ResourceMatrix injection_resource(std::size_t n1, std::size_t n3, const SupportInjection& inj) {
  if (n1 == 0) throw DimensionError("injection resource with n1 = 0");
  if (n1 > n3) {
    throw DimensionError("injection of " + std::to_string(n1) + " indices into " +
                         std::to_string(n3));
  }
  if (inj.size() != n1) {
    throw ValidationError("injection has " + std::to_string(inj.size()) +
                          " entries, expected " + std::to_string(n1));
  }
  inj.validate(n3);
  ComplexMatrix a(n1, n3);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n1));
  for (std::size_t i = 1; i <= n1; ++i) a(i - 1, inj(i) - 1) = amp;
  return ResourceMatrix(std::move(a));
}

ResourceMatrix resource_from_matrix(const ComplexMatrix& a) {
  const double norm = a.frobenius_norm();
  if (norm == 0.0) throw DegenerateInputError("resource from the zero matrix");
  return ResourceMatrix(Complex(1.0 / norm) * a);
}

}  // namespace qtp
