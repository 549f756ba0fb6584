#pragma once

// Synthesis of the sender unitary and the receiver's recovery operators for a
// given bipartite resource.
//
// Index conventions (all 1-based):
//   H1 (input, dim N1) basis e_i, H2 (sender auxiliary, dim N2) basis f_j,
//   H3 (receiver, dim N3) basis g_k. The sender unitary acts on H1 (x) H2 as
//   U (e_i (x) f_j) = sum_{s,t} b(i,j,s,t) e_s (x) f_t.
//
// The closed form that solves the teleportation constraint is written in a
// "canonical frame": H1 reordered so the teleported subspace comes first, H2
// and H3 rotated to the Schmidt bases of the resource. ProtocolFrame records
// those changes of basis so the constraint can be checked in either frame.

#include <cstddef>
#include <optional>
#include <vector>

#include "qtp/state_factory.hpp"
#include "qtp/tensor_algebra.hpp"

namespace qtp {

// Unimodular phases c(i,j,k), i,j in 1..N1, k in 1..N2. Every fixed-k slice
// M[s][j] = c(s,j,k) must have orthogonal columns (M^dagger M = N1 I).
class PhaseTensor {
 public:
  // Entries laid out as ((i-1) * N1 + (j-1)) * N2 + (k-1). Throws ValidationError
  // when an invariant fails.
  PhaseTensor(std::size_t n1, std::size_t n2, std::vector<Complex> entries);

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  const Complex& operator()(std::size_t i, std::size_t j, std::size_t k) const;
  ComplexMatrix slice(std::size_t k) const;

 private:
  std::size_t n1_;
  std::size_t n2_;
  std::vector<Complex> entries_;
};

// c(s,j,k) = exp(2 pi i (s-1)(j-1) / N1), independent of k.
PhaseTensor fourier_phase_tensor(std::size_t n1, std::size_t n2);

struct ProtocolFrame {
  // Teleported dimension n: the size of the input subspace and the Schmidt rank
  // of the resource.
  std::size_t logical_dim = 0;
  // input_order[m-1] is the physical H1 index of canonical index m. The first
  // logical_dim entries are the input support.
  std::vector<std::size_t> input_order;
  // Columns are the canonical H2 basis (Schmidt vectors first).
  ComplexMatrix sender_basis;
  // Maps the receiver's Schmidt partners to g_1..g_n. Empty means identity.
  ComplexMatrix receiver_basis;
};

class ProtocolUnitary {
 public:
  ProtocolUnitary(std::size_t n1, std::size_t n2, ComplexMatrix matrix, ProtocolFrame frame);

  // Raw (N1 N2) x (N1 N2) matrix in the computational frame.
  static ProtocolUnitary from_matrix(std::size_t n1, std::size_t n2, ComplexMatrix matrix);

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const ProtocolFrame& frame() const noexcept { return frame_; }

  // Amplitude of e_s (x) f_t in U (e_i (x) f_j).
  Complex b(std::size_t i, std::size_t j, std::size_t s, std::size_t t) const;

  // U expressed in the canonical frame.
  ComplexMatrix canonical_matrix() const;

 private:
  std::size_t n1_;
  std::size_t n2_;
  ComplexMatrix matrix_;
  ProtocolFrame frame_;
};

class RecoveryFamily {
 public:
  RecoveryFamily(std::size_t n1, std::size_t n2, std::size_t n3, std::vector<ComplexMatrix> ops,
                 ComplexMatrix receiver_correction, ComplexMatrix placement);

  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  std::size_t n3() const noexcept { return n3_; }
  // O_{ik}; throws IndexError outside 1..N1 x 1..N2.
  const ComplexMatrix& op(std::size_t i, std::size_t k) const;
  const ComplexMatrix& receiver_correction() const noexcept { return receiver_correction_; }
  const ComplexMatrix& placement() const noexcept { return placement_; }

 private:
  std::size_t n1_;
  std::size_t n2_;
  std::size_t n3_;
  std::vector<ComplexMatrix> ops_;
  ComplexMatrix receiver_correction_;
  ComplexMatrix placement_;
};

struct FeasibilityVerdict {
  bool feasible = false;
  std::vector<double> lambdas;
  std::size_t effective_dim = 0;
};

// Both tolerances of the maximal-entanglement test.
inline constexpr double kFeasibilityTol = 1e-8;

// Feasible iff exactly n1 Schmidt coefficients exceed kFeasibilityTol and all
// of them equal 1/n1 within kFeasibilityTol.
FeasibilityVerdict feasibility(const ResourceMatrix& resource, std::size_t n1);

struct SynthesisOptions {
  // Physical H1 indices of the teleported subspace, in logical order. Empty
  // means all of H1 in natural order.
  std::vector<std::size_t> input_support;
  // Where the receiver's logical index m ends up in H3. Empty means the same
  // indices as input_support.
  std::vector<std::size_t> output_support;
  // When false an infeasible resource still yields the closed-form protocol
  // on its leading Schmidt vectors (for demonstrating sub-unit fidelity).
  bool enforce_feasibility = true;
};

struct Protocol {
  ProtocolUnitary unitary;
  RecoveryFamily recovery;
  std::vector<std::size_t> input_support;
  std::vector<std::size_t> output_support;
  FeasibilityVerdict verdict;

  // Image of psi0 in H3 that a perfect run delivers. Throws ValidationError if
  // psi0 has weight outside the input support.
  StateVector target(const StateVector& psi0) const;
};

// Throws FeasibilityError (infeasible resource, enforce_feasibility set),
// DimensionError (c or option dims inconsistent) or ValidationError (bad supports).
Protocol synthesize(const ResourceMatrix& resource, std::size_t n1, const PhaseTensor& c,
                    const SynthesisOptions& options = {});

// max_{s,t,k} | sum_{i,j} alpha_i a_{jk} b(i,j,s,t)
//               - alpha_{k-t+1} c(s, k-t+1, t) / sqrt(N1 n) |, evaluated in the
// protocol's canonical frame (indices modulo the teleported dimension n).
double condition_residual(const ProtocolUnitary& u, const ResourceMatrix& resource,
                          const PhaseTensor& c, const StateVector& psi0);

// Input-free form of the same constraint:
// max_{s,j,t} | sqrt(N1 n) sum_i a_{i, t+j-1} b(j,i,s,t) - c(s,j,t) | over the
// constrained range j,t in 1..n, s in 1..N1 (canonical frame).
double constraint_residual(const ProtocolUnitary& u, const ResourceMatrix& resource,
                           const PhaseTensor& c);

const ComplexMatrix& recovery_operator(const RecoveryFamily& family, std::size_t i, std::size_t k);

}  // namespace qtp
