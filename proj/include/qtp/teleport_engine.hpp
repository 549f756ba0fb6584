#pragma once

// State-vector execution of a synthesized protocol: joint preparation, the
// sender unitary on H1 (x) H2, a projective measurement of the sender's two
// subsystems in the computational basis, and recovery on H3.
//
// Joint amplitudes are stored with composite index
//   ((i-1) N2 + (j-1)) N3 + (k-1)   for e_i (x) f_j (x) g_k.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qtp/protocol_synthesis.hpp"
#include "qtp/state_factory.hpp"

namespace qtp {

struct JointDims {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  std::size_t total() const noexcept { return n1 * n2 * n3; }
};

inline constexpr std::size_t kMaxJointDim = std::size_t{1} << 20;
// Branches lighter than this are treated as impossible.
inline constexpr double kNullBranchProbability = 1e-15;

// A single measurement result: outcome (i,k), its Born probability and the
// receiver's normalized post-measurement state.
struct Measurement {
  std::size_t outcome_i = 0;
  std::size_t outcome_k = 0;
  double probability = 0.0;
  StateVector bob_state;
};

struct BranchRecord {
  std::size_t outcome_i = 0;
  std::size_t outcome_k = 0;
  double probability = 0.0;
  // Receiver state after recovery; empty for a branch that cannot occur.
  std::optional<StateVector> bob_state_post;
  double fidelity = 0.0;
};

enum class RunMode { exhaustive, sampled, session };

struct TeleportReport {
  RunMode mode = RunMode::exhaustive;
  JointDims dims;
  std::vector<BranchRecord> branches;
  // Exhaustive: sum p * F. Sampled: average F over draws.
  double mean_fidelity = 0.0;
  std::uint64_t seed = 0;

  // Smallest fidelity over branches that can occur; 1 when there are none.
  double min_fidelity() const;
};

struct RunConfig {
  RunMode mode = RunMode::exhaustive;
  std::uint64_t seed = 0;
  std::size_t samples = 1;
};

// Psi0 (x) Psi1. Throws SizeError above kMaxJointDim amplitudes.
StateVector prepare_joint(const StateVector& psi0, const ResourceMatrix& resource);

// (U (x) 1) joint. Throws DimensionError when joint.dim() is not a multiple of N1 N2.
StateVector apply_sender_unitary(const StateVector& joint, const ProtocolUnitary& u);

// Unnormalized receiver component of outcome (i,k).
ComplexVector branch_amplitudes(const StateVector& phi, const JointDims& dims, std::size_t i,
                                std::size_t k);

// p(i,k) for every outcome, lexicographic in (i,k).
std::vector<double> outcome_probabilities(const StateVector& phi, const JointDims& dims);

// Born-rule sample by inverse CDF over lexicographic (i,k).
// Throws DegenerateInputError if every outcome has probability below 1e-15.
Measurement measure_alice(const StateVector& phi, const JointDims& dims, std::mt19937_64& rng);

// Collapse onto a chosen outcome. Throws DegenerateInputError for a null branch.
Measurement collapse(const StateVector& phi, const JointDims& dims, std::size_t i, std::size_t k);

StateVector recover(const StateVector& bob, const RecoveryFamily& family, std::size_t i,
                    std::size_t k);

// |<x|y>|^2. Throws DimensionError on mismatch.
double fidelity(const StateVector& x, const StateVector& y);

// Runs an already synthesized protocol.
TeleportReport execute(const Protocol& protocol, const StateVector& psi0,
                       const ResourceMatrix& resource, const RunConfig& config);

// Synthesizes (feasibility enforced) and runs. Throws FeasibilityError.
TeleportReport run_protocol(const StateVector& psi0, const ResourceMatrix& resource,
                            const PhaseTensor& c, const RunConfig& config,
                            const SynthesisOptions& options = {});

}  // namespace qtp
