#include "qtp/teleport_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qtp/errors.hpp"

namespace qtp {
namespace {

double uniform_unit(std::mt19937_64& rng) {
  // 53 random bits -> [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_outcome(const JointDims& dims, std::size_t i, std::size_t k) {
  if (i < 1 || i > dims.n1 || k < 1 || k > dims.n2) {
    throw IndexError("outcome (" + std::to_string(i) + "," + std::to_string(k) + ") out of range");
  }
}

}  // namespace

double TeleportReport::min_fidelity() const {
  double worst = 1.0;
  for (const BranchRecord& b : branches) {
    if (b.bob_state_post) worst = std::min(worst, b.fidelity);
  }
  return worst;
}

StateVector prepare_joint(const StateVector& psi0, const ResourceMatrix& resource) {
  const std::size_t pair = resource.dim_sender() * resource.dim_receiver();
  if (psi0.dim() > kMaxJointDim / pair) {
    throw SizeError("joint state would exceed " + std::to_string(kMaxJointDim) + " amplitudes");
  }
  return StateVector::normalized(tensor(psi0.amplitudes(), resource.state().amplitudes()));
}

StateVector apply_sender_unitary(const StateVector& joint, const ProtocolUnitary& u) {
  const std::size_t d12 = u.n1() * u.n2();
  if (joint.dim() % d12 != 0) {
    throw DimensionError("joint dim " + std::to_string(joint.dim()) + " is not a multiple of " +
                         std::to_string(d12));
  }
  const std::size_t n3 = joint.dim() / d12;
  const ComplexMatrix& m = u.matrix();
  ComplexVector out(joint.dim());
  // The joint state is a d12 x N3 matrix; U acts on its rows.
  for (std::size_t row = 0; row < d12; ++row) {
    for (std::size_t col = 0; col < d12; ++col) {
      const Complex w = m(row, col);
      if (w == Complex{}) continue;
      for (std::size_t g = 0; g < n3; ++g) out[row * n3 + g] += w * joint[col * n3 + g];
    }
  }
  return StateVector::normalized(std::move(out));
}

ComplexVector branch_amplitudes(const StateVector& phi, const JointDims& dims, std::size_t i,
                                std::size_t k) {
  if (phi.dim() != dims.total()) throw DimensionError("state does not match joint dims");
  check_outcome(dims, i, k);
  ComplexVector bob(dims.n3);
  const std::size_t offset = ((i - 1) * dims.n2 + (k - 1)) * dims.n3;
  for (std::size_t g = 0; g < dims.n3; ++g) bob[g] = phi[offset + g];
  return bob;
}

std::vector<double> outcome_probabilities(const StateVector& phi, const JointDims& dims) {
  if (phi.dim() != dims.total()) throw DimensionError("state does not match joint dims");
  std::vector<double> probs(dims.n1 * dims.n2, 0.0);
  for (std::size_t idx = 0; idx < phi.dim(); ++idx) probs[idx / dims.n3] += std::norm(phi[idx]);
  return probs;
}

Measurement collapse(const StateVector& phi, const JointDims& dims, std::size_t i, std::size_t k) {
  ComplexVector bob = branch_amplitudes(phi, dims, i, k);
  const double norm = bob.norm();
  const double p = norm * norm;
  if (p < kNullBranchProbability) {
    throw DegenerateInputError("outcome (" + std::to_string(i) + "," + std::to_string(k) +
                               ") has zero probability");
  }
  return Measurement{i, k, p, StateVector::normalized(std::move(bob))};
}

Measurement measure_alice(const StateVector& phi, const JointDims& dims, std::mt19937_64& rng) {
  const std::vector<double> probs = outcome_probabilities(phi, dims);
  if (std::all_of(probs.begin(), probs.end(),
                  [](double p) { return p < kNullBranchProbability; })) {
    throw DegenerateInputError("measurement on a state with no weight");
  }
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = uniform_unit(rng) * total;
  double acc = 0.0;
  std::size_t chosen = probs.size();
  for (std::size_t b = 0; b < probs.size(); ++b) {
    if (probs[b] < kNullBranchProbability) continue;
    acc += probs[b];
    chosen = b;
    if (u < acc) break;
  }
  return collapse(phi, dims, chosen / dims.n2 + 1, chosen % dims.n2 + 1);
}

StateVector recover(const StateVector& bob, const RecoveryFamily& family, std::size_t i,
                    std::size_t k) {
  const ComplexMatrix& op = family.op(i, k);
  if (bob.dim() != op.cols()) {
    throw DimensionError("receiver state dim " + std::to_string(bob.dim()) +
                         " does not match recovery operator");
  }
  return StateVector::normalized(op * bob.amplitudes());
}

double fidelity(const StateVector& x, const StateVector& y) {
  if (x.dim() != y.dim()) {
    throw DimensionError("fidelity of states with dims " + std::to_string(x.dim()) + " and " +
                         std::to_string(y.dim()));
  }
  return std::norm(inner(x.amplitudes(), y.amplitudes()));
}

TeleportReport execute(const Protocol& protocol, const StateVector& psi0,
                       const ResourceMatrix& resource, const RunConfig& config) {
  const JointDims dims{protocol.unitary.n1(), protocol.unitary.n2(), resource.dim_receiver()};
  if (resource.dim_sender() != dims.n2 || protocol.recovery.n3() != dims.n3) {
    throw DimensionError("resource does not match the protocol");
  }
  const StateVector target = protocol.target(psi0);
  const StateVector phi = apply_sender_unitary(prepare_joint(psi0, resource), protocol.unitary);

  TeleportReport report;
  report.mode = config.mode;
  report.dims = dims;
  report.seed = config.seed;

  auto record = [&](const Measurement& m) {
    const StateVector out = recover(m.bob_state, protocol.recovery, m.outcome_i, m.outcome_k);
    const double f = fidelity(out, target);
    return BranchRecord{m.outcome_i, m.outcome_k, m.probability, out, f};
  };

  if (config.mode == RunMode::exhaustive) {
    const std::vector<double> probs = outcome_probabilities(phi, dims);
    for (std::size_t i = 1; i <= dims.n1; ++i) {
      for (std::size_t k = 1; k <= dims.n2; ++k) {
        const double p = probs[(i - 1) * dims.n2 + (k - 1)];
        if (p < kNullBranchProbability) {
          report.branches.push_back(BranchRecord{i, k, p, std::nullopt, 0.0});
          continue;
        }
        report.branches.push_back(record(collapse(phi, dims, i, k)));
        report.mean_fidelity += p * report.branches.back().fidelity;
      }
    }
    return report;
  }

  std::mt19937_64 rng(config.seed);
  const std::size_t draws = config.mode == RunMode::session ? 1 : config.samples;
  for (std::size_t d = 0; d < draws; ++d) {
    report.branches.push_back(record(measure_alice(phi, dims, rng)));
    report.mean_fidelity += report.branches.back().fidelity;
  }
  if (draws > 0) report.mean_fidelity /= static_cast<double>(draws);
  return report;
}

TeleportReport run_protocol(const StateVector& psi0, const ResourceMatrix& resource,
                            const PhaseTensor& c, const RunConfig& config,
                            const SynthesisOptions& options) {
  SynthesisOptions checked = options;
  checked.enforce_feasibility = true;
  const Protocol protocol = synthesize(resource, psi0.dim(), c, checked);
  return execute(protocol, psi0, resource, config);
}

}  // namespace qtp
