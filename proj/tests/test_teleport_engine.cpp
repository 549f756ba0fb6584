#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "qtp/errors.hpp"
#include "qtp/protocol_synthesis.hpp"
#include "qtp/teleport_engine.hpp"

using namespace qtp;

namespace {

const double kH = 1.0 / std::sqrt(2.0);

Protocol maximal_protocol(std::size_t n) {
  return synthesize(maximally_entangled_resource(n), n, fourier_phase_tensor(n, n));
}

StateVector after_sender(const Protocol& p, const StateVector& psi0, const ResourceMatrix& r) {
  return apply_sender_unitary(prepare_joint(psi0, r), p.unitary);
}

// Independent oracle: explicit projector |e_i><e_i| (x) |f_k><f_k| (x) 1 on the
// full joint space, then read off and normalize the receiver block.
ComplexVector projector_branch(const StateVector& phi, std::size_t i, std::size_t k) {
  const ComplexMatrix ei = ComplexMatrix::from_columns(std::vector{ComplexVector::basis(2, i)});
  const ComplexMatrix fk = ComplexMatrix::from_columns(std::vector{ComplexVector::basis(2, k)});
  const ComplexMatrix proj =
      tensor(tensor(ei * adjoint(ei), fk * adjoint(fk)), ComplexMatrix::identity(2));
  const ComplexVector projected = proj * phi.amplitudes();
  const ComplexVector bra = tensor(ComplexVector::basis(2, i), ComplexVector::basis(2, k));
  ComplexVector bob(2);
  for (std::size_t ab = 0; ab < 4; ++ab) {
    for (std::size_t g = 0; g < 2; ++g) bob[g] += std::conj(bra[ab]) * projected[ab * 2 + g];
  }
  return Complex(1.0 / bob.norm()) * bob;
}

}  // namespace

TEST(PrepareJoint, ScalarCase) {
  const StateVector j =
      prepare_joint(StateVector(ComplexVector{1}), ResourceMatrix(ComplexMatrix{{1}}));
  ASSERT_EQ(j.dim(), 1u);
  EXPECT_EQ(j[0], Complex(1.0));
}

TEST(PrepareJoint, QubitWithEprPair) {
  const Complex a{0.6, 0.0}, b{0.0, 0.8};
  const StateVector j = prepare_joint(StateVector(ComplexVector{a, b}), maximally_entangled_resource(2));
  const ComplexVector want{kH * a, 0, 0, kH * a, kH * b, 0, 0, kH * b};
  EXPECT_LE(max_abs_diff(j.amplitudes(), want), 1e-15);
}

TEST(PrepareJoint, NormAndSizeGuard) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const StateVector j = prepare_joint(random_state(3, seed), maximally_entangled_resource(4));
    EXPECT_NEAR(j.amplitudes().norm(), 1.0, 1e-12);
  }
  EXPECT_THROW(prepare_joint(random_state(2, 1), maximally_entangled_resource(1024)), SizeError);
}

TEST(ApplySenderUnitary, IdentityAndNorm) {
  const StateVector j = prepare_joint(random_state(2, 3), maximally_entangled_resource(2));
  const ProtocolUnitary id = ProtocolUnitary::from_matrix(2, 2, ComplexMatrix::identity(4));
  EXPECT_EQ(max_abs_diff(apply_sender_unitary(j, id).amplitudes(), j.amplitudes()), 0.0);
  for (std::size_t n = 2; n <= 5; ++n) {
    const Protocol p = maximal_protocol(n);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const StateVector phi = after_sender(p, random_state(n, seed), maximally_entangled_resource(n));
      EXPECT_NEAR(phi.amplitudes().norm(), 1.0, 1e-10);
    }
  }
  EXPECT_THROW(apply_sender_unitary(StateVector(ComplexVector::basis(6, 1)), id), DimensionError);
}

TEST(ApplySenderUnitary, EveryBennettBlockCarriesTheInput) {
  const Protocol p = maximal_protocol(2);
  const StateVector psi0 = random_state(2, 5);
  const StateVector phi = after_sender(p, psi0, maximally_entangled_resource(2));
  const JointDims d{2, 2, 2};
  for (std::size_t i = 1; i <= 2; ++i) {
    for (std::size_t k = 1; k <= 2; ++k) {
      const ComplexVector block = branch_amplitudes(phi, d, i, k);
      EXPECT_NEAR(block.norm(), 0.5, 1e-12);
      const ComplexVector fixed = p.recovery.op(i, k) * block;
      EXPECT_TRUE(equal_up_to_phase(psi0.amplitudes(), Complex(2.0) * fixed, 1e-12));
    }
  }
}

TEST(MeasureAlice, UniformBranchLaw) {
  for (std::size_t n : {2u, 3u, 4u, 5u, 8u}) {
    const Protocol p = maximal_protocol(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const StateVector phi = after_sender(p, random_state(n, seed), maximally_entangled_resource(n));
      const std::vector<double> probs = outcome_probabilities(phi, JointDims{n, n, n});
      double total = 0.0;
      for (double q : probs) {
        EXPECT_NEAR(q, 1.0 / double(n * n), 1e-10);
        total += q;
      }
      EXPECT_NEAR(total, 1.0, 1e-10);
    }
  }
}

TEST(MeasureAlice, TrivialDimension) {
  const Protocol p = maximal_protocol(1);
  const StateVector phi = after_sender(p, StateVector(ComplexVector{1}), maximally_entangled_resource(1));
  std::mt19937_64 rng(3);
  const Measurement m = measure_alice(phi, JointDims{1, 1, 1}, rng);
  EXPECT_EQ(m.outcome_i, 1u);
  EXPECT_EQ(m.outcome_k, 1u);
  EXPECT_NEAR(m.probability, 1.0, 1e-15);
}

TEST(MeasureAlice, DeterministicForSeed) {
  const Protocol p = maximal_protocol(3);
  const StateVector phi = after_sender(p, random_state(3, 1), maximally_entangled_resource(3));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 r1(seed), r2(seed);
    const Measurement a = measure_alice(phi, JointDims{3, 3, 3}, r1);
    const Measurement b = measure_alice(phi, JointDims{3, 3, 3}, r2);
    EXPECT_EQ(a.outcome_i, b.outcome_i);
    EXPECT_EQ(a.outcome_k, b.outcome_k);
    EXPECT_EQ(a.probability, b.probability);
    EXPECT_EQ(max_abs_diff(a.bob_state.amplitudes(), b.bob_state.amplitudes()), 0.0);
  }
}

TEST(MeasureAlice, MatchesProjectorOracle) {
  const Protocol p = maximal_protocol(2);
  const JointDims d{2, 2, 2};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const StateVector phi = after_sender(p, random_state(2, seed), maximally_entangled_resource(2));
    for (std::size_t i = 1; i <= 2; ++i) {
      for (std::size_t k = 1; k <= 2; ++k) {
        const Measurement m = collapse(phi, d, i, k);
        EXPECT_LE(max_abs_diff(m.bob_state.amplitudes(), projector_branch(phi, i, k)), 1e-12);
      }
    }
    std::mt19937_64 rng(seed);
    for (int draw = 0; draw < 8; ++draw) {
      const Measurement m = measure_alice(phi, d, rng);
      EXPECT_LE(max_abs_diff(m.bob_state.amplitudes(), projector_branch(phi, m.outcome_i, m.outcome_k)),
                1e-12);
    }
  }
}

TEST(MeasureAlice, DegenerateStateThrows) {
  // Only branch (1,1) carries weight.
  const StateVector phi(ComplexVector::basis(8, 1));
  EXPECT_THROW(collapse(phi, JointDims{2, 2, 2}, 2, 2), DegenerateInputError);
}

TEST(Recover, IdentityBranchAndBennettBranch) {
  const Protocol p = maximal_protocol(2);
  const StateVector psi0 = random_state(2, 21);
  const StateVector phi = after_sender(p, psi0, maximally_entangled_resource(2));
  const JointDims d{2, 2, 2};
  const Measurement m11 = collapse(phi, d, 1, 1);
  EXPECT_LE(max_abs_diff(recover(m11.bob_state, p.recovery, 1, 1).amplitudes(),
                         m11.bob_state.amplitudes()),
            0.0);
  const Measurement m12 = collapse(phi, d, 1, 2);
  EXPECT_TRUE(equal_up_to_phase(recover(m12.bob_state, p.recovery, 1, 2).amplitudes(),
                                psi0.amplitudes(), 1e-12));
  EXPECT_THROW(recover(m12.bob_state, p.recovery, 0, 1), IndexError);
}

TEST(RunProtocol, QutritExhaustive) {
  const TeleportReport rep = run_protocol(random_state(3, 8), maximally_entangled_resource(3),
                                          fourier_phase_tensor(3, 3), RunConfig{});
  ASSERT_EQ(rep.branches.size(), 9u);
  for (const BranchRecord& b : rep.branches) {
    EXPECT_NEAR(b.probability, 1.0 / 9.0, 1e-10);
    EXPECT_GE(b.fidelity, 1.0 - 1e-10);
  }
  EXPECT_NEAR(rep.mean_fidelity, 1.0, 1e-10);
}

TEST(RunProtocol, EndToEndAcrossDimensions) {
  for (std::size_t n : {2u, 3u, 4u, 5u, 8u}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const TeleportReport rep = run_protocol(random_state(n, seed), maximally_entangled_resource(n),
                                              fourier_phase_tensor(n, n), RunConfig{});
      ASSERT_EQ(rep.branches.size(), n * n);
      EXPECT_GE(rep.min_fidelity(), 1.0 - 1e-10);
      for (const BranchRecord& b : rep.branches) EXPECT_NEAR(b.probability, 1.0 / double(n * n), 1e-10);
    }
  }
}

TEST(RunProtocol, GhzTripletCarriesEprPair) {
  const StateVector psi0 = StateVector::normalized(ComplexVector{0, Complex(0.8, 0.1), Complex(0.2, -0.5), 0});
  SynthesisOptions opt;
  opt.input_support = {3, 2};
  opt.output_support = {1, 4};
  const TeleportReport rep =
      run_protocol(psi0, injection_resource(2, 4, SupportInjection{{1, 4}}),
                   fourier_phase_tensor(4, 2), RunConfig{}, opt);
  ASSERT_EQ(rep.branches.size(), 8u);
  EXPECT_GE(rep.min_fidelity(), 1.0 - 1e-10);
}

TEST(RunProtocol, BasisStateTeleportsToItself) {
  for (std::size_t n : {2u, 3u, 5u}) {
    for (std::size_t idx = 1; idx <= n; ++idx) {
      const StateVector e(ComplexVector::basis(n, idx));
      const TeleportReport rep = run_protocol(e, maximally_entangled_resource(n),
                                              fourier_phase_tensor(n, n), RunConfig{});
      for (const BranchRecord& b : rep.branches) {
        EXPECT_TRUE(equal_up_to_phase(b.bob_state_post->amplitudes(), e.amplitudes(), 1e-12));
      }
    }
  }
}

TEST(RunProtocol, InfeasibleThrows) {
  const ResourceMatrix r(ComplexMatrix{{std::sqrt(0.9), 0}, {0, std::sqrt(0.1)}});
  EXPECT_THROW(run_protocol(random_state(2, 1), r, fourier_phase_tensor(2, 2), RunConfig{}),
               FeasibilityError);
}

TEST(RunProtocol, WideSenderHasNullBranches) {
  // N2 = 3 > n = 2: the third sender level never appears.
  ComplexMatrix a(3, 2);
  a(0, 0) = kH;
  a(1, 1) = kH;
  const ResourceMatrix r(a);
  const TeleportReport rep = run_protocol(random_state(2, 4), r, fourier_phase_tensor(2, 3), RunConfig{});
  ASSERT_EQ(rep.branches.size(), 6u);
  std::size_t empty = 0;
  for (const BranchRecord& b : rep.branches) {
    if (!b.bob_state_post) {
      ++empty;
      EXPECT_LT(b.probability, kNullBranchProbability);
    } else {
      EXPECT_NEAR(b.probability, 0.25, 1e-10);
      EXPECT_GE(b.fidelity, 1.0 - 1e-10);
    }
  }
  EXPECT_EQ(empty, 2u);
  EXPECT_NEAR(rep.mean_fidelity, 1.0, 1e-10);
}

TEST(RunProtocol, SampledModeIsSeeded) {
  const RunConfig cfg{RunMode::sampled, 77, 50};
  const auto run = [&] {
    return run_protocol(random_state(3, 2), maximally_entangled_resource(3), fourier_phase_tensor(3, 3), cfg);
  };
  const TeleportReport a = run(), b = run();
  ASSERT_EQ(a.branches.size(), 50u);
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  for (std::size_t d = 0; d < 50; ++d) {
    EXPECT_EQ(a.branches[d].outcome_i, b.branches[d].outcome_i);
    EXPECT_EQ(a.branches[d].outcome_k, b.branches[d].outcome_k);
    ++seen[{a.branches[d].outcome_i, a.branches[d].outcome_k}];
  }
  EXPECT_GT(seen.size(), 3u);
  EXPECT_EQ(run_protocol(random_state(2, 2), maximally_entangled_resource(2), fourier_phase_tensor(2, 2),
                         RunConfig{RunMode::sampled, 1, 0})
                .branches.size(),
            0u);
}

TEST(Fidelity, Examples) {
  const StateVector x = random_state(3, 4);
  EXPECT_NEAR(fidelity(x, x), 1.0, 1e-15);
  EXPECT_EQ(fidelity(StateVector(ComplexVector::basis(2, 1)), StateVector(ComplexVector::basis(2, 2))), 0.0);
  const ComplexVector rotated = std::polar(1.0, 1.3) * x.amplitudes();
  EXPECT_NEAR(fidelity(x, StateVector(rotated)), 1.0, 1e-12);
  EXPECT_THROW(fidelity(x, random_state(2, 1)), DimensionError);
}
