#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qtp/errors.hpp"
#include "qtp/protocol_synthesis.hpp"
#include "qtp/teleport_engine.hpp"
#include "support.hpp"

using namespace qtp;
using qtp::testing::random_matrix;
using qtp::testing::random_unitary;

namespace {

const Complex I1{0.0, 1.0};
const double kH = 1.0 / std::sqrt(2.0);

ComplexMatrix sigma_x() { return {{0, 1}, {1, 0}}; }
ComplexMatrix sigma_z() { return {{1, 0}, {0, -1}}; }
ComplexMatrix i_sigma_y() { return {{0, 1}, {-1, 0}}; }

// Slices D1 F D2 with random unimodular diagonals, different for every k.
PhaseTensor random_phase_tensor(std::size_t n1, std::size_t n2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<Complex> e(n1 * n1 * n2);
  for (std::size_t k = 0; k < n2; ++k) {
    std::vector<double> row(n1), col(n1);
    for (auto& a : row) a = angle(rng);
    for (auto& a : col) a = angle(rng);
    for (std::size_t s = 0; s < n1; ++s) {
      for (std::size_t j = 0; j < n1; ++j) {
        const double f = 2.0 * std::numbers::pi * double(s * j) / double(n1);
        e[(s * n1 + j) * n2 + k] = std::polar(1.0, row[s] + f + col[j]);
      }
    }
  }
  return PhaseTensor(n1, n2, std::move(e));
}

// V a W^T for random unitaries: the same entanglement in rotated local bases.
ResourceMatrix rotated(const ResourceMatrix& r, std::uint64_t seed) {
  const ComplexMatrix v = random_unitary(r.dim_sender(), seed);
  const ComplexMatrix w = random_unitary(r.dim_receiver(), seed + 1);
  return ResourceMatrix(v * r.coefficients() * transpose(w));
}

// n-dimensional maximal entanglement spread over N2 x N3 by random isometries.
ResourceMatrix embedded_maximal(std::size_t n, std::size_t n2, std::size_t n3, std::uint64_t seed) {
  ComplexMatrix pad(n2, n3);
  for (std::size_t m = 0; m < n; ++m) pad(m, m) = 1.0 / std::sqrt(double(n));
  return rotated(ResourceMatrix(pad), seed);
}

double min_branch_fidelity(const Protocol& p, const StateVector& psi0, const ResourceMatrix& r) {
  return execute(p, psi0, r, RunConfig{}).min_fidelity();
}

}  // namespace

TEST(PhaseTensor, FourierAtTwoMatchesSignChoice) {
  const PhaseTensor c = fourier_phase_tensor(2, 2);
  for (std::size_t k = 1; k <= 2; ++k) {
    EXPECT_LE(max_abs_diff(c.slice(k), ComplexMatrix{{1, 1}, {1, -1}}), 1e-15);
    EXPECT_EQ(c(2, 2, k), Complex(-1.0));
  }
}

TEST(PhaseTensor, FourierAtOneIsOne) {
  EXPECT_EQ(fourier_phase_tensor(1, 3)(1, 1, 2), Complex(1.0));
}

TEST(PhaseTensor, FourierSlicesHaveOrthogonalColumns) {
  for (std::size_t n1 : {3u, 4u, 5u, 8u}) {
    const ComplexMatrix s = fourier_phase_tensor(n1, 2).slice(2);
    EXPECT_LE(max_abs_diff(adjoint(s) * s, double(n1) * ComplexMatrix::identity(n1)), 1e-12);
  }
}

TEST(PhaseTensor, RejectsBrokenInvariants) {
  std::vector<Complex> ones(2 * 2 * 1, 1.0);
  EXPECT_THROW(PhaseTensor(2, 1, ones), ValidationError);
  std::vector<Complex> halves{1, 1, 1, 0.5};
  EXPECT_THROW(PhaseTensor(2, 1, halves), ValidationError);
  EXPECT_THROW(PhaseTensor(2, 2, ones), DimensionError);
  EXPECT_THROW(fourier_phase_tensor(2, 2)(3, 1, 1), IndexError);
}

TEST(Synthesize, BennettRecoverySet) {
  const Protocol p = synthesize(maximally_entangled_resource(2), 2, fourier_phase_tensor(2, 2));
  EXPECT_LE(max_abs_diff(p.recovery.op(1, 1), ComplexMatrix::identity(2)), 1e-12);
  EXPECT_LE(max_abs_diff(p.recovery.op(2, 1), sigma_z()), 1e-12);
  EXPECT_TRUE(equal_up_to_phase(sigma_x(), p.recovery.op(1, 2), 1e-12));
  EXPECT_TRUE(equal_up_to_phase(i_sigma_y(), p.recovery.op(2, 2), 1e-12));
}

TEST(Synthesize, TrivialDimension) {
  const Protocol p = synthesize(maximally_entangled_resource(1), 1, fourier_phase_tensor(1, 1));
  EXPECT_LE(max_abs_diff(p.unitary.matrix(), ComplexMatrix{{1}}), 1e-15);
  EXPECT_LE(max_abs_diff(p.recovery.op(1, 1), ComplexMatrix{{1}}), 1e-15);
}

TEST(Synthesize, SwappedMaximalResource) {
  const ResourceMatrix r(ComplexMatrix{{0, kH}, {kH, 0}});
  const Protocol p = synthesize(r, 2, fourier_phase_tensor(2, 2));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TeleportReport rep = execute(p, random_state(2, seed), r, RunConfig{});
    ASSERT_EQ(rep.branches.size(), 4u);
    for (const BranchRecord& b : rep.branches) EXPECT_GE(b.fidelity, 1.0 - 1e-12);
  }
}

TEST(Synthesize, MatchesCnotHadamardCircuit) {
  const Protocol p = synthesize(maximally_entangled_resource(2), 2, fourier_phase_tensor(2, 2));
  const ComplexMatrix cnot{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
  const ComplexMatrix h = tensor(ComplexMatrix{{kH, kH}, {kH, -kH}}, ComplexMatrix::identity(2));
  const bool h_after = equal_up_to_phase(h * cnot, p.unitary.matrix(), 1e-12);
  const bool h_before = equal_up_to_phase(cnot * h, p.unitary.matrix(), 1e-12);
  EXPECT_TRUE(h_after || h_before);
  EXPECT_TRUE(h_after);
}

TEST(Synthesize, UnitaryAndRecoveryAreUnitary) {
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 8u}) {
    const Protocol p = synthesize(maximally_entangled_resource(n), n, fourier_phase_tensor(n, n));
    EXPECT_TRUE(is_unitary(p.unitary.matrix(), 1e-10)) << n;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 1; k <= n; ++k) EXPECT_TRUE(is_unitary(p.recovery.op(i, k), 1e-10));
    }
  }
}

TEST(Synthesize, Deterministic) {
  const ResourceMatrix r = rotated(maximally_entangled_resource(3), 9);
  const Protocol a = synthesize(r, 3, fourier_phase_tensor(3, 3));
  const Protocol b = synthesize(r, 3, fourier_phase_tensor(3, 3));
  EXPECT_EQ(max_abs_diff(a.unitary.matrix(), b.unitary.matrix()), 0.0);
}

TEST(Synthesize, InfeasibleResourceThrowsWithSpectrum) {
  const ResourceMatrix r(ComplexMatrix{{std::sqrt(0.7), 0}, {0, std::sqrt(0.3)}});
  try {
    synthesize(r, 2, fourier_phase_tensor(2, 2));
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    ASSERT_EQ(e.lambdas().size(), 2u);
    EXPECT_NEAR(e.lambdas()[0], 0.7, 1e-12);
  }
}

TEST(Synthesize, DimensionMismatch) {
  EXPECT_THROW(synthesize(maximally_entangled_resource(2), 2, fourier_phase_tensor(3, 2)),
               DimensionError);
}

TEST(Synthesize, RotatedAndEmbeddedResources) {
  struct Case {
    std::size_t n, n2, n3;
  };
  for (const Case c : {Case{2, 2, 2}, Case{3, 3, 3}, Case{2, 3, 4}, Case{3, 5, 4}, Case{4, 4, 6}}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const ResourceMatrix r = embedded_maximal(c.n, c.n2, c.n3, 100 * seed + c.n2);
      const PhaseTensor phases = fourier_phase_tensor(c.n, c.n2);
      const Protocol p = synthesize(r, c.n, phases);
      const StateVector psi0 = random_state(c.n, seed);
      EXPECT_TRUE(is_unitary(p.unitary.matrix(), 1e-10));
      EXPECT_LE(condition_residual(p.unitary, r, phases, psi0), 1e-10);
      EXPECT_LE(constraint_residual(p.unitary, r, phases), 1e-10);
      EXPECT_GE(min_branch_fidelity(p, psi0, r), 1.0 - 1e-10) << c.n << c.n2 << c.n3;
    }
  }
}

TEST(Synthesize, GeneralPhaseTensors) {
  for (std::size_t n : {2u, 3u, 4u, 5u}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const PhaseTensor c = random_phase_tensor(n, n, seed);
      const ResourceMatrix r = rotated(maximally_entangled_resource(n), seed + 50);
      const Protocol p = synthesize(r, n, c);
      const StateVector psi0 = random_state(n, seed + 7);
      EXPECT_LE(condition_residual(p.unitary, r, c, psi0), 1e-10);
      EXPECT_GE(min_branch_fidelity(p, psi0, r), 1.0 - 1e-10);
    }
  }
}

TEST(ConditionResidual, SynthesizedProtocolsSatisfyConstraint) {
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 8u}) {
    const ResourceMatrix r = maximally_entangled_resource(n);
    const PhaseTensor c = fourier_phase_tensor(n, n);
    const Protocol p = synthesize(r, n, c);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      EXPECT_LE(condition_residual(p.unitary, r, c, random_state(n, seed)), 1e-10);
    }
  }
}

TEST(ConditionResidual, IdentityUnitaryFails) {
  const ProtocolUnitary u = ProtocolUnitary::from_matrix(2, 2, ComplexMatrix::identity(4));
  const double res = condition_residual(u, maximally_entangled_resource(2), fourier_phase_tensor(2, 2),
                                        StateVector(ComplexVector::basis(2, 1)));
  EXPECT_GT(res, 0.1);
  EXPECT_NEAR(res, 0.5, 1e-12);
}

TEST(ConditionResidual, ScalarCase) {
  const ProtocolUnitary u = ProtocolUnitary::from_matrix(1, 1, ComplexMatrix{{1}});
  EXPECT_EQ(condition_residual(u, maximally_entangled_resource(1), fourier_phase_tensor(1, 1),
                               StateVector(ComplexVector{1})),
            0.0);
}

TEST(ConditionResidual, DimensionMismatch) {
  const Protocol p = synthesize(maximally_entangled_resource(2), 2, fourier_phase_tensor(2, 2));
  EXPECT_THROW(condition_residual(p.unitary, maximally_entangled_resource(2), fourier_phase_tensor(2, 2),
                                  random_state(3, 1)),
               DimensionError);
}

TEST(Feasibility, Examples) {
  const FeasibilityVerdict max3 = feasibility(maximally_entangled_resource(3), 3);
  EXPECT_TRUE(max3.feasible);
  for (double l : max3.lambdas) EXPECT_NEAR(l, 1.0 / 3.0, 1e-12);
  const ResourceMatrix weak(ComplexMatrix{{std::sqrt(0.7), 0}, {0, std::sqrt(0.3)}});
  EXPECT_FALSE(feasibility(weak, 2).feasible);
  EXPECT_TRUE(feasibility(injection_resource(2, 4, SupportInjection{{1, 4}}), 2).feasible);
}

TEST(Feasibility, TooSmallResourceIsAVerdict) {
  const FeasibilityVerdict v = feasibility(maximally_entangled_resource(2), 3);
  EXPECT_FALSE(v.feasible);
  EXPECT_FALSE(feasibility(maximally_entangled_resource(4), 2).feasible);
}

TEST(Feasibility, InvariantUnderLocalRotations) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 3;
    const ResourceMatrix generic = resource_from_matrix(random_matrix(n, n, seed));
    const ResourceMatrix maximal = maximally_entangled_resource(n);
    for (const ResourceMatrix& r : {generic, maximal}) {
      const FeasibilityVerdict a = feasibility(r, n);
      const FeasibilityVerdict b = feasibility(rotated(r, seed + 500), n);
      EXPECT_EQ(a.feasible, b.feasible);
      for (std::size_t m = 0; m < n; ++m) EXPECT_NEAR(a.lambdas[m], b.lambdas[m], 1e-10);
    }
    EXPECT_TRUE(feasibility(rotated(maximal, seed), n).feasible);
  }
}

TEST(Feasibility, NonMaximalSpectraAreRejected) {
  for (double l : {0.6, 0.7, 0.9}) {
    const ResourceMatrix r(ComplexMatrix{{std::sqrt(l), 0}, {0, std::sqrt(1 - l)}});
    EXPECT_FALSE(feasibility(r, 2).feasible) << l;
  }
}

TEST(Recovery, Examples) {
  const Protocol p2 = synthesize(maximally_entangled_resource(2), 2, fourier_phase_tensor(2, 2));
  EXPECT_LE(max_abs_diff(recovery_operator(p2.recovery, 1, 1), ComplexMatrix::identity(2)), 0.0);
  EXPECT_LE(max_abs_diff(recovery_operator(p2.recovery, 2, 1), sigma_z()), 1e-12);
  EXPECT_THROW(recovery_operator(p2.recovery, 3, 1), IndexError);
  EXPECT_THROW(recovery_operator(p2.recovery, 1, 0), IndexError);
  const Protocol p5 = synthesize(maximally_entangled_resource(5), 5, fourier_phase_tensor(5, 5));
  for (std::size_t i = 1; i <= 5; ++i) {
    for (std::size_t k = 1; k <= 5; ++k) EXPECT_TRUE(is_unitary(p5.recovery.op(i, k), 1e-10));
  }
}

TEST(PartialSupport, EprPairInFourLevels) {
  for (const std::vector<std::size_t>& targets : {std::vector<std::size_t>{3, 2}, {1, 4}}) {
    const ResourceMatrix r = injection_resource(2, 4, SupportInjection{targets});
    SynthesisOptions opt;
    opt.input_support = {3, 2};
    opt.output_support = targets;
    const PhaseTensor c = fourier_phase_tensor(4, 2);
    const Protocol p = synthesize(r, 4, c, opt);
    EXPECT_TRUE(is_unitary(p.unitary.matrix(), 1e-10));
    const StateVector psi0 =
        StateVector::normalized(ComplexVector{0, Complex(0.3, -0.2), Complex(0.5, 0.4), 0});
    EXPECT_LE(condition_residual(p.unitary, r, c, psi0), 1e-10);
    const TeleportReport rep = execute(p, psi0, r, RunConfig{});
    ASSERT_EQ(rep.branches.size(), 8u);
    for (const BranchRecord& b : rep.branches) {
      EXPECT_NEAR(b.probability, 1.0 / 8.0, 1e-10);
      EXPECT_GE(b.fidelity, 1.0 - 1e-10);
    }
    EXPECT_THROW(p.target(random_state(4, 3)), ValidationError);
  }
}

TEST(PartialSupport, BadSupportsAreRejected) {
  const ResourceMatrix r = injection_resource(2, 4, SupportInjection{{3, 2}});
  SynthesisOptions opt;
  opt.input_support = {3, 3};
  EXPECT_THROW(synthesize(r, 4, fourier_phase_tensor(4, 2), opt), ValidationError);
  opt.input_support = {3, 2};
  opt.output_support = {1};
  EXPECT_THROW(synthesize(r, 4, fourier_phase_tensor(4, 2), opt), ValidationError);
}

TEST(ForcedSynthesis, NonMaximalResourceLosesFidelity) {
  for (double l : {0.6, 0.7, 0.9}) {
    const ResourceMatrix r(ComplexMatrix{{std::sqrt(l), 0}, {0, std::sqrt(1 - l)}});
    SynthesisOptions opt;
    opt.enforce_feasibility = false;
    const Protocol p = synthesize(r, 2, fourier_phase_tensor(2, 2), opt);
    EXPECT_FALSE(p.verdict.feasible);
    const TeleportReport rep = execute(p, random_state(2, 11), r, RunConfig{});
    EXPECT_LT(rep.mean_fidelity, 1.0 - 1e-6) << l;
  }
}
