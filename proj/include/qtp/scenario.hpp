#pragma once

// Scenario files: INI-style sections of key = value pairs.
//
//   [scenario]  name, description
//   [dims]      n1, n2, n3
//   [resource]  kind = maximal | epr-product | injection | matrix
//               m = <pairs>                      (epr-product)
//               logical = <n1>, map = 1:3 2:2    (injection)
//               row1 .. row<n2> = re,im re,im .. (matrix)
//   [phase]     kind = fourier | explicit
//               slice<k>_row<s> = re,im ..       (explicit)
//   [input]     kind = random | amplitudes | basis
//               seed, amplitudes = re,im .., index
//               support = <H1 indices>, output_support = <H3 indices>
//   [run]       mode = exhaustive | sampled | session
//               count, seed, transport = memory | tcp:<host>:<port>
//
// Lines starting with ';' or '#' are comments.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtp/byte_stream.hpp"
#include "qtp/errors.hpp"
#include "qtp/protocol_synthesis.hpp"
#include "qtp/report.hpp"
#include "qtp/state_factory.hpp"
#include "qtp/teleport_engine.hpp"

namespace qtp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitInfeasible = 2;

// Default slack on branch fidelity for a passing run.
inline constexpr double kDefaultRunTolerance = 1e-8;

struct ResourceSpec {
  enum class Kind { maximal, epr_product, injection, matrix };
  Kind kind = Kind::maximal;
  std::size_t pairs = 0;
  SupportInjection injection;
  ComplexMatrix matrix;
};

struct PhaseSpec {
  enum class Kind { fourier, explicit_tensor };
  Kind kind = Kind::fourier;
  std::vector<Complex> entries;  // PhaseTensor layout, explicit only
};

struct InputSpec {
  enum class Kind { random, amplitudes, basis };
  Kind kind = Kind::random;
  std::uint64_t seed = 0;
  std::vector<Complex> amplitudes;
  std::size_t index = 0;
  std::vector<std::size_t> support;
  std::vector<std::size_t> output_support;
};

struct ModeSpec {
  RunMode mode = RunMode::exhaustive;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  TransportSpec transport;
};

struct Scenario {
  std::string name;
  std::string description;
  JointDims dims;
  ResourceSpec resource;
  PhaseSpec phase;
  InputSpec input;
  ModeSpec run;
};

// Thrown for malformed or inconsistent scenario files; the message names the
// file, line or [section] key at fault.
class ScenarioError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

// Concrete protocol inputs described by a scenario.
struct ScenarioInputs {
  StateVector psi0;
  ResourceMatrix resource;
  PhaseTensor phase;
  SynthesisOptions options;
};

ScenarioInputs build_inputs(const Scenario& scenario);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<TransportSpec> transport;
  double tolerance = kDefaultRunTolerance;
};

struct ScenarioOutcome {
  int exit_code = kExitOk;
  std::optional<TeleportReport> report;
  FeasibilityVerdict verdict;
  std::string message;
};

// Validation problems inside the scenario surface as ScenarioError /
// ValidationError; infeasible resources give exit code kExitInfeasible.
ScenarioOutcome run_scenario(const Scenario& scenario, const RunOverrides& overrides = {});

struct VerifyOutcome {
  int exit_code = kExitOk;
  FeasibilityVerdict verdict;
  double condition_residual = 0.0;
  double constraint_residual = 0.0;
  double unitarity_defect = 0.0;  // worst over U and every recovery operator
};

// Synthesis plus constraint and unitarity checks, without simulation.
VerifyOutcome verify_scenario(const Scenario& scenario, double tolerance = kNumericTol);

// Recovery-operator labels for reports on this scenario.
RecoveryLabeler labeler_for(const Scenario& scenario, const ScenarioInputs& inputs);

}  // namespace qtp
