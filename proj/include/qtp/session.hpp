#pragma once

// Paired sender/receiver driver. The quantum state lives in one in-process
// engine; only the 23-byte outcome frame crosses the transport. The receiver
// gets its collapsed state as a value handed over by the sender, never through
// shared mutation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "qtp/byte_stream.hpp"
#include "qtp/protocol_synthesis.hpp"
#include "qtp/state_factory.hpp"

namespace qtp {

struct SessionScenario {
  StateVector psi0;
  ResourceMatrix resource;
  PhaseTensor phase;
  SynthesisOptions options;
};

struct SessionResult {
  enum class Role { alice, bob };

  Role role = Role::alice;
  std::size_t frames_sent = 0;
  std::size_t frames_received = 0;
  std::size_t outcome_i = 0;
  std::size_t outcome_k = 0;
  // Receiver only.
  std::optional<StateVector> recovered_state;
  std::optional<double> final_fidelity;
};

// Runs both roles concurrently over `link`. Errors from either side are
// rethrown to the caller (sender first): SessionError when the stream ends
// before a full frame, CorruptionError / ProtocolError from frame decoding,
// FeasibilityError from synthesis.
std::pair<SessionResult, SessionResult> run_session_pair(const SessionScenario& scenario,
                                                         const Link& link, std::uint64_t seed);

std::pair<SessionResult, SessionResult> run_session_pair(const SessionScenario& scenario,
                                                         const TransportSpec& transport,
                                                         std::uint64_t seed);

}  // namespace qtp
