#include "qtp/session.hpp"

#include <future>
#include <random>
#include <string>

#include "qtp/errors.hpp"
#include "qtp/frame_codec.hpp"
#include "qtp/teleport_engine.hpp"

namespace qtp {

std::pair<SessionResult, SessionResult> run_session_pair(const SessionScenario& scenario,
                                                         const Link& link, std::uint64_t seed) {
  SynthesisOptions options = scenario.options;
  options.enforce_feasibility = true;
  const Protocol protocol =
      synthesize(scenario.resource, scenario.psi0.dim(), scenario.phase, options);
  const StateVector target = protocol.target(scenario.psi0);
  const JointDims dims{protocol.unitary.n1(), protocol.unitary.n2(),
                       scenario.resource.dim_receiver()};

  std::promise<StateVector> handoff;
  std::future<StateVector> handed = handoff.get_future();

  auto alice = std::async(std::launch::async, [&]() {
    std::unique_ptr<ByteStream> stream = link.open_alice();
    const StateVector phi =
        apply_sender_unitary(prepare_joint(scenario.psi0, scenario.resource), protocol.unitary);
    std::mt19937_64 rng(seed);
    Measurement m = measure_alice(phi, dims, rng);

    SessionResult result;
    result.role = SessionResult::Role::alice;
    result.outcome_i = m.outcome_i;
    result.outcome_k = m.outcome_k;
    handoff.set_value(std::move(m.bob_state));

    const OutcomeFrame frame{kFrameVersion, static_cast<std::uint32_t>(dims.n1),
                             static_cast<std::uint32_t>(dims.n2),
                             static_cast<std::uint32_t>(result.outcome_i),
                             static_cast<std::uint32_t>(result.outcome_k)};
    const FrameBytes bytes = encode_frame(frame);
    stream->write(bytes);
    stream->close();
    result.frames_sent = 1;
    return result;
  });

  auto bob = std::async(std::launch::async, [&]() {
    std::unique_ptr<ByteStream> stream = link.open_bob();
    FrameBytes bytes{};
    const std::size_t got = read_exact(*stream, bytes);
    if (got < kFrameSize) {
      throw SessionError("stream closed after " + std::to_string(got) + " of " +
                         std::to_string(kFrameSize) + " frame bytes");
    }
    const OutcomeFrame frame = decode_frame(bytes);
    if (frame.n1 != dims.n1 || frame.n2 != dims.n2) {
      throw ProtocolError("frame dimensions do not match the session");
    }
    SessionResult result;
    result.role = SessionResult::Role::bob;
    result.frames_received = 1;
    result.outcome_i = frame.outcome_i;
    result.outcome_k = frame.outcome_k;
    const StateVector bob_state = handed.get();
    const StateVector out = recover(bob_state, protocol.recovery, frame.outcome_i, frame.outcome_k);
    result.final_fidelity = fidelity(out, target);
    result.recovered_state = out;
    return result;
  });

  alice.wait();
  bob.wait();
  SessionResult a = alice.get();
  SessionResult b = bob.get();
  return {a, b};
}

std::pair<SessionResult, SessionResult> run_session_pair(const SessionScenario& scenario,
                                                         const TransportSpec& transport,
                                                         std::uint64_t seed) {
  return run_session_pair(scenario, make_link(transport), seed);
}

}  // namespace qtp
