#include "qtp/frame_codec.hpp"

#include <string>

#include <zlib.h>

#include "qtp/errors.hpp"

namespace qtp {
namespace {

void put_u32(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 24);
  out[1] = static_cast<std::uint8_t>(v >> 16);
  out[2] = static_cast<std::uint8_t>(v >> 8);
  out[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t get_u32(const std::uint8_t* in) {
  return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) |
         (std::uint32_t{in[2]} << 8) | std::uint32_t{in[3]};
}

void check_bounds(const OutcomeFrame& f) {
  if (f.outcome_i < 1 || f.outcome_i > f.n1 || f.outcome_k < 1 || f.outcome_k > f.n2) {
    throw ValidationError("outcome (" + std::to_string(f.outcome_i) + "," +
                          std::to_string(f.outcome_k) + ") outside 1.." + std::to_string(f.n1) +
                          " x 1.." + std::to_string(f.n2));
  }
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

FrameBytes encode_frame(const OutcomeFrame& frame) {
  check_bounds(frame);
  FrameBytes out{};
  out[0] = kFrameMagic[0];
  out[1] = kFrameMagic[1];
  out[2] = frame.version;
  put_u32(&out[3], frame.n1);
  put_u32(&out[7], frame.n2);
  put_u32(&out[11], frame.outcome_i);
  put_u32(&out[15], frame.outcome_k);
  put_u32(&out[19], crc32(std::span(out).first(19)));
  return out;
}

OutcomeFrame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameSize) {
    throw IncompleteFrameError("frame needs " + std::to_string(kFrameSize) + " bytes, got " +
                               std::to_string(bytes.size()));
  }
  if (bytes[0] != kFrameMagic[0] || bytes[1] != kFrameMagic[1]) {
    throw ProtocolError("bad frame magic");
  }
  if (bytes[2] != kFrameVersion) {
    throw ProtocolError("unsupported frame version " + std::to_string(bytes[2]));
  }
  const std::uint32_t expected = get_u32(&bytes[19]);
  if (crc32(bytes.first(19)) != expected) throw CorruptionError("frame checksum mismatch");

  OutcomeFrame frame;
  frame.version = bytes[2];
  frame.n1 = get_u32(&bytes[3]);
  frame.n2 = get_u32(&bytes[7]);
  frame.outcome_i = get_u32(&bytes[11]);
  frame.outcome_k = get_u32(&bytes[15]);
  check_bounds(frame);
  return frame;
}

}  // namespace qtp
