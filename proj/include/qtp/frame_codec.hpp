#pragma once

// Wire format of the outcome message (23 bytes, big-endian):
//
//   offset  size  field
//        0     2  magic "QT" (0x51 0x54)
//        2     1  version
//        3     4  n1
//        7     4  n2
//       11     4  outcome i (1-based)
//       15     4  outcome k (1-based)
//       19     4  CRC-32 of bytes 0..18 (IEEE 802.3, reflected)

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace qtp {

inline constexpr std::size_t kFrameSize = 23;
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::array<std::uint8_t, 2> kFrameMagic{0x51, 0x54};

struct OutcomeFrame {
  std::uint8_t version = kFrameVersion;
  std::uint32_t n1 = 0;
  std::uint32_t n2 = 0;
  std::uint32_t outcome_i = 0;
  std::uint32_t outcome_k = 0;

  friend bool operator==(const OutcomeFrame&, const OutcomeFrame&) = default;
};

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// Throws ValidationError for outcomes outside 1..n1 x 1..n2.
FrameBytes encode_frame(const OutcomeFrame& frame);

// Checks, in order: length (IncompleteFrameError), magic and version
// (ProtocolError), checksum (CorruptionError), outcome bounds (ValidationError).
// Bytes past the first frame are ignored.
OutcomeFrame decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace qtp
