#pragma once

// Client -> server preamble, per connection:
//
//   offset 0  "SGTE" (0x53 0x47 0x54 0x45)
//   offset 4  version 0x01
//   offset 5  3 reserved bytes, zero
//   offset 8  payload length, uint64 big-endian
//
// followed by exactly `length` payload bytes cycling 0x00..0xFF. The server
// answers with a single 0x06 once the whole payload has arrived.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace streamscore::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic{0x53, 0x47, 0x54, 0x45};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::uint8_t kAck = 0x06;

using Header = std::array<std::uint8_t, kHeaderSize>;

Header encode_header(std::uint64_t payload_length);

/// Payload length, or nullopt for a bad magic or version.
std::optional<std::uint64_t> decode_header(std::span<const std::uint8_t, kHeaderSize> header);

/// Pattern byte at absolute payload offset.
constexpr std::uint8_t payload_byte(std::uint64_t offset) {
  return static_cast<std::uint8_t>(offset & 0xFF);
}

/// Fills buf with the pattern starting at payload offset `offset`.
void fill_payload(std::span<std::uint8_t> buf, std::uint64_t offset = 0);

/// Even split across flows; the remainder goes to the last flow.
std::vector<std::uint64_t> split_bytes(std::uint64_t total, int flows);

}  // namespace streamscore::wire
