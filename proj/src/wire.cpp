#include "streamscore/wire.hpp"

#include <algorithm>
#include <stdexcept>

namespace streamscore::wire {

Header encode_header(std::uint64_t payload_length) {
  Header h{};
  std::copy(kMagic.begin(), kMagic.end(), h.begin());
  h[4] = kVersion;
  for (int i = 0; i < 8; ++i) {
    h[8 + i] = static_cast<std::uint8_t>(payload_length >> (56 - 8 * i));
  }
  return h;
}

std::optional<std::uint64_t> decode_header(std::span<const std::uint8_t, kHeaderSize> header) {
  if (!std::equal(kMagic.begin(), kMagic.end(), header.begin())) return std::nullopt;
  if (header[4] != kVersion) return std::nullopt;
  std::uint64_t length = 0;
  for (int i = 0; i < 8; ++i) length = (length << 8) | header[8 + i];
  return length;
}

void fill_payload(std::span<std::uint8_t> buf, std::uint64_t offset) {
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = payload_byte(offset + i);
}

std::vector<std::uint64_t> split_bytes(std::uint64_t total, int flows) {
  if (flows <= 0) throw std::invalid_argument("flows must be > 0");
  const auto n = static_cast<std::uint64_t>(flows);
  std::vector<std::uint64_t> parts(n, total / n);
  parts.back() += total % n;
  return parts;
}

}  // namespace streamscore::wire
