#include "doctest.h"

#include <numeric>
#include <random>

#include "streamscore/wire.hpp"

using namespace streamscore::wire;

TEST_CASE("header layout is bit-exact") {
  const Header h = encode_header(0x0102030405060708ULL);
  const Header expected{0x53, 0x47, 0x54, 0x45, 0x01, 0x00, 0x00, 0x00,
                        0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08};
  CHECK(h == expected);

  const Header empty = encode_header(0);
  CHECK(decode_header(empty) == 0u);
  CHECK(kAck == 0x06);
}

TEST_CASE("header rejects bad magic and version") {
  Header h = encode_header(42);
  h[0] = 'X';
  CHECK_FALSE(decode_header(h).has_value());
  h = encode_header(42);
  h[4] = 0x02;
  CHECK_FALSE(decode_header(h).has_value());
}

TEST_CASE("property: header round trip") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng();
    CHECK(decode_header(encode_header(v)) == v);
  }
}

TEST_CASE("payload cycles 0x00..0xFF from any offset") {
  std::vector<std::uint8_t> buf(600);
  fill_payload(buf);
  CHECK(buf[0] == 0x00);
  CHECK(buf[255] == 0xFF);
  CHECK(buf[256] == 0x00);
  fill_payload(buf, 250);
  CHECK(buf[5] == 0xFF);
  CHECK(buf[6] == 0x00);
}

TEST_CASE("byte split across flows") {
  CHECK(split_bytes(500'000'000, 4) == std::vector<std::uint64_t>(4, 125'000'000));
  CHECK(split_bytes(10, 3) == std::vector<std::uint64_t>{3, 3, 4});
  CHECK(split_bytes(0, 2) == std::vector<std::uint64_t>{0, 0});
  CHECK_THROWS(split_bytes(1, 0));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t total = rng() >> 20;
    const int flows = 1 + static_cast<int>(rng() % 16);
    const auto parts = split_bytes(total, flows);
    CHECK(std::accumulate(parts.begin(), parts.end(), std::uint64_t{0}) == total);
  }
}
