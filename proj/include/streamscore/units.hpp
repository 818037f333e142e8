#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace streamscore {

/// Raised when a quantity literal cannot be parsed or has the wrong dimension.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical dimension of a quantity literal. Compute covers both FLOP and
/// FLOP/s: the suffix only carries magnitude, the caller decides which.
enum class Dimension { Bytes, ByteRate, Compute, Time };

const char* to_string(Dimension d);

/// A parsed literal in strict SI: bytes, bytes/s, FLOP (or FLOP/s), seconds.
struct Quantity {
  double value = 0.0;
  Dimension dimension = Dimension::Bytes;
};

// Grammar: <decimal number><suffix>, no whitespace inside the number.
//   bytes:    B KB MB GB TB PB (10^3k)   KiB MiB GiB TiB (2^10k)
//   bits/s:   bps Kbps Mbps Gbps Tbps
//   bytes/s:  Bps KBps MBps GBps TBps
//   compute:  FLOP FLOPS KF MF GF TF PF
//   time:     ms s min
// Case-sensitive: "Gbps" is bits, "GBps" is bytes.
Quantity parse_quantity(std::string_view text);

/// Parses and checks the dimension; throws ParseError on mismatch.
double parse_quantity(std::string_view text, Dimension expected);

inline double parse_bytes(std::string_view t) { return parse_quantity(t, Dimension::Bytes); }
inline double parse_rate(std::string_view t) { return parse_quantity(t, Dimension::ByteRate); }
inline double parse_compute(std::string_view t) { return parse_quantity(t, Dimension::Compute); }
inline double parse_seconds(std::string_view t) { return parse_quantity(t, Dimension::Time); }

/// Plain decimal number with no suffix.
double parse_number(std::string_view text);

namespace units {
inline constexpr double kGB = 1e9;
inline constexpr double kTFLOP = 1e12;
constexpr double gbps(double v) { return v * 1e9 / 8.0; }
constexpr double gbytes_per_s(double v) { return v * 1e9; }
}  // namespace units

}  // namespace streamscore
