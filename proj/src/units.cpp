#include "streamscore/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace streamscore {

namespace {

struct Suffix {
  std::string_view text;
  double scale;
  Dimension dimension;
};

constexpr std::array<Suffix, 30> kSuffixes{{
    {"B", 1.0, Dimension::Bytes},
    {"KB", 1e3, Dimension::Bytes},
    {"MB", 1e6, Dimension::Bytes},
    {"GB", 1e9, Dimension::Bytes},
    {"TB", 1e12, Dimension::Bytes},
    {"PB", 1e15, Dimension::Bytes},
    {"KiB", 1024.0, Dimension::Bytes},
    {"MiB", 1048576.0, Dimension::Bytes},
    {"GiB", 1073741824.0, Dimension::Bytes},
    {"TiB", 1099511627776.0, Dimension::Bytes},
    {"bps", 1.0 / 8.0, Dimension::ByteRate},
    {"Kbps", 1e3 / 8.0, Dimension::ByteRate},
    {"Mbps", 1e6 / 8.0, Dimension::ByteRate},
    {"Gbps", 1e9 / 8.0, Dimension::ByteRate},
    {"Tbps", 1e12 / 8.0, Dimension::ByteRate},
    {"Bps", 1.0, Dimension::ByteRate},
    {"KBps", 1e3, Dimension::ByteRate},
    {"MBps", 1e6, Dimension::ByteRate},
    {"GBps", 1e9, Dimension::ByteRate},
    {"TBps", 1e12, Dimension::ByteRate},
    {"FLOP", 1.0, Dimension::Compute},
    {"FLOPS", 1.0, Dimension::Compute},
    {"KF", 1e3, Dimension::Compute},
    {"MF", 1e6, Dimension::Compute},
    {"GF", 1e9, Dimension::Compute},
    {"TF", 1e12, Dimension::Compute},
    {"PF", 1e15, Dimension::Compute},
    {"ms", 1e-3, Dimension::Time},
    {"s", 1.0, Dimension::Time},
    {"min", 60.0, Dimension::Time},
}};

// Splits "12.5GB" into the numeric prefix and the suffix.
std::pair<double, std::string_view> split_number(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr == first) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite quantity: '" + std::string(text) + "'");
  }
  return {value, std::string_view(ptr, static_cast<std::size_t>(last - ptr))};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::Bytes: return "bytes";
    case Dimension::ByteRate: return "rate";
    case Dimension::Compute: return "compute";
    case Dimension::Time: return "time";
  }
  return "?";
}

Quantity parse_quantity(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ParseError("empty quantity");
  auto [value, suffix] = split_number(text);
  suffix = trim(suffix);
  if (suffix.empty()) {
    throw ParseError("missing unit suffix: '" + std::string(text) + "'");
  }
  for (const auto& s : kSuffixes) {
    if (s.text == suffix) return {value * s.scale, s.dimension};
  }
  throw ParseError("unknown unit '" + std::string(suffix) + "' in '" + std::string(text) + "'");
}

double parse_quantity(std::string_view text, Dimension expected) {
  Quantity q = parse_quantity(text);
  if (q.dimension != expected) {
    throw ParseError("'" + std::string(trim(text)) + "' is a " + to_string(q.dimension) +
                     " quantity, expected " + to_string(expected));
  }
  return q.value;
}

double parse_number(std::string_view text) {
  text = trim(text);
  auto [value, rest] = split_number(text);
  if (!rest.empty()) throw ParseError("unexpected trailing text in '" + std::string(text) + "'");
  return value;
}

}  // namespace streamscore
