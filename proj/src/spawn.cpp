#include "streamscore/spawn.hpp"

#include <cmath>
#include <string>

#include "streamscore/units.hpp"

namespace streamscore {

const char* to_string(SpawnMode m) {
  return m == SpawnMode::Simultaneous ? "simultaneous" : "scheduled";
}

SpawnMode parse_spawn_mode(std::string_view s) {
  if (s == "simultaneous") return SpawnMode::Simultaneous;
  if (s == "scheduled") return SpawnMode::Scheduled;
  throw ParseError("mode must be 'simultaneous' or 'scheduled', got '" + std::string(s) + "'");
}

std::vector<double> spawn_schedule(SpawnMode mode, double concurrency, double duration) {
  std::vector<double> times;
  if (!(concurrency > 0.0) || !(duration > 0.0)) return times;
  if (mode == SpawnMode::Simultaneous) {
    const auto per_batch = static_cast<std::size_t>(std::ceil(concurrency));
    for (std::size_t k = 0; static_cast<double>(k) < duration; ++k) {
      times.insert(times.end(), per_batch, static_cast<double>(k));
    }
  } else {
    // 1e-9 keeps 3 clients/s over 3 s at 9 clients despite rounding.
    const auto count = static_cast<std::size_t>(std::ceil(concurrency * duration - 1e-9));
    times.reserve(count);
    for (std::size_t i = 0; i < count; ++i) times.push_back(static_cast<double>(i) / concurrency);
  }
  return times;
}

}  // namespace streamscore
