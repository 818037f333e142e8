#pragma once

#include <string_view>
#include <vector>

namespace streamscore {

/// Simultaneous: ceil(concurrency) clients at every whole second in
/// [0, duration). Scheduled: one client every 1/concurrency seconds.
enum class SpawnMode { Simultaneous, Scheduled };

const char* to_string(SpawnMode m);
SpawnMode parse_spawn_mode(std::string_view s);

/// Spawn offsets in seconds, in client-id order.
std::vector<double> spawn_schedule(SpawnMode mode, double concurrency, double duration);

}  // namespace streamscore
