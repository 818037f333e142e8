#pragma once

// Fluid (flow-level) simulation of one bottleneck link shared max-min fairly
// among active clients. Deterministic: identical scenarios give bit-identical
// results.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamscore/flow_record.hpp"
#include "streamscore/model.hpp"
#include "streamscore/spawn.hpp"

namespace streamscore::fluidsim {

using streamscore::parse_spawn_mode;
using streamscore::SpawnMode;
using streamscore::to_string;

struct Scenario {
  LinkSpec link{3.125e9, 1.0, 0.016};
  double duration = 10.0;        // seconds of spawning
  double concurrency = 1.0;      // clients per second
  int parallel_flows = 1;        // connections per client
  double transfer_bytes = 0.5e9; // per client
  SpawnMode mode = SpawnMode::Simultaneous;
  double startup_latency = 0.016;  // seconds before a client moves data

  void validate() const;
  double capacity() const { return link.effective_rate(); }
  /// concurrency * transfer_bytes / bandwidth.
  double offered_load() const;
};

/// Interval over which the active set did not change.
struct RateSegment {
  double begin = 0.0;
  double end = 0.0;
  std::size_t active = 0;
  double per_client_rate = 0.0;  // bytes/s
};

struct SimResult {
  std::vector<FlowRecord> records;  // ordered by client_id
  std::vector<RateSegment> segments;
  double utilization = 0.0;  // delivered / (bandwidth * [first spawn, last completion])
  double offered_load = 0.0;
  double max_fct = 0.0;
};

/// Spawn instants in client-id order.
std::vector<double> spawn_times(const Scenario& s);

SimResult simulate(const Scenario& s);

double worst_fct(const SimResult& r);

struct SweepRow {
  double concurrency = 0.0;
  int parallel_flows = 0;
  SpawnMode mode = SpawnMode::Simultaneous;
  double offered_load = 0.0;
  double utilization = 0.0;
  double worst_fct = 0.0;
  double sss = 0.0;
  std::size_t clients = 0;
};

/// One simulation per (concurrency, parallel) pair, concurrency-major. Runs
/// the combinations in parallel with OpenMP; rows keep input order.
std::vector<SweepRow> sweep(const Scenario& base, const std::vector<double>& concurrency_values,
                            const std::vector<int>& parallel_values);

/// Single-threaded reference for sweep(); results must match bit for bit.
std::vector<SweepRow> sweep_serial(const Scenario& base,
                                   const std::vector<double>& concurrency_values,
                                   const std::vector<int>& parallel_values);

// Scenario files: "key = value" lines ('#' comments) or a JSON object, both
// using the Scenario field names. Values are quantity literals ("25Gbps",
// "0.5GB", "16ms") or bare SI numbers.
Scenario scenario_from_json(const nlohmann::json& j, Scenario base = {});
Scenario scenario_from_kv(std::string_view text, Scenario base = {});
Scenario load_scenario_file(const std::string& path, Scenario base = {});
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace streamscore::fluidsim
