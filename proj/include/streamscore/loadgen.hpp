#pragma once

// Live measurement harness: a pool of listeners on sequential ports and a
// client orchestrator that spawns transfer clients on a schedule and logs one
// FlowRecord per client.

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamscore/flow_record.hpp"
#include "streamscore/spawn.hpp"

namespace streamscore::loadgen {

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerConfig {
  std::uint16_t base_port = 5201;
  int pool_size = 8;
  std::string bind_address = "0.0.0.0";
  double idle_timeout = 120.0;  // seconds a connection may sit without data
};

struct ServerStats {
  std::uint64_t connections = 0;
  std::uint64_t acknowledged = 0;
  std::uint64_t rejected = 0;
  std::uint64_t payload_bytes = 0;
};

/// Listener pool. start() binds every port or none: if any bind fails, the
/// ports already opened are released and SocketError names the culprit.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void start();
  /// Closes listeners, interrupts open connections, joins all threads.
  void stop();

  const ServerConfig& config() const { return config_; }
  std::vector<std::uint16_t> ports() const;
  /// Live counters; after stop(), the totals at shutdown.
  ServerStats stats() const;

 private:
  struct Impl;
  ServerConfig config_;
  std::unique_ptr<Impl> impl_;
  ServerStats final_stats_;
};

/// Binds, then blocks until `should_stop` returns true (polled every 100 ms).
void serve(const ServerConfig& config, const std::function<bool()>& should_stop);

struct ClientRunConfig {
  std::string server_address = "127.0.0.1";
  std::uint16_t base_port = 5201;
  int pool_size = 8;
  double duration = 10.0;
  double concurrency = 1.0;
  int parallel_flows = 1;
  std::uint64_t transfer_bytes = 500'000'000;
  SpawnMode mode = SpawnMode::Simultaneous;
  double connect_timeout = 10.0;
  double transfer_timeout = 120.0;
  std::optional<std::string> interface;  // sample /sys/class/net counters

  void validate() const;
};

nlohmann::json config_to_json(const ClientRunConfig& c);
/// Inverse of config_to_json; extra header keys are ignored.
ClientRunConfig client_config_from_json(const nlohmann::json& j);

/// Spawns every client, waits for all of them, and returns the log ordered by
/// client_id. If `stream` is set, the header and each record are written to it
/// as they arrive (completion order).
TransferLog run_clients(const ClientRunConfig& config, std::ostream* stream = nullptr);

/// Byte/packet counters of a network interface, where the platform exposes them.
struct InterfaceCounters {
  std::uint64_t rx_bytes = 0;
  std::uint64_t tx_bytes = 0;
  std::uint64_t rx_packets = 0;
  std::uint64_t tx_packets = 0;
};

/// Linux reads /sys/class/net/<iface>/statistics; nullopt if unavailable.
std::optional<InterfaceCounters> read_interface_counters(const std::string& iface);

}  // namespace streamscore::loadgen
