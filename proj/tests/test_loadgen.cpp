#include "doctest.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <sstream>

#include "streamscore/analysis.hpp"
#include "streamscore/loadgen.hpp"
#include "streamscore/wire.hpp"

using namespace streamscore;
using namespace streamscore::loadgen;

namespace {

// Ports in the dynamic range, away from the 5201 default.
constexpr std::uint16_t kBase = 47310;

int connect_local(std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_port = htons(port);
  a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&a), sizeof a) != 0) {
    ::close(fd);
    return -1;
  }
  timeval tv{5, 0};
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  return fd;
}

bool can_bind(std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_port = htons(port);
  a.sin_addr.s_addr = htonl(INADDR_ANY);
  const bool ok = ::bind(fd, reinterpret_cast<sockaddr*>(&a), sizeof a) == 0 && ::listen(fd, 1) == 0;
  ::close(fd);
  return ok;
}

ServerConfig local_pool(std::uint16_t base, int size) {
  ServerConfig c;
  c.base_port = base;
  c.pool_size = size;
  c.bind_address = "127.0.0.1";
  return c;
}

}  // namespace

TEST_CASE("pool listens on sequential ports") {
  Server server(local_pool(kBase, 8));
  server.start();
  const auto ports = server.ports();
  REQUIRE(ports.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(ports[static_cast<std::size_t>(i)] == kBase + i);
    const int fd = connect_local(static_cast<std::uint16_t>(kBase + i));
    CHECK(fd >= 0);
    ::close(fd);
  }
  server.stop();
}

TEST_CASE("single-listener pool") {
  Server server(local_pool(kBase + 20, 1));
  server.start();
  CHECK(server.ports() == std::vector<std::uint16_t>{static_cast<std::uint16_t>(kBase + 20)});
}

TEST_CASE("port conflict fails fast and releases earlier ports") {
  const std::uint16_t base = kBase + 30;
  Server blocker(local_pool(base + 2, 1));
  blocker.start();

  Server server(local_pool(base, 4));
  try {
    server.start();
    FAIL("expected bind failure");
  } catch (const SocketError& e) {
    CHECK(std::string(e.what()).find(std::to_string(base + 2)) != std::string::npos);
  }
  CHECK(server.ports().empty());
  CHECK(can_bind(base));
  CHECK(can_bind(base + 1));
}

TEST_CASE("protocol: empty payload acknowledged, bad magic dropped") {
  const std::uint16_t port = kBase + 40;
  Server server(local_pool(port, 1));
  server.start();

  {
    const int fd = connect_local(port);
    REQUIRE(fd >= 0);
    const auto h = wire::encode_header(0);
    REQUIRE(::send(fd, h.data(), h.size(), 0) == 16);
    std::uint8_t ack = 0;
    CHECK(::recv(fd, &ack, 1, 0) == 1);
    CHECK(ack == wire::kAck);
    ::close(fd);
  }
  {
    const int fd = connect_local(port);
    REQUIRE(fd >= 0);
    auto h = wire::encode_header(10);
    h[1] = 'X';
    REQUIRE(::send(fd, h.data(), h.size(), 0) == 16);
    std::uint8_t ack = 0;
    CHECK(::recv(fd, &ack, 1, 0) == 0);  // closed without acknowledgment
    ::close(fd);
  }
  {
    const int fd = connect_local(port);
    REQUIRE(fd >= 0);
    auto h = wire::encode_header(1000);
    std::vector<std::uint8_t> payload(1000);
    wire::fill_payload(payload);
    REQUIRE(::send(fd, h.data(), h.size(), 0) == 16);
    REQUIRE(::send(fd, payload.data(), payload.size(), 0) == 1000);
    std::uint8_t ack = 0;
    CHECK(::recv(fd, &ack, 1, 0) == 1);
    CHECK(ack == wire::kAck);
    ::close(fd);
  }
  const auto st = server.stats();
  CHECK(st.rejected == 1);
  CHECK(st.acknowledged == 2);
  CHECK(st.payload_bytes == 1000);
}

TEST_CASE("loopback run: one record per client, exact byte audit") {
  const std::uint16_t port = kBase + 50;
  Server server(local_pool(port, 4));
  server.start();

  ClientRunConfig c;
  c.base_port = port;
  c.pool_size = 4;
  c.duration = 1;
  c.concurrency = 3;
  c.parallel_flows = 3;
  c.transfer_bytes = 1'000'001;  // remainder goes to the last flow
  c.mode = SpawnMode::Simultaneous;

  std::ostringstream stream;
  const TransferLog log = run_clients(c, &stream);
  REQUIRE(log.records.size() == 3);
  for (const auto& r : log.records) {
    CHECK(r.ok);
    CHECK(r.bytes == 1'000'001u);
    CHECK(r.flows == 3);
    CHECK(r.fct_s > 0.0);
    CHECK(r.complete_s >= r.spawn_s);
  }
  server.stop();
  CHECK(server.stats().payload_bytes == 3u * 1'000'001u);
  CHECK(server.stats().acknowledged == 9);

  std::istringstream in(stream.str());
  const TransferLog parsed = read_log(in);
  CHECK(parsed.records.size() == 3);
  CHECK(parsed.run["transfer_bytes"] == 1'000'001);
  CHECK(parsed.run.contains("started_unix_ms"));
  const auto echoed = client_config_from_json(parsed.run);
  CHECK(config_to_json(echoed) == config_to_json(c));
}

TEST_CASE("unreachable server yields error records excluded from statistics") {
  ClientRunConfig c;
  c.base_port = kBase + 60;  // nothing listens here
  c.pool_size = 1;
  c.duration = 1;
  c.concurrency = 2;
  c.parallel_flows = 2;
  c.transfer_bytes = 1000;
  c.connect_timeout = 1.0;
  const TransferLog log = run_clients(c);
  REQUIRE(log.records.size() == 2);
  for (const auto& r : log.records) {
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.error.empty());
  }
  CHECK_THROWS(analysis::summarize(log.records));
}

TEST_CASE("scheduled spawning keeps its spacing") {
  const std::uint16_t port = kBase + 70;
  Server server(local_pool(port, 2));
  server.start();
  ClientRunConfig c;
  c.base_port = port;
  c.pool_size = 2;
  c.duration = 1;
  c.concurrency = 5;
  c.parallel_flows = 1;
  c.transfer_bytes = 10'000;
  c.mode = SpawnMode::Scheduled;
  const TransferLog log = run_clients(c);
  REQUIRE(log.records.size() == 5);
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    const double gap = log.records[i].spawn_s - log.records[i - 1].spawn_s;
    CHECK(std::abs(gap - 0.2) <= 0.010);
  }
}

TEST_CASE("interface counters hook") {
  CHECK_FALSE(read_interface_counters("../etc").has_value());
  CHECK_FALSE(read_interface_counters("no-such-iface0").has_value());
  if (auto lo = read_interface_counters("lo")) CHECK(lo->rx_bytes >= 0u);
}
