#include "streamscore/loadgen.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <list>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "streamscore/wire.hpp"

namespace streamscore::loadgen {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kChunk = 256 * 1024;  // multiple of 256 keeps the pattern aligned

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

std::string errno_text(int err) { return std::strerror(err); }

void set_io_timeout(int fd, double seconds) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(seconds);
  tv.tv_usec = static_cast<suseconds_t>((seconds - std::floor(seconds)) * 1e6);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

// Reads exactly buf.size() bytes; false on EOF, error, or timeout.
bool read_exact(int fd, std::uint8_t* buf, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::recv(fd, buf + got, len - got, 0);
    if (n > 0) {
      got += static_cast<std::size_t>(n);
    } else if (n < 0 && errno == EINTR) {
      continue;
    } else {
      return false;
    }
  }
  return true;
}

bool write_all(int fd, const std::uint8_t* buf, std::size_t len) {
  std::size_t sent = 0;
  while (sent < len) {
    const ssize_t n = ::send(fd, buf + sent, len - sent, MSG_NOSIGNAL);
    if (n > 0) {
      sent += static_cast<std::size_t>(n);
    } else if (n < 0 && errno == EINTR) {
      continue;
    } else {
      return false;
    }
  }
  return true;
}

Fd open_listener(const std::string& address, std::uint16_t port) {
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) throw SocketError("socket: " + errno_text(errno));
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, address.c_str(), &addr.sin_addr) != 1) {
    throw SocketError("invalid bind address '" + address + "'");
  }
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw SocketError("port " + std::to_string(port) + ": bind failed: " + errno_text(errno));
  }
  if (::listen(fd.get(), 128) != 0) {
    throw SocketError("port " + std::to_string(port) + ": listen failed: " + errno_text(errno));
  }
  return fd;
}

}  // namespace

// --- server -----------------------------------------------------------------

struct Server::Impl {
  struct Handler {
    std::thread thread;
    std::atomic<bool> done{false};
    int fd = -1;
  };

  std::vector<Fd> listeners;
  std::vector<std::uint16_t> ports;
  std::vector<std::thread> acceptors;
  std::atomic<bool> stopping{false};

  std::mutex handlers_mu;
  std::list<Handler> handlers;

  std::atomic<std::uint64_t> connections{0};
  std::atomic<std::uint64_t> acknowledged{0};
  std::atomic<std::uint64_t> rejected{0};
  std::atomic<std::uint64_t> payload_bytes{0};

  double idle_timeout = 120.0;

  void handle(int fd) {
    set_io_timeout(fd, idle_timeout);
    wire::Header header{};
    if (!read_exact(fd, header.data(), header.size())) return;
    const auto length = wire::decode_header(header);
    if (!length) {
      rejected.fetch_add(1, std::memory_order_relaxed);
      return;
    }
    std::vector<std::uint8_t> scratch(kChunk);
    std::uint64_t remaining = *length;
    while (remaining > 0) {
      const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kChunk));
      const ssize_t n = ::recv(fd, scratch.data(), want, 0);
      if (n > 0) {
        remaining -= static_cast<std::uint64_t>(n);
        payload_bytes.fetch_add(static_cast<std::uint64_t>(n), std::memory_order_relaxed);
      } else if (n < 0 && errno == EINTR) {
        continue;
      } else {
        return;
      }
    }
    const std::uint8_t ack = wire::kAck;
    if (write_all(fd, &ack, 1)) acknowledged.fetch_add(1, std::memory_order_relaxed);
  }

  void reap_finished() {
    std::lock_guard lock(handlers_mu);
    for (auto it = handlers.begin(); it != handlers.end();) {
      if (it->done.load()) {
        it->thread.join();
        it = handlers.erase(it);
      } else {
        ++it;
      }
    }
  }

  void accept_loop(int listen_fd) {
    while (!stopping.load()) {
      pollfd p{listen_fd, POLLIN, 0};
      const int ready = ::poll(&p, 1, 100);
      reap_finished();
      if (ready <= 0 || stopping.load()) continue;
      const int fd = ::accept4(listen_fd, nullptr, nullptr, SOCK_CLOEXEC);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      connections.fetch_add(1, std::memory_order_relaxed);
      std::lock_guard lock(handlers_mu);
      Handler& h = handlers.emplace_back();
      h.fd = fd;
      h.thread = std::thread([this, &h] {
        handle(h.fd);
        {
          // Closing under the lock keeps stop() from shutting down a reused fd.
          std::lock_guard inner(handlers_mu);
          ::close(h.fd);
          h.fd = -1;
        }
        h.done.store(true);
      });
    }
  }
};

Server::Server(ServerConfig config) : config_(std::move(config)) {}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_) throw SocketError("server already started");
  if (config_.pool_size <= 0) throw SocketError("pool_size must be > 0");
  if (static_cast<int>(config_.base_port) + config_.pool_size - 1 > 65535) {
    throw SocketError("port range exceeds 65535");
  }
  auto impl = std::make_unique<Impl>();
  impl->idle_timeout = config_.idle_timeout;
  // Any failure here destroys impl, closing the listeners opened so far.
  for (int i = 0; i < config_.pool_size; ++i) {
    const auto port = static_cast<std::uint16_t>(config_.base_port + i);
    impl->listeners.push_back(open_listener(config_.bind_address, port));
    impl->ports.push_back(port);
  }
  for (auto& l : impl->listeners) {
    impl->acceptors.emplace_back([p = impl.get(), fd = l.get()] { p->accept_loop(fd); });
  }
  impl_ = std::move(impl);
}

void Server::stop() {
  if (!impl_) return;
  impl_->stopping.store(true);
  for (auto& t : impl_->acceptors) t.join();
  {
    std::lock_guard lock(impl_->handlers_mu);
    for (auto& h : impl_->handlers) {
      if (h.fd >= 0) ::shutdown(h.fd, SHUT_RDWR);
    }
  }
  // Handlers re-take the lock to close their fd, so join outside it.
  for (auto& h : impl_->handlers) h.thread.join();
  final_stats_ = stats();
  impl_.reset();
}

std::vector<std::uint16_t> Server::ports() const {
  return impl_ ? impl_->ports : std::vector<std::uint16_t>{};
}

ServerStats Server::stats() const {
  if (!impl_) return final_stats_;
  return {impl_->connections.load(), impl_->acknowledged.load(), impl_->rejected.load(),
          impl_->payload_bytes.load()};
}

void serve(const ServerConfig& config, const std::function<bool()>& should_stop) {
  Server server(config);
  server.start();
  while (!should_stop()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
}

// --- client -----------------------------------------------------------------

namespace {

Fd connect_with_timeout(const std::string& host, std::uint16_t port, double timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw SocketError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);

  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    Fd fd(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC | SOCK_NONBLOCK, ai->ai_protocol));
    if (!fd) {
      last_error = errno_text(errno);
      continue;
    }
    int rc = ::connect(fd.get(), ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd p{fd.get(), POLLOUT, 0};
      rc = ::poll(&p, 1, static_cast<int>(timeout * 1000));
      if (rc == 0) {
        last_error = "connect timeout";
        continue;
      }
      int err = 0;
      socklen_t len = sizeof err;
      ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
      if (err != 0) {
        last_error = errno_text(err);
        continue;
      }
    } else if (rc != 0) {
      last_error = errno_text(errno);
      continue;
    }
    const int flags = ::fcntl(fd.get(), F_GETFL);
    ::fcntl(fd.get(), F_SETFL, flags & ~O_NONBLOCK);
    return fd;
  }
  throw SocketError("connect " + host + ":" + service + ": " + last_error);
}

// One connection: header, payload, wait for the acknowledgment.
void run_flow(const ClientRunConfig& c, std::uint16_t port, std::uint64_t bytes) {
  Fd fd = connect_with_timeout(c.server_address, port, c.connect_timeout);
  set_io_timeout(fd.get(), c.transfer_timeout);
  const auto deadline = Clock::now() + std::chrono::duration<double>(c.transfer_timeout);

  const wire::Header header = wire::encode_header(bytes);
  if (!write_all(fd.get(), header.data(), header.size())) {
    throw SocketError("send header: " + errno_text(errno));
  }
  static const std::vector<std::uint8_t> pattern = [] {
    std::vector<std::uint8_t> v(kChunk);
    wire::fill_payload(v);
    return v;
  }();
  std::uint64_t remaining = bytes;
  while (remaining > 0) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kChunk));
    if (!write_all(fd.get(), pattern.data(), n)) throw SocketError("send payload: " + errno_text(errno));
    remaining -= n;
    if (Clock::now() > deadline) throw SocketError("transfer timeout");
  }
  std::uint8_t ack = 0;
  if (!read_exact(fd.get(), &ack, 1)) throw SocketError("no acknowledgment");
  if (ack != wire::kAck) throw SocketError("bad acknowledgment byte");
}

class Collector {
 public:
  Collector(std::ostream* stream, std::size_t expected) : stream_(stream) { records_.reserve(expected); }

  void add(FlowRecord r) {
    std::lock_guard lock(mu_);
    if (stream_ != nullptr) {
      write_record(*stream_, r);
      stream_->flush();
    }
    records_.push_back(std::move(r));
  }

  std::vector<FlowRecord> take() {
    std::lock_guard lock(mu_);
    std::sort(records_.begin(), records_.end(),
              [](const FlowRecord& a, const FlowRecord& b) { return a.client_id < b.client_id; });
    return std::move(records_);
  }

 private:
  std::mutex mu_;
  std::ostream* stream_;
  std::vector<FlowRecord> records_;
};

nlohmann::json counters_json(const InterfaceCounters& c) {
  return {{"rx_bytes", c.rx_bytes}, {"tx_bytes", c.tx_bytes},
          {"rx_packets", c.rx_packets}, {"tx_packets", c.tx_packets}};
}

}  // namespace

void ClientRunConfig::validate() const {
  auto bad = [](const std::string& what) { throw std::invalid_argument(what); };
  if (server_address.empty()) bad("server address must be set");
  if (pool_size <= 0) bad("pool_size must be > 0");
  if (!(duration > 0.0)) bad("duration must be > 0");
  if (!(concurrency > 0.0)) bad("concurrency must be > 0");
  if (parallel_flows <= 0) bad("parallel_flows must be > 0");
  if (!(connect_timeout > 0.0) || !(transfer_timeout > 0.0)) bad("timeouts must be > 0");
}

nlohmann::json config_to_json(const ClientRunConfig& c) {
  nlohmann::json j = {{"source", "loadgen"},
                      {"server", c.server_address},
                      {"base_port", c.base_port},
                      {"pool_size", c.pool_size},
                      {"duration", c.duration},
                      {"concurrency", c.concurrency},
                      {"parallel_flows", c.parallel_flows},
                      {"transfer_bytes", c.transfer_bytes},
                      {"mode", to_string(c.mode)},
                      {"connect_timeout", c.connect_timeout},
                      {"transfer_timeout", c.transfer_timeout}};
  if (c.interface) j["interface"] = *c.interface;
  return j;
}

ClientRunConfig client_config_from_json(const nlohmann::json& j) {
  ClientRunConfig c;
  c.server_address = j.at("server").get<std::string>();
  c.base_port = j.at("base_port").get<std::uint16_t>();
  c.pool_size = j.at("pool_size").get<int>();
  c.duration = j.at("duration").get<double>();
  c.concurrency = j.at("concurrency").get<double>();
  c.parallel_flows = j.at("parallel_flows").get<int>();
  c.transfer_bytes = j.at("transfer_bytes").get<std::uint64_t>();
  c.mode = parse_spawn_mode(j.at("mode").get<std::string>());
  c.connect_timeout = j.at("connect_timeout").get<double>();
  c.transfer_timeout = j.at("transfer_timeout").get<double>();
  if (j.contains("interface")) c.interface = j.at("interface").get<std::string>();
  return c;
}

TransferLog run_clients(const ClientRunConfig& config, std::ostream* stream) {
  config.validate();
  const std::vector<double> schedule = spawn_schedule(config.mode, config.concurrency, config.duration);
  const std::vector<std::uint64_t> parts = wire::split_bytes(config.transfer_bytes, config.parallel_flows);

  TransferLog log;
  log.run = config_to_json(config);
  log.run["started_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::system_clock::now().time_since_epoch())
                                   .count();
  log.run["monotonic_epoch_ns"] = std::chrono::duration_cast<std::chrono::nanoseconds>(
                                      Clock::now().time_since_epoch())
                                      .count();
  std::optional<InterfaceCounters> before;
  if (config.interface) before = read_interface_counters(*config.interface);
  if (before) log.run["interface_before"] = counters_json(*before);
  if (stream != nullptr) write_header(*stream, log.run);

  Collector collector(stream, schedule.size());
  const auto epoch = Clock::now();
  auto seconds_since = [epoch](Clock::time_point t) {
    return std::chrono::duration<double>(t - epoch).count();
  };

  std::vector<std::thread> clients;
  clients.reserve(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    std::this_thread::sleep_until(epoch + std::chrono::duration_cast<Clock::duration>(
                                              std::chrono::duration<double>(schedule[i])));
    const auto port = static_cast<std::uint16_t>(config.base_port + i % static_cast<std::size_t>(config.pool_size));
    const auto spawned = Clock::now();
    clients.emplace_back([&, i, port, spawned] {
      FlowRecord rec;
      rec.client_id = static_cast<std::int64_t>(i);
      rec.flows = config.parallel_flows;
      rec.spawn_s = seconds_since(spawned);

      std::vector<std::string> errors(parts.size());
      std::vector<std::thread> flows;
      flows.reserve(parts.size());
      for (std::size_t f = 0; f < parts.size(); ++f) {
        flows.emplace_back([&, f] {
          try {
            run_flow(config, port, parts[f]);
          } catch (const std::exception& e) {
            errors[f] = e.what();
          }
        });
      }
      for (auto& t : flows) t.join();
      const auto finished = Clock::now();

      rec.complete_s = seconds_since(finished);
      rec.fct_s = std::chrono::duration<double>(finished - spawned).count();
      rec.ok = std::all_of(errors.begin(), errors.end(), [](const std::string& e) { return e.empty(); });
      if (rec.ok) {
        rec.bytes = config.transfer_bytes;
      } else {
        std::uint64_t delivered = 0;
        for (std::size_t f = 0; f < parts.size(); ++f) {
          if (errors[f].empty()) {
            delivered += parts[f];
          } else if (rec.error.empty()) {
            rec.error = "flow " + std::to_string(f) + ": " + errors[f];
          }
        }
        rec.bytes = delivered;
      }
      collector.add(std::move(rec));
    });
  }
  for (auto& t : clients) t.join();

  log.records = collector.take();
  if (config.interface) {
    if (auto after = read_interface_counters(*config.interface); after && before) {
      log.run["interface_after"] = counters_json(*after);
    }
  }
  return log;
}

std::optional<InterfaceCounters> read_interface_counters(const std::string& iface) {
  if (iface.empty() || iface.find('/') != std::string::npos) return std::nullopt;
  const std::string base = "/sys/class/net/" + iface + "/statistics/";
  auto read = [&](const char* name) -> std::optional<std::uint64_t> {
    std::ifstream in(base + name);
    std::uint64_t v = 0;
    if (!(in >> v)) return std::nullopt;
    return v;
  };
  auto rb = read("rx_bytes");
  auto tb = read("tx_bytes");
  auto rp = read("rx_packets");
  auto tp = read("tx_packets");
  if (!rb || !tb || !rp || !tp) return std::nullopt;
  return InterfaceCounters{*rb, *tb, *rp, *tp};
}

}  // namespace streamscore::loadgen
