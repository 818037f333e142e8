#include "streamscore/fluidsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "streamscore/units.hpp"

namespace streamscore::fluidsim {

namespace {

// Events closer than this are treated as simultaneous.
constexpr double kEventEpsilon = 1e-12;

struct Pending {
  double activate = 0.0;
  std::size_t client = 0;
};

struct Active {
  double finish_service = 0.0;  // cumulative per-client service at which it completes
  std::size_t client = 0;
  bool operator>(const Active& o) const {
    if (finish_service != o.finish_service) return finish_service > o.finish_service;
    return client > o.client;
  }
};

}  // namespace

void Scenario::validate() const {
  link.validate();
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(duration)) throw DomainError("duration must be > 0");
  if (!pos(concurrency)) throw DomainError("concurrency must be > 0");
  if (parallel_flows <= 0) throw DomainError("parallel_flows must be > 0");
  if (!pos(transfer_bytes)) throw DomainError("transfer_bytes must be > 0");
  if (!std::isfinite(startup_latency) || startup_latency < 0.0) {
    throw DomainError("startup_latency must be >= 0");
  }
}

double Scenario::offered_load() const { return concurrency * transfer_bytes / link.bandwidth; }

std::vector<double> spawn_times(const Scenario& s) {
  return spawn_schedule(s.mode, s.concurrency, s.duration);
}

SimResult simulate(const Scenario& s) {
  s.validate();
  const std::vector<double> spawns = spawn_times(s);
  if (spawns.empty()) throw DomainError("scenario spawns no clients");

  const double capacity = s.capacity();
  const double bytes = s.transfer_bytes;
  const std::size_t n_clients = spawns.size();

  std::vector<Pending> pending(n_clients);
  for (std::size_t i = 0; i < n_clients; ++i) pending[i] = {spawns[i] + s.startup_latency, i};
  std::stable_sort(pending.begin(), pending.end(),
                   [](const Pending& a, const Pending& b) { return a.activate < b.activate; });

  SimResult result;
  result.records.resize(n_clients);
  result.offered_load = s.offered_load();

  std::priority_queue<Active, std::vector<Active>, std::greater<>> active;
  std::vector<std::size_t> due;
  double now = pending.front().activate;
  double service = 0.0;  // bytes served to each continuously active client so far
  std::size_t next = 0;

  while (next < n_clients || !active.empty()) {
    const double t_arrival =
        next < n_clients ? pending[next].activate : std::numeric_limits<double>::infinity();
    const auto n = static_cast<double>(active.size());
    double t_completion = std::numeric_limits<double>::infinity();
    if (!active.empty()) t_completion = now + (active.top().finish_service - service) * n / capacity;

    const double t = std::min(t_arrival, t_completion);
    if (!active.empty() && t > now) {
      result.segments.push_back({now, t, active.size(), capacity / n});
      service += (t - now) * capacity / n;
    }
    now = std::max(now, t);

    if (t_completion <= t_arrival + kEventEpsilon) {
      // Everything finishing within the coalescing window completes now,
      // in client-id order.
      const double slack = std::max(kEventEpsilon * capacity / n, 1e-12 * service);
      due.clear();
      while (!active.empty() && active.top().finish_service - service <= slack) {
        due.push_back(active.top().client);
        active.pop();
      }
      std::sort(due.begin(), due.end());
      for (std::size_t c : due) {
        FlowRecord& r = result.records[c];
        r.complete_s = now;
      }
    }

    while (next < n_clients && pending[next].activate <= now + kEventEpsilon) {
      active.push({service + bytes, pending[next].client});
      ++next;
    }
  }

  const auto whole_bytes = static_cast<std::uint64_t>(std::llround(bytes));
  double last_completion = 0.0;
  for (std::size_t i = 0; i < n_clients; ++i) {
    FlowRecord& r = result.records[i];
    r.client_id = static_cast<std::int64_t>(i);
    r.spawn_s = spawns[i];
    r.fct_s = r.complete_s - r.spawn_s;
    r.bytes = whole_bytes;
    r.flows = s.parallel_flows;
    r.ok = true;
    result.max_fct = std::max(result.max_fct, r.fct_s);
    last_completion = std::max(last_completion, r.complete_s);
  }
  const double span = last_completion - spawns.front();
  result.utilization = span > 0.0
      ? std::min(1.0, bytes * static_cast<double>(n_clients) / (s.link.bandwidth * span))
      : 0.0;
  return result;
}

double worst_fct(const SimResult& r) {
  if (r.records.empty()) throw DomainError("empty simulation result");
  double worst = r.records.front().fct_s;
  for (const auto& rec : r.records) worst = std::max(worst, rec.fct_s);
  return worst;
}

namespace {

SweepRow run_cell(const Scenario& base, double concurrency, int parallel) {
  Scenario s = base;
  s.concurrency = concurrency;
  s.parallel_flows = parallel;
  const SimResult r = simulate(s);
  SweepRow row;
  row.concurrency = concurrency;
  row.parallel_flows = parallel;
  row.mode = s.mode;
  row.offered_load = r.offered_load;
  row.utilization = r.utilization;
  row.worst_fct = worst_fct(r);
  row.sss = streamscore::sss(row.worst_fct, t_theoretical(s.transfer_bytes, s.link.bandwidth));
  row.clients = r.records.size();
  return row;
}

void check_sweep_inputs(const std::vector<double>& c, const std::vector<int>& p) {
  if (c.empty() || p.empty()) throw DomainError("sweep value lists must be non-empty");
}

}  // namespace

std::vector<SweepRow> sweep_serial(const Scenario& base,
                                   const std::vector<double>& concurrency_values,
                                   const std::vector<int>& parallel_values) {
  check_sweep_inputs(concurrency_values, parallel_values);
  std::vector<SweepRow> rows;
  rows.reserve(concurrency_values.size() * parallel_values.size());
  for (double c : concurrency_values) {
    for (int p : parallel_values) rows.push_back(run_cell(base, c, p));
  }
  return rows;
}

std::vector<SweepRow> sweep(const Scenario& base, const std::vector<double>& concurrency_values,
                            const std::vector<int>& parallel_values) {
  check_sweep_inputs(concurrency_values, parallel_values);
  base.validate();
  const std::size_t n_par = parallel_values.size();
  const auto cells = static_cast<std::ptrdiff_t>(concurrency_values.size() * n_par);
  std::vector<SweepRow> rows(static_cast<std::size_t>(cells));
  std::vector<std::string> errors(static_cast<std::size_t>(cells));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < cells; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      rows[idx] = run_cell(base, concurrency_values[idx / n_par], parallel_values[idx % n_par]);
    } catch (const std::exception& e) {
      errors[idx] = e.what();
    }
  }

  for (const auto& e : errors) {
    if (!e.empty()) throw DomainError(e);
  }
  return rows;
}

// --- scenario files ---------------------------------------------------------

namespace {

double quantity_or_number(const nlohmann::json& v, Dimension dim) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_quantity(v.get<std::string>(), dim);
  throw ParseError("expected a number or quantity string");
}

double number_field(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_number(v.get<std::string>());
  throw ParseError("expected a number");
}

void apply_field(Scenario& s, const std::string& key, const nlohmann::json& v) {
  if (key == "bandwidth") {
    s.link.bandwidth = quantity_or_number(v, Dimension::ByteRate);
  } else if (key == "alpha") {
    s.link.alpha = number_field(v);
  } else if (key == "rtt") {
    s.link.rtt = quantity_or_number(v, Dimension::Time);
  } else if (key == "duration") {
    s.duration = quantity_or_number(v, Dimension::Time);
  } else if (key == "concurrency") {
    s.concurrency = number_field(v);
  } else if (key == "parallel_flows") {
    const double p = number_field(v);
    if (p != std::floor(p)) throw ParseError("parallel_flows must be an integer");
    s.parallel_flows = static_cast<int>(p);
  } else if (key == "transfer_bytes") {
    s.transfer_bytes = quantity_or_number(v, Dimension::Bytes);
  } else if (key == "mode") {
    s.mode = parse_spawn_mode(v.get<std::string>());
  } else if (key == "startup_latency") {
    s.startup_latency = quantity_or_number(v, Dimension::Time);
  } else if (key == "link" && v.is_object()) {
    for (const auto& [k, lv] : v.items()) apply_field(s, k, lv);
  } else {
    throw ParseError("unknown scenario field '" + key + "'");
  }
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j, Scenario base) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      apply_field(base, key, value);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("scenario field '" + key + "': " + e.what());
    }
  }
  base.validate();
  return base;
}

Scenario scenario_from_kv(std::string_view text, Scenario base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    try {
      apply_field(base, key, nlohmann::json(value));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

Scenario load_scenario_file(const std::string& path, Scenario base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return scenario_from_json(nlohmann::json::parse(text), base);
  }
  return scenario_from_kv(text, base);
}

nlohmann::json scenario_to_json(const Scenario& s) {
  return {{"bandwidth", s.link.bandwidth},
          {"alpha", s.link.alpha},
          {"rtt", s.link.rtt},
          {"duration", s.duration},
          {"concurrency", s.concurrency},
          {"parallel_flows", s.parallel_flows},
          {"transfer_bytes", s.transfer_bytes},
          {"mode", to_string(s.mode)},
          {"startup_latency", s.startup_latency}};
}

}  // namespace streamscore::fluidsim
