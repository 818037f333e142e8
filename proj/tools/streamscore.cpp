// streamscore: local vs. streamed remote processing decisions, plus the
// simulator, measurement harness and log analysis that feed them.
//
// Exit codes: 0 ok, 1 usage or domain error, 2 infeasible or failed run.

#include <chrono>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "streamscore/analysis.hpp"
#include "streamscore/casestudy.hpp"
#include "streamscore/flow_record.hpp"
#include "streamscore/fluidsim.hpp"
#include "streamscore/loadgen.hpp"
#include "streamscore/model.hpp"
#include "streamscore/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace streamscore;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

struct Globals {
  bool json = false;
  std::string out;
};

// A parse or domain failure with a message meant for the user.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

TierPolicy parse_tiers(const std::string& text) {
  if (text.empty()) return TierPolicy{};
  std::vector<Tier> tiers;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    tiers.push_back({"Tier " + std::to_string(tiers.size() + 1), parse_seconds(item)});
  }
  return TierPolicy(std::move(tiers));
}

std::string fmt_opt_tier(const std::optional<std::string>& t) { return t ? *t : "none"; }

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

// --- model ------------------------------------------------------------------

struct ModelArgs {
  std::string size, bw, work, complexity, local_rate, remote_rate, rtt, interval, worst, t_io, tiers;
  double alpha = 1.0;
  std::optional<double> theta;
  // scan comparison
  std::optional<double> frames, files;
  std::string frame_size, frame_interval, per_file_overhead = "0s";
};

int cmd_model(const ModelArgs& a, const Globals& g) {
  if (a.theta && !a.t_io.empty()) throw UsageError("--theta and --t-io are mutually exclusive");
  if (a.theta && *a.theta < 1.0) throw UsageError("theta must be >= 1");

  LinkSpec link{parse_rate(a.bw), a.alpha, a.rtt.empty() ? 0.0 : parse_seconds(a.rtt)};
  link.validate();

  WorkloadSpec w;
  w.unit_size = parse_bytes(a.size);
  if (!a.work.empty() && !a.complexity.empty()) throw UsageError("--work and --complexity are mutually exclusive");
  if (!a.work.empty()) w = WorkloadSpec::from_work(w.unit_size, parse_compute(a.work));
  if (!a.complexity.empty()) w.complexity = parse_number(a.complexity);
  if (!a.interval.empty()) w.generation_interval = parse_seconds(a.interval);
  w.validate();

  const double transfer = t_transfer(w, link);
  IoOverhead io{a.theta.value_or(1.0)};
  if (!a.t_io.empty()) io = io_overhead_theta(parse_seconds(a.t_io), transfer);
  io.validate();

  std::optional<ComputeSpec> compute;
  if (!a.local_rate.empty() || !a.remote_rate.empty()) {
    if (a.local_rate.empty() || a.remote_rate.empty()) {
      throw UsageError("--local-rate and --remote-rate must be given together");
    }
    compute = ComputeSpec{parse_compute(a.local_rate), parse_compute(a.remote_rate)};
    compute->validate();
  }
  double remote = 0.0;
  if (compute) {
    remote = t_remote(w, *compute);
  } else if (w.work() > 0.0) {
    throw UsageError("--remote-rate is required for non-zero --work");
  }

  TimeBreakdown b;
  b.t_transfer = transfer;
  b.t_remote = remote;
  b.t_io = (io.theta - 1.0) * transfer;
  b.t_pct = io.theta * transfer + remote;

  const TierPolicy tiers = parse_tiers(a.tiers);
  const double ideal = t_theoretical(w.unit_size, link.bandwidth);
  std::optional<double> worst;
  if (!a.worst.empty()) worst = parse_seconds(a.worst);

  DelayDecomposition delay;
  delay.d_trans = ideal;
  delay.d_prop = link.rtt / 2.0;
  if (worst) delay.d_queue = std::max(0.0, *worst - ideal - delay.d_prop);

  std::optional<Decision> decision;
  if (compute) decision = decide(w, link, *compute, io, tiers, worst);

  std::optional<FileStreamComparison> scan;
  if (a.frames) {
    ScanSpec s;
    s.frame_count = *a.frames;
    s.frame_bytes = a.frame_size.empty() ? w.unit_size / *a.frames : parse_bytes(a.frame_size);
    if (a.frame_interval.empty()) throw UsageError("--frame-interval is required with --frames");
    s.frame_interval = parse_seconds(a.frame_interval);
    s.files = a.files.value_or(1.0);
    s.per_file_overhead = parse_seconds(a.per_file_overhead);
    scan = file_vs_stream(s, link);
  }

  json j = {{"t_transfer", b.t_transfer}, {"t_remote", b.t_remote}, {"t_io", b.t_io},
            {"t_pct", b.t_pct},           {"theta", io.theta},       {"t_theoretical", ideal},
            {"tier", nullptr}};
  j["tier"] = classify_tier(b.t_pct, tiers) ? json(*classify_tier(b.t_pct, tiers)) : json(nullptr);
  j["sss"] = worst ? json(sss(*worst, ideal)) : json(nullptr);
  j["delay"] = {{"total", delay_total(delay)},
                {"continuum", continuum_delay(delay)},
                {"continuum_label", kOptimisticBaselineLabel}};
  if (decision) j["decision"] = analysis::to_json(*decision);
  if (scan) {
    j["file_vs_stream"] = {{"t_stream", scan->t_stream}, {"t_file", scan->t_file}, {"reduction", scan->reduction}};
  }

  if (!g.out.empty()) write_text_file(g.out, j.dump(2) + "\n");
  if (g.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    fmt::print("{:<24}{:.6g} s\n", "t_transfer", b.t_transfer);
    fmt::print("{:<24}{:.6g} s\n", "t_remote", b.t_remote);
    fmt::print("{:<24}{:.6g} s  (theta {:.6g})\n", "t_io", b.t_io, io.theta);
    fmt::print("{:<24}{:.6g} s\n", "t_pct", b.t_pct);
    fmt::print("{:<24}{:.6g} s\n", "t_theoretical", ideal);
    fmt::print("{:<24}{}\n", "tier (t_pct)", fmt_opt_tier(classify_tier(b.t_pct, tiers)));
    if (worst) fmt::print("{:<24}{:.6g}\n", "sss", sss(*worst, ideal));
    fmt::print("{:<24}{:.6g} s\n", "delay total", delay_total(delay));
    fmt::print("{:<24}{:.6g} s  [{}]\n", "continuum delay", continuum_delay(delay), kOptimisticBaselineLabel);
    if (decision) {
      fmt::print("{:<24}{}\n", "decision", to_string(decision->choice));
      fmt::print("{:<24}{:.6g}\n", "gain (t_local/t_pct)", decision->gain);
      fmt::print("{:<24}{:.6g} s\n", "t_local", decision->t_local);
      fmt::print("{:<24}{}\n", "tier achieved", fmt_opt_tier(decision->tier_achieved));
      fmt::print("{:<24}{}\n", "rationale", decision->rationale);
    }
    if (scan) {
      fmt::print("{:<24}{:.6g} s\n", "t_stream", scan->t_stream);
      fmt::print("{:<24}{:.6g} s\n", "t_file", scan->t_file);
      fmt::print("{:<24}{:.4f}\n", "reduction", scan->reduction);
    }
  }
  return decision && decision->choice == Choice::Infeasible ? kExitInfeasible : kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimArgs {
  std::string scenario, bw, rtt, duration, size, mode, startup, compare;
  std::optional<double> alpha, concurrency;
  std::optional<int> parallel;
  bool sweep = false;
  std::vector<double> concurrency_list{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> parallel_list{2, 4, 8};
  bool serial = false;
};

fluidsim::Scenario scenario_from_args(const SimArgs& a) {
  fluidsim::Scenario s;
  if (!a.scenario.empty()) s = fluidsim::load_scenario_file(a.scenario);
  if (!a.bw.empty()) s.link.bandwidth = parse_rate(a.bw);
  if (a.alpha) s.link.alpha = *a.alpha;
  if (!a.rtt.empty()) {
    s.link.rtt = parse_seconds(a.rtt);
    if (a.startup.empty()) s.startup_latency = s.link.rtt;
  }
  if (!a.duration.empty()) s.duration = parse_seconds(a.duration);
  if (a.concurrency) s.concurrency = *a.concurrency;
  if (a.parallel) s.parallel_flows = *a.parallel;
  if (!a.size.empty()) s.transfer_bytes = parse_bytes(a.size);
  if (!a.mode.empty()) s.mode = parse_spawn_mode(a.mode);
  if (!a.startup.empty()) s.startup_latency = parse_seconds(a.startup);
  s.validate();
  return s;
}

int cmd_simulate(const SimArgs& a, const Globals& g) {
  const fluidsim::Scenario s = scenario_from_args(a);

  if (a.sweep) {
    const auto rows = a.serial ? fluidsim::sweep_serial(s, a.concurrency_list, a.parallel_list)
                               : fluidsim::sweep(s, a.concurrency_list, a.parallel_list);
    std::ostringstream csv;
    analysis::write_load_csv(csv, analysis::load_points(rows));
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back({{"concurrency", r.concurrency}, {"parallel_flows", r.parallel_flows},
                   {"mode", to_string(r.mode)},    {"offered_load", r.offered_load},
                   {"utilization", r.utilization}, {"worst_fct", r.worst_fct},
                   {"sss", r.sss},                 {"clients", r.clients}});
    }
    if (!g.out.empty()) {
      write_text_file(fs::path(g.out) / "series_worst_fct_vs_load.csv", csv.str());
      write_text_file(fs::path(g.out) / "sweep.json",
                      json{{"scenario", fluidsim::scenario_to_json(s)}, {"rows", j}}.dump(2) + "\n");
    }
    if (g.json) {
      std::cout << j.dump(2) << '\n';
    } else {
      fmt::print("{:>11} {:>8} {:>13} {:>12} {:>11} {:>10} {:>8}\n", "concurrency", "parallel", "mode",
                 "offered_load", "utilization", "worst_fct", "sss");
      for (const auto& r : rows) {
        fmt::print("{:>11.3g} {:>8} {:>13} {:>12.4f} {:>11.4f} {:>10.4f} {:>8.3f}\n", r.concurrency,
                   r.parallel_flows, to_string(r.mode), r.offered_load, r.utilization, r.worst_fct, r.sss);
      }
    }
    return kExitOk;
  }

  const fluidsim::SimResult r = fluidsim::simulate(s);
  const double worst = fluidsim::worst_fct(r);
  const double ideal = t_theoretical(s.transfer_bytes, s.link.bandwidth);
  json summary = {{"utilization", r.utilization},
                  {"offered_load", r.offered_load},
                  {"max_fct", r.max_fct},
                  {"sss", sss(worst, ideal)},
                  {"records", r.records.size()}};

  json run = fluidsim::scenario_to_json(s);
  run["source"] = "fluidsim";
  run["started_unix_ms"] = 0;

  if (!a.compare.empty()) {
    const TransferLog measured = read_log_file(a.compare);
    const auto ms = analysis::summarize(measured.records);
    const auto ss = analysis::summarize(r.records);
    summary["comparison"] = {{"label", "measured / simulated"},
                             {"measured", analysis::to_json(ms)},
                             {"simulated", analysis::to_json(ss)},
                             {"ratios", analysis::compare_stats(ms, ss)}};
  }

  if (!g.out.empty()) {
    std::ostringstream log;
    write_header(log, run);
    for (const auto& rec : r.records) write_record(log, rec);
    write_text_file(g.out, log.str());
    fs::path summary_path(g.out);
    summary_path.replace_extension(".summary.json");
    write_text_file(summary_path, summary.dump(2) + "\n");
  }

  if (g.json) {
    std::cout << summary.dump(2) << '\n';
  } else {
    fmt::print("{:<16}{}\n", "records", r.records.size());
    fmt::print("{:<16}{:.4f}\n", "offered load", r.offered_load);
    fmt::print("{:<16}{:.4f}\n", "utilization", r.utilization);
    fmt::print("{:<16}{:.6g} s\n", "max fct", r.max_fct);
    fmt::print("{:<16}{:.4f}\n", "sss", sss(worst, ideal));
    if (summary.contains("comparison")) {
      fmt::print("{:<16}{}\n", "measured/sim", summary["comparison"]["ratios"].dump());
    }
  }
  return kExitOk;
}

// --- measure ----------------------------------------------------------------

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

int cmd_serve(const loadgen::ServerConfig& c, const Globals& g) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  loadgen::Server server(c);
  server.start();
  if (g.json) {
    std::cout << json{{"listening", server.ports()}, {"bind", c.bind_address}}.dump() << std::endl;
  } else {
    std::cout << fmt::format("listening on {}:{}-{}", c.bind_address, c.base_port,
                             c.base_port + c.pool_size - 1)
              << std::endl;
  }
  while (g_stop == 0) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  const auto st = server.stats();
  if (!g.json) {
    fmt::print("connections {} acknowledged {} rejected {} bytes {}\n", st.connections, st.acknowledged,
               st.rejected, st.payload_bytes);
  }
  return kExitOk;
}

int cmd_run(loadgen::ClientRunConfig c, const std::string& size, const std::string& duration,
            const std::string& mode, const Globals& g) {
  const double bytes = parse_bytes(size);
  if (bytes < 0.0 || bytes != std::floor(bytes)) throw UsageError("--size must be a whole number of bytes");
  c.transfer_bytes = static_cast<std::uint64_t>(bytes);
  c.duration = parse_seconds(duration);
  c.mode = parse_spawn_mode(mode);

  std::ofstream file;
  std::ostream* stream = nullptr;
  if (!g.out.empty()) {
    const fs::path p(g.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    file.open(p);
    if (!file) throw UsageError("cannot write " + g.out);
    stream = &file;
  }
  const TransferLog log = loadgen::run_clients(c, stream);

  std::size_t failures = 0;
  for (const auto& r : log.records) failures += r.ok ? 0 : 1;
  if (g.json) {
    json j = {{"records", log.records.size()}, {"failures", failures}};
    if (failures < log.records.size()) j["stats"] = analysis::to_json(analysis::summarize(log.records));
    std::cout << j.dump(2) << '\n';
  } else {
    fmt::print("{:<12}{}\n{:<12}{}\n", "records", log.records.size(), "failures", failures);
    if (failures < log.records.size()) {
      const auto s = analysis::summarize(log.records);
      fmt::print("{:<12}{:.6g} s\n{:<12}{:.6g} s\n{:<12}{:.6g} s\n", "max fct", s.max, "p50", s.p50, "p99", s.p99);
    }
  }
  return failures == 0 ? kExitOk : kExitInfeasible;
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string link_bw, rtt, tiers, compare, work, local_rate, remote_rate;
  double alpha = 1.0;
  double theta = 1.0;
};

int cmd_analyze(const AnalyzeArgs& a, const Globals& g) {
  analysis::ReportInputs in;
  in.policy = parse_tiers(a.tiers);
  std::vector<analysis::LoadPoint> load;
  std::optional<double> transfer_bytes;

  for (const auto& path : a.inputs) {
    const TransferLog log = read_log_file(path);
    in.records.insert(in.records.end(), log.records.begin(), log.records.end());
    if (log.run.contains("transfer_bytes")) transfer_bytes = log.run["transfer_bytes"].get<double>();
    bool any_ok = false;
    double worst = 0.0;
    for (const auto& r : log.records) {
      if (r.ok) {
        any_ok = true;
        worst = std::max(worst, r.fct_s);
      }
    }
    if (!any_ok) continue;
    analysis::LoadPoint p;
    p.label = fs::path(path).stem().string();
    p.worst_fct = worst;
    p.mode = log.run.value("mode", std::string("unknown"));
    p.parallel_flows = log.run.value("parallel_flows", 0);
    if (!a.link_bw.empty() && log.run.contains("concurrency") && log.run.contains("transfer_bytes")) {
      const double bw = parse_rate(a.link_bw);
      p.offered_load = log.run["concurrency"].get<double>() * log.run["transfer_bytes"].get<double>() / bw;
      p.sss = sss(worst, t_theoretical(log.run["transfer_bytes"].get<double>(), bw));
    }
    load.push_back(p);
  }

  bool any_ok = false;
  for (const auto& r : in.records) any_ok = any_ok || r.ok;
  if (!any_ok) throw UsageError("no successful records in input");

  if (!a.link_bw.empty()) {
    in.link = LinkSpec{parse_rate(a.link_bw), a.alpha, a.rtt.empty() ? 0.0 : parse_seconds(a.rtt)};
    in.link->validate();
  }
  in.transfer_bytes = transfer_bytes;

  if (!a.compare.empty()) {
    in.comparison = read_log_file(a.compare).records;
    in.comparison_label = fs::path(a.compare).filename().string();
  }

  if (!a.work.empty()) {
    if (!in.link) throw UsageError("--work needs --link-bw");
    if (a.local_rate.empty() || a.remote_rate.empty()) {
      throw UsageError("--work needs --local-rate and --remote-rate");
    }
    double bytes = transfer_bytes.value_or(0.0);
    if (bytes <= 0.0) {
      for (const auto& r : in.records) bytes = std::max(bytes, static_cast<double>(r.bytes));
    }
    const WorkloadSpec w = WorkloadSpec::from_work(bytes, parse_compute(a.work));
    const ComputeSpec c{parse_compute(a.local_rate), parse_compute(a.remote_rate)};
    in.decision = decide(w, *in.link, c, IoOverhead{a.theta}, in.policy, analysis::summarize(in.records).max);
  }

  const json rep = analysis::report(in);
  if (!g.out.empty()) {
    const fs::path dir(g.out);
    fs::create_directories(dir);
    write_text_file(dir / "report.json", rep.dump(2) + "\n");
    std::ostringstream cdf_csv, load_csv;
    analysis::write_cdf_csv(cdf_csv, analysis::cdf(in.records));
    analysis::write_load_csv(load_csv, load);
    write_text_file(dir / "series_cdf.csv", cdf_csv.str());
    write_text_file(dir / "series_worst_fct_vs_load.csv", load_csv.str());
  }

  if (g.json) {
    std::cout << rep.dump(2) << '\n';
  } else {
    const auto& st = rep["stats"];
    fmt::print("{:<12}{} ok, {} failed\n", "records", st["count"].get<std::size_t>(),
               st["failures"].get<std::size_t>());
    for (const char* k : {"max", "mean", "p50", "p90", "p99"}) {
      fmt::print("{:<12}{:.6g} s\n", k, st[k].get<double>());
    }
    fmt::print("{:<12}{}\n", "regime", rep["regime"]["regime"].get<std::string>());
    if (!rep["sss"].is_null()) fmt::print("{:<12}{:.4f}\n", "sss", rep["sss"].get<double>());
    if (rep.contains("baseline")) {
      fmt::print("{:<12}{:.6g} s  [{}]\n", "continuum", rep["baseline"]["continuum_delay_s"].get<double>(),
                 kOptimisticBaselineLabel);
    }
    if (rep.contains("decision")) {
      fmt::print("{:<12}{}\n", "decision", rep["decision"]["choice"].get<std::string>());
    }
  }
  if (in.decision && in.decision->choice == Choice::Infeasible) return kExitInfeasible;
  return kExitOk;
}

// --- casestudy --------------------------------------------------------------

int cmd_casestudy(const std::string& input, const Globals& g) {
  casestudy::CaseStudyInput in = casestudy::lcls_defaults();
  if (!input.empty()) {
    std::ifstream f(input);
    if (!f) throw UsageError("cannot open " + input);
    in = casestudy::input_from_json(json::parse(f));
  }
  const auto rows = casestudy::run(in);
  const json j = casestudy::to_json(rows);
  if (!g.out.empty()) write_text_file(g.out, j.dump(2) + "\n");

  if (g.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& r : rows) {
      fmt::print("{}\n", r.name);
      fmt::print("  {:<22}{:.6g} B/s\n", "throughput", r.throughput);
      fmt::print("  {:<22}{:.4f}\n", "utilization", r.utilization);
      if (!r.error.empty()) {
        fmt::print("  {:<22}{}\n", "error", r.error);
        continue;
      }
      if (r.infeasible) {
        fmt::print("  {:<22}{}\n", "status", "INFEASIBLE (exceeds effective link capacity)");
        continue;
      }
      fmt::print("  {:<22}{:.6g} s{}\n", "worst-case transfer", *r.worst_fct, r.extrapolated ? "  (extrapolated)" : "");
      for (const auto& b : r.budgets) {
        if (b.feasible) {
          fmt::print("  {:<22}budget {:.6g} s, needs {:.6g} FLOP/s remote\n", b.tier, b.budget,
                     *b.required_remote_rate);
        } else {
          fmt::print("  {:<22}no budget left\n", b.tier);
        }
      }
    }
  }
  bool any_bad = false;
  for (const auto& r : rows) any_bad = any_bad || r.infeasible || !r.error.empty();
  return any_bad ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stream-or-not decision toolkit: completion-time model, fluid simulator, "
               "load generator and FCT analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable output")->configurable(false);
  app.add_option("--out", g.out, "Output file or directory");
  app.fallthrough();

  ModelArgs ma;
  auto* model = app.add_subcommand("model", "Evaluate the completion-time model for one workload");
  model->add_option("--size", ma.size, "Data unit size, e.g. 0.5GB")->required();
  model->add_option("--bw", ma.bw, "Link bandwidth, e.g. 25Gbps")->required();
  model->add_option("--alpha", ma.alpha, "Transfer efficiency in (0,1]");
  model->add_option("--theta", ma.theta, "I/O overhead coefficient (>= 1)");
  model->add_option("--t-io", ma.t_io, "File I/O time; derives theta");
  model->add_option("--work", ma.work, "Total compute per data unit, e.g. 34TF or 0FLOP");
  model->add_option("--complexity", ma.complexity, "Compute per byte (FLOP/byte)");
  model->add_option("--local-rate", ma.local_rate, "Local compute rate, e.g. 5TF");
  model->add_option("--remote-rate", ma.remote_rate, "Remote compute rate");
  model->add_option("--rtt", ma.rtt, "Round-trip time, e.g. 16ms");
  model->add_option("--interval", ma.interval, "Generation interval per data unit");
  model->add_option("--worst-transfer", ma.worst, "Measured worst-case transfer time");
  model->add_option("--tiers", ma.tiers, "Tier deadlines, e.g. 1s,10s,60s");
  model->add_option("--frames", ma.frames, "Scan frame count (file vs stream comparison)");
  model->add_option("--frame-size", ma.frame_size, "Bytes per frame (default size/frames)");
  model->add_option("--frame-interval", ma.frame_interval, "Seconds between frames");
  model->add_option("--files", ma.files, "Files the scan is split into");
  model->add_option("--per-file-overhead", ma.per_file_overhead, "Staging cost per file");

  SimArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Fluid simulation of clients sharing one bottleneck");
  simulate->add_option("--scenario", sa.scenario, "Scenario file (key = value or JSON)");
  simulate->add_option("--bw", sa.bw, "Link bandwidth");
  simulate->add_option("--alpha", sa.alpha, "Transfer efficiency");
  simulate->add_option("--rtt", sa.rtt, "Round-trip time (also the default startup latency)");
  simulate->add_option("--duration", sa.duration, "Spawning duration, e.g. 10s");
  simulate->add_option("--concurrency", sa.concurrency, "Clients per second");
  simulate->add_option("--parallel", sa.parallel, "Flows per client");
  simulate->add_option("--size", sa.size, "Bytes per client, e.g. 0.5GB");
  simulate->add_option("--mode", sa.mode, "simultaneous | scheduled");
  simulate->add_option("--startup", sa.startup, "Per-client startup latency");
  simulate->add_option("--compare", sa.compare, "Measured JSONL log to overlay");
  simulate->add_flag("--sweep", sa.sweep, "Sweep concurrency x parallel flows");
  simulate->add_option("--concurrency-list", sa.concurrency_list, "Sweep concurrency values")->delimiter(',');
  simulate->add_option("--parallel-list", sa.parallel_list, "Sweep parallel-flow values")->delimiter(',');
  simulate->add_flag("--serial", sa.serial, "Run the sweep single-threaded");

  auto* measure = app.add_subcommand("measure", "Live measurement on a real network");
  measure->require_subcommand(1);
  loadgen::ServerConfig sc;
  auto* serve = measure->add_subcommand("serve", "Run the listener pool until interrupted");
  serve->add_option("--base-port", sc.base_port, "First port");
  serve->add_option("--pool-size", sc.pool_size, "Number of sequential ports");
  serve->add_option("--bind", sc.bind_address, "Bind address");
  serve->add_option("--idle-timeout", sc.idle_timeout, "Seconds before an idle connection is dropped");

  loadgen::ClientRunConfig rc;
  std::string run_size = "0.5GB", run_duration = "10s", run_mode = "simultaneous";
  auto* run = measure->add_subcommand("run", "Spawn transfer clients and log completion times");
  run->add_option("--server", rc.server_address, "Server host")->required();
  run->add_option("--base-port", rc.base_port, "First server port");
  run->add_option("--pool-size", rc.pool_size, "Server pool size");
  run->add_option("--duration", run_duration, "Spawning duration");
  run->add_option("--concurrency", rc.concurrency, "Clients per second");
  run->add_option("--parallel", rc.parallel_flows, "Connections per client");
  run->add_option("--size", run_size, "Bytes per client");
  run->add_option("--mode", run_mode, "simultaneous | scheduled");
  run->add_option("--connect-timeout", rc.connect_timeout, "Seconds");
  run->add_option("--transfer-timeout", rc.transfer_timeout, "Seconds");
  run->add_option("--iface", rc.interface, "Sample this interface's counters");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Statistics, CDF, regime and SSS from JSONL logs");
  analyze->add_option("--in", aa.inputs, "JSONL logs (pooled)")->required();
  analyze->add_option("--link-bw", aa.link_bw, "Link bandwidth for SSS and utilization");
  analyze->add_option("--alpha", aa.alpha, "Transfer efficiency");
  analyze->add_option("--rtt", aa.rtt, "Round-trip time");
  analyze->add_option("--tiers", aa.tiers, "Tier deadlines, e.g. 1s,10s,60s");
  analyze->add_option("--compare", aa.compare, "Second log (e.g. simulated) to compare against");
  analyze->add_option("--work", aa.work, "Compute per transfer, enables a decision");
  analyze->add_option("--local-rate", aa.local_rate, "Local compute rate");
  analyze->add_option("--remote-rate", aa.remote_rate, "Remote compute rate");
  analyze->add_option("--theta", aa.theta, "I/O overhead coefficient");

  std::string cs_input;
  auto* cs = app.add_subcommand("casestudy", "Tier feasibility table for instrument workflows");
  cs->add_option("--input", cs_input, "Case study JSON (defaults to the LCLS-II workflows)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    CLI::App* failed = &app;
    for (auto* sub : {model, simulate, serve, run, analyze, cs}) {
      if (sub->parsed()) failed = sub;
    }
    std::cerr << failed->help();
    return kExitUsage;
  }

  try {
    if (model->parsed()) return cmd_model(ma, g);
    if (simulate->parsed()) return cmd_simulate(sa, g);
    if (serve->parsed()) return cmd_serve(sc, g);
    if (run->parsed()) return cmd_run(rc, run_size, run_duration, run_mode, g);
    if (analyze->parsed()) return cmd_analyze(aa, g);
    if (cs->parsed()) return cmd_casestudy(cs_input, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
