#include "streamscore/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace streamscore::analysis {

using nlohmann::json;

namespace {

std::vector<double> sorted_ok_fcts(const std::vector<FlowRecord>& records) {
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& r : records) {
    if (r.ok) v.push_back(r.fct_s);
  }
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Low: return "low";
    case Regime::Moderate: return "moderate";
    case Regime::Severe: return "severe";
  }
  return "?";
}

double nearest_rank(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty sample");
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must be in (0, 100]");
  const auto n = static_cast<double>(sorted.size());
  // Shrunk slightly so that 0.9 * 100 landing on 90.00000000000001 still ranks 90.
  const double exact = p / 100.0 * n;
  auto rank = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

FctStats summarize(const std::vector<FlowRecord>& records) {
  const std::vector<double> fcts = sorted_ok_fcts(records);
  if (fcts.empty()) throw std::invalid_argument("no successful records to summarize");
  FctStats s;
  s.count = fcts.size();
  s.failures = records.size() - fcts.size();
  s.min = fcts.front();
  s.max = fcts.back();
  s.mean = std::accumulate(fcts.begin(), fcts.end(), 0.0) / static_cast<double>(fcts.size());
  s.mean = std::clamp(s.mean, s.min, s.max);
  s.p50 = nearest_rank(fcts, 50.0);
  s.p90 = nearest_rank(fcts, 90.0);
  s.p99 = nearest_rank(fcts, 99.0);
  return s;
}

CdfSeries cdf(const std::vector<FlowRecord>& records) {
  const std::vector<double> fcts = sorted_ok_fcts(records);
  if (fcts.empty()) throw std::invalid_argument("no successful records for CDF");
  const auto n = static_cast<double>(fcts.size());
  CdfSeries out;
  for (std::size_t i = 0; i < fcts.size(); ++i) {
    // Equal values collapse onto their highest rank.
    if (i + 1 < fcts.size() && fcts[i + 1] == fcts[i]) continue;
    out.push_back({fcts[i], i + 1 == fcts.size() ? 1.0 : static_cast<double>(i + 1) / n});
  }
  return out;
}

RegimeReport classify_regime(double worst_fct, const TierPolicy& policy) {
  const auto& tiers = policy.tiers();
  RegimeReport r;
  r.worst_fct = worst_fct;
  if (worst_fct < tiers.front().deadline) {
    r.regime = Regime::Low;
  } else if (tiers.size() < 2 || worst_fct >= tiers[1].deadline) {
    r.regime = Regime::Severe;
  } else {
    r.regime = Regime::Moderate;
  }
  for (const auto& t : tiers) r.tier_feasibility.emplace_back(t.name, worst_fct < t.deadline);
  return r;
}

UtilizationResult utilization(const std::vector<FlowRecord>& records, const LinkSpec& link,
                              double window, std::optional<double> window_start) {
  if (!(window > 0.0)) throw std::invalid_argument("utilization window must be > 0");
  if (!(link.bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  if (records.empty()) return {};
  double start = 0.0;
  if (window_start) {
    start = *window_start;
  } else {
    start = records.front().spawn_s;
    for (const auto& r : records) start = std::min(start, r.spawn_s);
  }
  const double end = start + window;
  double delivered = 0.0;
  for (const auto& r : records) {
    if (r.ok && r.complete_s >= start && r.complete_s <= end + 1e-12) {
      delivered += static_cast<double>(r.bytes);
    }
  }
  UtilizationResult u;
  u.value = delivered / (link.bandwidth * window);
  if (u.value > 1.0) {
    u.value = 1.0;
    u.clamped = true;
  }
  return u;
}

json compare_stats(const FctStats& a, const FctStats& b) {
  auto ratio = [](double x, double y) -> json {
    if (y == 0.0) return nullptr;
    return x / y;
  };
  return {{"max", ratio(a.max, b.max)},   {"mean", ratio(a.mean, b.mean)},
          {"p50", ratio(a.p50, b.p50)},   {"p90", ratio(a.p90, b.p90)},
          {"p99", ratio(a.p99, b.p99)}};
}

json to_json(const FctStats& s) {
  return {{"count", s.count}, {"failures", s.failures}, {"failure_rate", s.failure_rate()},
          {"min", s.min},     {"max", s.max},           {"mean", s.mean},
          {"p50", s.p50},     {"p90", s.p90},           {"p99", s.p99}};
}

json to_json(const CdfSeries& c) {
  json arr = json::array();
  for (const auto& p : c) arr.push_back({p.fct, p.probability});
  return arr;
}

json to_json(const RegimeReport& r) {
  json tiers = json::object();
  for (const auto& [name, ok] : r.tier_feasibility) tiers[name] = ok;
  json j = {{"regime", to_string(r.regime)},
            {"worst_fct", r.worst_fct},
            {"utilization", r.utilization},
            {"tier_feasibility", tiers}};
  j["sss"] = r.sss ? json(*r.sss) : json(nullptr);
  return j;
}

json to_json(const Decision& d) {
  json j = {{"choice", to_string(d.choice)},
            {"gain", std::isfinite(d.gain) ? json(d.gain) : json("inf")},
            {"t_local", d.t_local},
            {"t_transfer", d.remote.t_transfer},
            {"t_remote", d.remote.t_remote},
            {"t_io", d.remote.t_io},
            {"t_pct", d.remote.t_pct},
            {"rationale", d.rationale}};
  j["tier_achieved"] = d.tier_achieved ? json(*d.tier_achieved) : json(nullptr);
  return j;
}

json report(const ReportInputs& in) {
  const FctStats stats = summarize(in.records);
  RegimeReport regime = classify_regime(stats.max, in.policy);

  json out;
  out["stats"] = to_json(stats);
  out["cdf"] = to_json(cdf(in.records));
  out["sss"] = nullptr;

  if (in.link) {
    double bytes = 0.0;
    if (in.transfer_bytes) {
      bytes = *in.transfer_bytes;
    } else {
      for (const auto& r : in.records) bytes = std::max(bytes, static_cast<double>(r.bytes));
    }
    double first = in.records.front().spawn_s;
    double last = in.records.front().complete_s;
    for (const auto& r : in.records) {
      first = std::min(first, r.spawn_s);
      if (r.ok) last = std::max(last, r.complete_s);
    }
    if (last > first) regime.utilization = utilization(in.records, *in.link, last - first, first).value;

    if (bytes > 0.0) {
      const double ideal = t_theoretical(bytes, in.link->bandwidth);
      regime.sss = sss(stats.max, ideal);
      out["sss"] = *regime.sss;

      DelayDecomposition d;
      d.d_trans = ideal;
      d.d_prop = in.link->rtt / 2.0;
      d.d_queue = std::max(0.0, stats.max - d.d_trans - d.d_prop);
      out["baseline"] = {{"delay_total_s", delay_total(d)},
                         {"continuum_delay_s", continuum_delay(d)},
                         {"continuum_label", kOptimisticBaselineLabel},
                         {"d_trans_s", d.d_trans},
                         {"d_prop_s", d.d_prop},
                         {"d_queue_s", d.d_queue}};
      out["link_efficiency"] = {
          {"alpha_mean", bytes / (in.link->bandwidth * stats.mean)},
          {"alpha_worst", bytes / (in.link->bandwidth * stats.max)}};
    }
  }
  out["regime"] = to_json(regime);

  if (in.decision) out["decision"] = to_json(*in.decision);

  if (in.comparison) {
    const FctStats other = summarize(*in.comparison);
    out["comparison"] = {{"label", in.comparison_label},
                         {"stats", to_json(other)},
                         {"ratios", compare_stats(stats, other)}};
  } else {
    out["comparison"] = json::object();
  }

  json fcts = json::array();
  std::size_t failures = 0;
  for (const auto& r : in.records) {
    if (r.ok) {
      fcts.push_back(r.fct_s);
    } else {
      ++failures;
    }
  }
  out["inputs"] = {{"fct_s", fcts}, {"failures", failures}};
  return out;
}

std::vector<FlowRecord> records_from_report(const json& rep) {
  std::vector<FlowRecord> out;
  const auto& inputs = rep.at("inputs");
  std::int64_t id = 0;
  for (const auto& v : inputs.at("fct_s")) {
    FlowRecord r;
    r.client_id = id++;
    r.fct_s = v.get<double>();
    r.complete_s = r.fct_s;
    out.push_back(r);
  }
  const auto failures = inputs.at("failures").get<std::size_t>();
  for (std::size_t i = 0; i < failures; ++i) {
    FlowRecord r;
    r.client_id = id++;
    r.ok = false;
    r.error = "failed";
    out.push_back(r);
  }
  return out;
}

void write_cdf_csv(std::ostream& out, const CdfSeries& c) {
  out << "fct_s,cumulative_probability\n";
  out.precision(17);
  for (const auto& p : c) out << p.fct << ',' << p.probability << '\n';
}

void write_load_csv(std::ostream& out, const std::vector<LoadPoint>& rows) {
  out << "label,offered_load,mode,parallel_flows,worst_fct_s,sss\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.label << ',' << r.offered_load << ',' << r.mode << ',' << r.parallel_flows << ','
        << r.worst_fct << ',';
    if (r.sss) out << *r.sss;
    out << '\n';
  }
}

std::vector<LoadPoint> load_points(const std::vector<fluidsim::SweepRow>& rows) {
  std::vector<LoadPoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    LoadPoint p;
    std::ostringstream label;
    label << 'c' << r.concurrency << "_p" << r.parallel_flows;
    p.label = label.str();
    p.offered_load = r.offered_load;
    p.mode = fluidsim::to_string(r.mode);
    p.parallel_flows = r.parallel_flows;
    p.worst_fct = r.worst_fct;
    p.sss = r.sss;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace streamscore::analysis
