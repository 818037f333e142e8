#include "streamscore/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace streamscore {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void WorkloadSpec::validate() const {
  require(finite_pos(unit_size), "unit_size must be > 0");
  require(finite_nonneg(complexity), "complexity must be >= 0");
  if (generation_interval) require(finite_pos(*generation_interval), "generation_interval must be > 0");
  if (frame_count) require(finite_pos(*frame_count), "frame_count must be > 0");
}

WorkloadSpec WorkloadSpec::from_work(double unit_size, double total_flop) {
  require(finite_pos(unit_size), "unit_size must be > 0");
  require(finite_nonneg(total_flop), "work must be >= 0");
  WorkloadSpec w;
  w.unit_size = unit_size;
  w.complexity = total_flop / unit_size;
  return w;
}

void ComputeSpec::validate() const {
  require(finite_pos(local_rate), "local_rate must be > 0");
  require(finite_pos(remote_rate), "remote_rate must be > 0");
}

void LinkSpec::validate() const {
  require(finite_pos(bandwidth), "bandwidth must be > 0");
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
  require(finite_nonneg(rtt), "rtt must be >= 0");
}

void IoOverhead::validate() const {
  require(std::isfinite(theta) && theta >= 1.0, "theta must be >= 1");
}

void ScanSpec::validate() const {
  require(finite_pos(frame_bytes), "frame_bytes must be > 0");
  require(finite_pos(frame_count), "frame_count must be > 0");
  require(finite_pos(frame_interval), "frame_interval must be > 0");
  require(finite_pos(files), "files must be > 0");
  require(files <= frame_count, "files must not exceed frame_count");
  require(finite_nonneg(per_file_overhead), "per_file_overhead must be >= 0");
}

TierPolicy::TierPolicy() : tiers_{{"Tier 1", 1.0}, {"Tier 2", 10.0}, {"Tier 3", 60.0}} {}

TierPolicy::TierPolicy(std::vector<Tier> tiers) : tiers_(std::move(tiers)) {
  require(!tiers_.empty(), "tier policy must not be empty");
  for (std::size_t i = 0; i < tiers_.size(); ++i) {
    require(finite_pos(tiers_[i].deadline), "tier deadlines must be > 0");
    if (i > 0) require(tiers_[i].deadline > tiers_[i - 1].deadline, "tier deadlines must be strictly increasing");
  }
}

const char* to_string(Choice c) {
  switch (c) {
    case Choice::Local: return "local";
    case Choice::RemoteStream: return "remote-stream";
    case Choice::Infeasible: return "infeasible";
  }
  return "?";
}

double t_local(const WorkloadSpec& w, const ComputeSpec& c) {
  require(finite_pos(c.local_rate), "local_rate must be > 0");
  return w.work() / c.local_rate;
}

double t_transfer(const WorkloadSpec& w, const LinkSpec& l) {
  require(finite_pos(l.effective_rate()), "effective transfer rate must be > 0");
  return w.unit_size / l.effective_rate();
}

double t_remote(const WorkloadSpec& w, const ComputeSpec& c) {
  require(finite_pos(c.remote_rate), "remote_rate must be > 0");
  return w.work() / c.remote_rate;
}

TimeBreakdown t_pct(const WorkloadSpec& w, const LinkSpec& l, const ComputeSpec& c,
                    const IoOverhead& io) {
  io.validate();
  TimeBreakdown b;
  b.t_transfer = t_transfer(w, l);
  b.t_remote = t_remote(w, c);
  b.t_io = (io.theta - 1.0) * b.t_transfer;
  b.t_pct = io.theta * b.t_transfer + b.t_remote;
  return b;
}

IoOverhead io_overhead_theta(double t_io, double t_transfer) {
  require(finite_pos(t_transfer), "t_transfer must be > 0");
  require(finite_nonneg(t_io), "t_io must be >= 0");
  return IoOverhead{(t_io + t_transfer) / t_transfer};
}

double sss(double t_worst, double t_theoretical) {
  require(finite_pos(t_worst), "t_worst must be > 0");
  require(finite_pos(t_theoretical), "t_theoretical must be > 0");
  return t_worst / t_theoretical;
}

double t_theoretical(double bytes, double bandwidth) {
  require(finite_pos(bandwidth), "bandwidth must be > 0");
  require(finite_nonneg(bytes), "bytes must be >= 0");
  return bytes / bandwidth;
}

double transfer_budget(double deadline, double t_worst_transfer) {
  return std::max(0.0, deadline - t_worst_transfer);
}

double required_remote_rate(const WorkloadSpec& w, double budget) {
  require(std::isfinite(budget) && budget > 0.0, "no compute budget left");
  return w.work() / budget;
}

std::optional<std::string> classify_tier(double t, const TierPolicy& p) {
  for (const auto& tier : p.tiers()) {
    if (t < tier.deadline) return tier.name;
  }
  return std::nullopt;
}

Decision decide(const WorkloadSpec& w, const LinkSpec& l, const ComputeSpec& c,
                const IoOverhead& io, const TierPolicy& p,
                std::optional<double> worst_case_transfer) {
  w.validate();
  l.validate();
  c.validate();
  io.validate();

  Decision d;
  d.t_local = t_local(w, c);
  d.remote = t_pct(w, l, c, io);
  if (worst_case_transfer) {
    require(finite_nonneg(*worst_case_transfer), "worst-case transfer must be >= 0");
    d.remote.t_transfer = *worst_case_transfer;
    d.remote.t_io = (io.theta - 1.0) * d.remote.t_transfer;
    d.remote.t_pct = io.theta * d.remote.t_transfer + d.remote.t_remote;
  }

  if (d.remote.t_pct > 0.0) {
    d.gain = d.t_local / d.remote.t_pct;
  } else {
    d.gain = d.t_local > 0.0 ? INFINITY : 1.0;
  }

  std::ostringstream why;
  if (w.generation_interval) {
    const double required = w.unit_size / *w.generation_interval;
    if (required > l.effective_rate()) {
      d.choice = Choice::Infeasible;
      why << "sustained rate " << required << " B/s exceeds effective link capacity "
          << l.effective_rate() << " B/s; local processing takes " << d.t_local << " s";
      d.rationale = why.str();
      return d;
    }
  }

  if (d.t_local <= d.remote.t_pct) {
    d.choice = Choice::Local;
    d.tier_achieved = classify_tier(d.t_local, p);
    why << "local " << d.t_local << " s <= remote " << d.remote.t_pct << " s";
  } else {
    d.choice = Choice::RemoteStream;
    d.tier_achieved = classify_tier(d.remote.t_pct, p);
    why << "remote " << d.remote.t_pct << " s < local " << d.t_local << " s";
  }
  d.rationale = why.str();
  return d;
}

double delay_total(const DelayDecomposition& d) {
  return d.d_proc + d.d_queue + d.d_trans + d.d_prop;
}

double continuum_delay(const DelayDecomposition& d) { return d.d_prop; }

FileStreamComparison file_vs_stream(const ScanSpec& s, const LinkSpec& l) {
  s.validate();
  require(finite_pos(l.effective_rate()), "effective transfer rate must be > 0");
  const double rate = l.effective_rate();
  const double total_bytes = s.frame_bytes * s.frame_count;
  const double generation = s.frame_interval * s.frame_count;
  const double wire = total_bytes / rate;

  const double frame_wire = s.frame_bytes / rate;

  FileStreamComparison r;
  // FIFO pipeline: frame k is ready at (k+1)*interval and leaves the link
  // one frame_wire after both it is ready and frame k-1 has left. The last
  // departure is bounded either by generation (last frame drains) or by the
  // link (first frame waits one interval, then the wire never idles).
  r.t_stream = std::max(generation + frame_wire, s.frame_interval + wire);
  // Files are staged only after the scan is written, then moved.
  r.t_file = generation + s.files * s.per_file_overhead + wire;
  r.reduction = 1.0 - r.t_stream / r.t_file;
  return r;
}

}  // namespace streamscore
