#pragma once

// Completion-time model for local vs. remote (streamed) processing of an
// instrument workload. All quantities are SI: bytes, bytes/s, FLOP, FLOP/s,
// seconds. Everything here is a pure function.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace streamscore {

/// Invalid model input (zero rate, negative size, theta < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct WorkloadSpec {
  double unit_size = 0.0;   // bytes per data unit
  double complexity = 0.0;  // FLOP per byte
  std::optional<double> generation_interval;  // seconds per data unit
  std::optional<double> frame_count;

  double work() const { return complexity * unit_size; }
  void validate() const;

  /// Builds a workload from a total FLOP count instead of FLOP/byte.
  static WorkloadSpec from_work(double unit_size, double total_flop);
};

struct ComputeSpec {
  double local_rate = 0.0;   // FLOP/s
  double remote_rate = 0.0;  // FLOP/s

  double ratio() const { return remote_rate / local_rate; }
  void validate() const;
};

struct LinkSpec {
  double bandwidth = 0.0;  // bytes/s
  double alpha = 1.0;      // achieved / raw rate, (0, 1]
  double rtt = 0.0;        // seconds

  double effective_rate() const { return alpha * bandwidth; }
  void validate() const;
};

struct IoOverhead {
  double theta = 1.0;
  void validate() const;
};

struct TimeBreakdown {
  double t_transfer = 0.0;
  double t_remote = 0.0;
  double t_io = 0.0;
  double t_pct = 0.0;
};

struct DelayDecomposition {
  double d_proc = 0.0;
  double d_queue = 0.0;
  double d_trans = 0.0;
  double d_prop = 0.0;
};

/// Label attached wherever continuum_delay() is reported.
inline constexpr const char* kOptimisticBaselineLabel = "optimistic baseline";

struct Tier {
  std::string name;
  double deadline = 0.0;  // seconds; met when t < deadline
};

class TierPolicy {
 public:
  /// Tier 1 < 1 s, Tier 2 < 10 s, Tier 3 < 60 s.
  TierPolicy();
  explicit TierPolicy(std::vector<Tier> tiers);

  const std::vector<Tier>& tiers() const { return tiers_; }

 private:
  std::vector<Tier> tiers_;
};

enum class Choice { Local, RemoteStream, Infeasible };
const char* to_string(Choice c);

struct Decision {
  Choice choice = Choice::Local;
  double gain = 1.0;  // t_local / t_pct; > 1 favours streaming
  std::optional<std::string> tier_achieved;
  std::string rationale;
  double t_local = 0.0;
  TimeBreakdown remote;
};

struct ScanSpec {
  double frame_bytes = 0.0;
  double frame_count = 0.0;
  double frame_interval = 0.0;  // seconds between frames
  double files = 1.0;
  double per_file_overhead = 0.0;  // seconds per file

  void validate() const;
};

struct FileStreamComparison {
  double t_stream = 0.0;
  double t_file = 0.0;
  double reduction = 0.0;  // 1 - t_stream / t_file
};

double t_local(const WorkloadSpec& w, const ComputeSpec& c);
double t_transfer(const WorkloadSpec& w, const LinkSpec& l);
double t_remote(const WorkloadSpec& w, const ComputeSpec& c);
TimeBreakdown t_pct(const WorkloadSpec& w, const LinkSpec& l, const ComputeSpec& c,
                    const IoOverhead& io);

/// theta = (t_io + t_transfer) / t_transfer.
IoOverhead io_overhead_theta(double t_io, double t_transfer);

/// Streaming Speed Score: worst observed transfer time over the ideal one.
double sss(double t_worst, double t_theoretical);

/// Ideal transfer time, size / raw bandwidth (transmission delay only).
double t_theoretical(double bytes, double bandwidth);

/// Compute time left under a deadline after the worst-case transfer.
double transfer_budget(double deadline, double t_worst_transfer);

/// Minimum remote FLOP/s that finishes the workload within budget.
double required_remote_rate(const WorkloadSpec& w, double budget);

std::optional<std::string> classify_tier(double t, const TierPolicy& p);

/// Local vs. streamed remote processing. When worst_case_transfer is given it
/// replaces the modelled transfer time.
Decision decide(const WorkloadSpec& w, const LinkSpec& l, const ComputeSpec& c,
                const IoOverhead& io, const TierPolicy& p,
                std::optional<double> worst_case_transfer = std::nullopt);

double delay_total(const DelayDecomposition& d);

/// Propagation-only delay. Lower bound of delay_total; report it as
/// kOptimisticBaselineLabel.
double continuum_delay(const DelayDecomposition& d);

FileStreamComparison file_vs_stream(const ScanSpec& s, const LinkSpec& l);

}  // namespace streamscore
