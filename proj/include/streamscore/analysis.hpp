#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamscore/flow_record.hpp"
#include "streamscore/fluidsim.hpp"
#include "streamscore/model.hpp"

namespace streamscore::analysis {

/// Statistics over successful records; percentiles are nearest-rank.
struct FctStats {
  std::size_t count = 0;
  std::size_t failures = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;

  double failure_rate() const {
    const auto total = count + failures;
    return total == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(total);
  }
};

struct CdfPoint {
  double fct = 0.0;
  double probability = 0.0;
};
using CdfSeries = std::vector<CdfPoint>;

enum class Regime { Low, Moderate, Severe };
const char* to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::Low;
  double worst_fct = 0.0;
  double utilization = 0.0;
  std::optional<double> sss;
  std::vector<std::pair<std::string, bool>> tier_feasibility;
};

/// Nearest-rank percentile of an ascending-sorted sample, p in (0, 100].
double nearest_rank(const std::vector<double>& sorted, double p);

FctStats summarize(const std::vector<FlowRecord>& records);

CdfSeries cdf(const std::vector<FlowRecord>& records);

/// Low below the first tier deadline, Severe at or above the second, else
/// Moderate. A single-tier policy never yields Moderate.
RegimeReport classify_regime(double worst_fct, const TierPolicy& policy);

struct UtilizationResult {
  double value = 0.0;
  bool clamped = false;
};

/// Bytes of successful records completing in [window_start, window_start + window]
/// over bandwidth * window. window_start defaults to the earliest spawn.
UtilizationResult utilization(const std::vector<FlowRecord>& records, const LinkSpec& link,
                              double window, std::optional<double> window_start = std::nullopt);

/// Ratio of each statistic, numerator / denominator.
nlohmann::json compare_stats(const FctStats& numerator, const FctStats& denominator);

nlohmann::json to_json(const FctStats& s);
nlohmann::json to_json(const CdfSeries& c);
nlohmann::json to_json(const RegimeReport& r);
nlohmann::json to_json(const Decision& d);

struct ReportInputs {
  std::vector<FlowRecord> records;
  TierPolicy policy;
  std::optional<LinkSpec> link;         // enables sss, utilization, baseline
  std::optional<double> transfer_bytes; // for t_theoretical; defaults to max record bytes
  std::optional<Decision> decision;
  std::optional<std::vector<FlowRecord>> comparison;  // second run, e.g. simulated
  std::string comparison_label = "comparison";
};

/// report.json: {stats, cdf, regime, sss, baseline?, decision?, comparison?, inputs}.
/// `inputs` embeds the fct values so the statistics can be recomputed.
nlohmann::json report(const ReportInputs& in);

/// Rebuilds records from a report's embedded inputs.
std::vector<FlowRecord> records_from_report(const nlohmann::json& report);

void write_cdf_csv(std::ostream& out, const CdfSeries& c);

struct LoadPoint {
  std::string label;
  double offered_load = 0.0;
  std::string mode;
  int parallel_flows = 0;
  double worst_fct = 0.0;
  std::optional<double> sss;
};

void write_load_csv(std::ostream& out, const std::vector<LoadPoint>& rows);
std::vector<LoadPoint> load_points(const std::vector<fluidsim::SweepRow>& rows);

}  // namespace streamscore::analysis
