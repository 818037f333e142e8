#pragma once

// Facility feasibility table: for each instrument workflow, where on a
// measured worst-FCT-vs-utilization curve it would sit, and how much compute
// time each tier deadline leaves after the worst-case transfer.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamscore/model.hpp"

namespace streamscore::casestudy {

struct Workflow {
  std::string name;
  double throughput = 0.0;  // bytes/s the instrument must sustain
  double compute = 0.0;     // FLOP of analysis per one-second data unit
};

struct CurvePoint {
  double utilization = 0.0;
  double worst_fct = 0.0;  // seconds
};

struct CaseStudyInput {
  std::vector<Workflow> workflows;
  LinkSpec link;
  TierPolicy tiers;
  std::vector<CurvePoint> worst_fct_curve;  // sorted by utilization

  void validate() const;
};

struct Interpolated {
  double value = 0.0;
  bool extrapolated = false;
};

/// Piecewise-linear in utilization; outside the covered range the end
/// segment's line is extended and the result is marked extrapolated.
Interpolated interpolate_worst_fct(const std::vector<CurvePoint>& curve, double utilization);

struct TierBudget {
  std::string tier;
  double budget = 0.0;  // deadline - worst transfer, floored at 0
  bool feasible = false;
  std::optional<double> required_remote_rate;  // FLOP/s, when budget > 0
};

struct Row {
  std::string name;
  double throughput = 0.0;
  double utilization = 0.0;
  bool infeasible = false;
  std::optional<double> worst_fct;
  bool extrapolated = false;
  std::vector<TierBudget> budgets;
  std::string error;
};

/// Per-row failures land in Row::error; the other rows are still computed.
std::vector<Row> run(const CaseStudyInput& input);

/// LCLS-II workflows at 2023 rates on a 25 Gbps link, including the
/// Liquid Scattering variant reduced to 3 GB/s, and the two curve points
/// (64 %, 1.2 s) and (96 %, 6 s).
CaseStudyInput lcls_defaults();

CaseStudyInput input_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<Row>& rows);

}  // namespace streamscore::casestudy
