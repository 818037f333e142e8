#include "streamscore/casestudy.hpp"

#include <cmath>
#include <stdexcept>

#include "streamscore/units.hpp"

namespace streamscore::casestudy {

using nlohmann::json;

namespace {

// Utilizations computed as ratios (2 GB/s / 25 Gbps) land within rounding of
// the curve's printed points.
constexpr double kRangeSlack = 1e-12;

double quantity_or_number(const json& v, Dimension dim) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_quantity(v.get<std::string>(), dim);
  throw ParseError("expected a number or quantity string");
}

}  // namespace

void CaseStudyInput::validate() const {
  link.validate();
  if (worst_fct_curve.empty()) throw DomainError("worst_fct_curve must not be empty");
  for (std::size_t i = 0; i < worst_fct_curve.size(); ++i) {
    const auto& p = worst_fct_curve[i];
    if (!(p.utilization >= 0.0 && p.utilization <= 1.0)) {
      throw DomainError("curve utilization must be in [0, 1]");
    }
    if (!(p.worst_fct >= 0.0)) throw DomainError("curve worst_fct must be >= 0");
    if (i > 0 && !(p.utilization > worst_fct_curve[i - 1].utilization)) {
      throw DomainError("curve points must be sorted by strictly increasing utilization");
    }
  }
}

Interpolated interpolate_worst_fct(const std::vector<CurvePoint>& curve, double u) {
  if (curve.empty()) throw DomainError("empty curve");
  if (curve.size() == 1) {
    return {curve.front().worst_fct, std::abs(u - curve.front().utilization) > kRangeSlack};
  }
  const bool below = u < curve.front().utilization - kRangeSlack;
  const bool above = u > curve.back().utilization + kRangeSlack;
  if (std::abs(u - curve.front().utilization) <= kRangeSlack) return {curve.front().worst_fct, false};
  if (std::abs(u - curve.back().utilization) <= kRangeSlack) return {curve.back().worst_fct, false};

  std::size_t hi = 1;
  while (hi + 1 < curve.size() && curve[hi].utilization < u) ++hi;
  const CurvePoint& a = curve[hi - 1];
  const CurvePoint& b = curve[hi];
  const double y = a.worst_fct + (u - a.utilization) * (b.worst_fct - a.worst_fct) / (b.utilization - a.utilization);
  return {y, below || above};
}

std::vector<Row> run(const CaseStudyInput& input) {
  input.validate();
  const double capacity = input.link.effective_rate();
  std::vector<Row> rows;
  for (const auto& wf : input.workflows) {
    Row row;
    row.name = wf.name;
    row.throughput = wf.throughput;
    try {
      if (!(wf.throughput > 0.0)) throw DomainError("throughput must be > 0");
      if (!(wf.compute >= 0.0)) throw DomainError("compute must be >= 0");
      row.utilization = wf.throughput / capacity;
      if (wf.throughput > capacity) {
        row.infeasible = true;
        rows.push_back(std::move(row));
        continue;
      }
      const Interpolated worst = interpolate_worst_fct(input.worst_fct_curve, row.utilization);
      row.worst_fct = worst.value;
      row.extrapolated = worst.extrapolated;

      // One data unit is one second of instrument output.
      const WorkloadSpec w = WorkloadSpec::from_work(wf.throughput, wf.compute);
      for (const auto& tier : input.tiers.tiers()) {
        TierBudget b;
        b.tier = tier.name;
        b.budget = transfer_budget(tier.deadline, worst.value);
        b.feasible = b.budget > 0.0;
        if (b.feasible) b.required_remote_rate = required_remote_rate(w, b.budget);
        row.budgets.push_back(std::move(b));
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CaseStudyInput lcls_defaults() {
  CaseStudyInput in;
  in.workflows = {
      {"Coherent Scattering (XPCS, XSVS)", 2e9, 34e12},
      {"Liquid Scattering", 4e9, 20e12},
      {"Liquid Scattering (reduced to 3 GB/s)", 3e9, 20e12},
  };
  in.link = LinkSpec{25e9 / 8.0, 1.0, 0.016};
  in.tiers = TierPolicy{};
  in.worst_fct_curve = {{0.64, 1.2}, {0.96, 6.0}};
  return in;
}

CaseStudyInput input_from_json(const json& j) {
  CaseStudyInput in = lcls_defaults();
  try {
    if (j.contains("workflows")) {
      in.workflows.clear();
      for (const auto& w : j.at("workflows")) {
        in.workflows.push_back({w.at("name").get<std::string>(),
                                quantity_or_number(w.at("throughput"), Dimension::ByteRate),
                                quantity_or_number(w.at("compute"), Dimension::Compute)});
      }
    }
    if (j.contains("link")) {
      const auto& l = j.at("link");
      if (l.contains("bandwidth")) in.link.bandwidth = quantity_or_number(l.at("bandwidth"), Dimension::ByteRate);
      if (l.contains("alpha")) in.link.alpha = l.at("alpha").get<double>();
      if (l.contains("rtt")) in.link.rtt = quantity_or_number(l.at("rtt"), Dimension::Time);
    }
    if (j.contains("tiers")) {
      std::vector<Tier> tiers;
      for (const auto& t : j.at("tiers")) {
        tiers.push_back({t.at("name").get<std::string>(), quantity_or_number(t.at("deadline"), Dimension::Time)});
      }
      in.tiers = TierPolicy(std::move(tiers));
    }
    if (j.contains("worst_fct_curve")) {
      in.worst_fct_curve.clear();
      for (const auto& p : j.at("worst_fct_curve")) {
        in.worst_fct_curve.push_back({p.at("utilization").get<double>(),
                                      quantity_or_number(p.at("worst_fct"), Dimension::Time)});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("case study input: ") + e.what());
  }
  in.validate();
  return in;
}

json to_json(const std::vector<Row>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json j = {{"name", r.name},
              {"throughput", r.throughput},
              {"utilization", r.utilization},
              {"infeasible", r.infeasible},
              {"extrapolated", r.extrapolated}};
    j["worst_fct"] = r.worst_fct ? json(*r.worst_fct) : json(nullptr);
    json budgets = json::array();
    for (const auto& b : r.budgets) {
      json bj = {{"tier", b.tier}, {"budget", b.budget}, {"feasible", b.feasible}};
      bj["required_remote_rate"] = b.required_remote_rate ? json(*b.required_remote_rate) : json(nullptr);
      budgets.push_back(bj);
    }
    j["budgets"] = budgets;
    if (!r.error.empty()) j["error"] = r.error;
    out.push_back(j);
  }
  return out;
}

}  // namespace streamscore::casestudy
