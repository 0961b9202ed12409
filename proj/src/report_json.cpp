#include "swd/report_json.hpp"

namespace swd {

Json to_json(const Vec& x) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(x[i]);
  return out;
}

Json to_json(const CertificateReport& report) {
  Json sandwich = Json::array();
  for (const auto& v : report.sandwich_violations) {
    sandwich.push_back({{"sample", v.sample},
                        {"x", to_json(v.x)},
                        {"value", v.value},
                        {"lower", v.lower},
                        {"upper", v.upper}});
  }
  Json decay = Json::array();
  for (const auto& v : report.decay_violations) {
    decay.push_back({{"sample", v.sample},
                     {"x", to_json(v.x)},
                     {"derivative", v.derivative},
                     {"bound", v.bound}});
  }
  return {{"label", report.label},
          {"samples_tested", report.samples_tested},
          {"passed", report.passed()},
          {"sandwich_violation_count", report.sandwich_violations.size()},
          {"decay_violation_count", report.decay_violations.size()},
          {"max_decay_slack", report.max_decay_slack},
          {"sandwich_violations", std::move(sandwich)},
          {"decay_violations", std::move(decay)}};
}

Json to_json(const DwellTable& table) {
  Json entries = Json::array();
  for (const auto& e : table.entries) {
    entries.push_back(
        {{"from", e.from}, {"to", e.to}, {"dwell", e.dwell}, {"unclamped", e.unclamped}});
  }
  return {{"eps", table.eps}, {"t_loc", table.t_loc}, {"entries", std::move(entries)}};
}

Json to_json(const TriangleAnalysis& analysis) {
  Json out = {{"eps", analysis.eps},
              {"direct_dwell", analysis.direct_dwell},
              {"via_dwell", analysis.via_dwell},
              {"gap", analysis.gap},
              {"gap_via_K", analysis.gap_via_K},
              {"gap_clamped", analysis.gap_clamped},
              {"K", analysis.K},
              {"inequality_holds", analysis.inequality_holds()}};
  out["eps0"] = analysis.eps0 ? Json(*analysis.eps0) : Json(nullptr);
  return out;
}

namespace {

Json record_json(const TrappingRecord& r) {
  return {{"index", r.index},         {"t", r.t},           {"mode", r.mode},
          {"value", r.value},         {"member", r.member}, {"strict_member", r.strict_member}};
}

}  // namespace

Json to_json(const TrappingReport& report) {
  Json records = Json::array();
  for (const auto& r : report.records) records.push_back(record_json(r));
  return {{"eps", report.eps},
          {"overall_pass", report.overall_pass},
          {"initial", record_json(report.initial)},
          {"records", std::move(records)}};
}

Json to_json(const IntervalVerdict& verdict) {
  return {{"index", verdict.index},
          {"t_start", verdict.t_start},
          {"t_end", verdict.t_end},
          {"mode", verdict.mode},
          {"nonincreasing", verdict.nonincreasing},
          {"max_relative_increase", verdict.max_relative_increase}};
}

Json to_json(const ConvergenceReport& report) {
  Json intervals = Json::array();
  for (const auto& v : report.intervals) intervals.push_back(to_json(v));
  Json terms = Json::array();
  for (const auto& t : report.terms) {
    terms.push_back({{"index", t.index},
                     {"from", t.from},
                     {"to", t.to},
                     {"mu", t.mu},
                     {"log_mu_tilde", t.log_mu_tilde},
                     {"log_product", t.log_product}});
  }
  Json out = {{"eps", report.eps},
              {"products_decreasing", report.products_decreasing},
              {"certified", report.certified},
              {"sampled_mu", report.sampled_mu}};
  out["entry_index"] = report.entry_index ? Json(*report.entry_index) : Json(nullptr);
  out["terms"] = std::move(terms);
  out["intervals"] = std::move(intervals);
  return out;
}

Json to_json(const DwellViolation& violation) {
  return {{"index", violation.index},
          {"from", violation.from},
          {"to", violation.to},
          {"gap", violation.gap},
          {"required", violation.required}};
}

Json to_json(std::span<const TubeSlice> tube) {
  Json out = Json::array();
  for (const auto& slice : tube) {
    Json points = Json::array();
    for (const auto& p : slice.points) points.push_back(to_json(p));
    out.push_back({{"t", slice.t}, {"points", std::move(points)}});
  }
  return out;
}

}  // namespace swd
