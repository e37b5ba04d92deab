#pragma once

// Output artifacts: the per-interval profile CSV, the event log, and JSON
// penalty / comparison reports. See docs/formats.md.

#include <charconv>
#include <ostream>
#include <string>

#include "json.hpp"

#include "hanemu/lmu.hpp"
#include "hanemu/simnet.hpp"

namespace hanemu::report {

// Fixed six decimals; identical bytes for identical doubles.
inline std::string format_real(double v, int precision = 6) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  std::string s(buf, end);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.000000"
  return s;
}

inline void write_profile_csv(std::ostream& os, const simnet::SimResult& r) {
  os << "interval,aggregate_kw,mdl_kw,over_kw";
  for (const auto& id : r.load_ids) os << ",relay_" << id;
  os << '\n';

  std::map<std::string, std::vector<bool>, std::less<>> on;
  for (const auto& id : r.load_ids) {
    auto& row = on[id];
    row.assign(r.aggregate_profile.size(), false);
    for (int t : r.per_load_on_intervals.at(id)) row[static_cast<std::size_t>(t)] = true;
  }
  for (std::size_t t = 0; t < r.aggregate_profile.size(); ++t) {
    const double agg = r.aggregate_profile[t];
    const double mdl = r.mdl[t];
    os << t << ',' << format_real(agg) << ',' << format_real(mdl) << ',' << format_real(std::max(0.0, agg - mdl));
    for (const auto& id : r.load_ids) os << ',' << (on[id][t] ? 1 : 0);
    os << '\n';
  }
}

// One delivered message per line: "<delivery sim-seconds> <protocol line>".
inline void write_event_log(std::ostream& os, const simnet::SimResult& r) {
  for (const auto& e : r.event_log) os << format_real(e.delivered_at) << ' ' << e.line;
}

inline nlohmann::json to_json(const lmu::PenaltyReport& p) {
  return {{"energy_over_mdl_kwh", p.energy_over_mdl},
          {"rate_x", p.rate_x},
          {"penalty", p.penalty},
          {"intervals_over", p.intervals_over}};
}

struct RunReport {
  lmu::PenaltyReport case1;  // no scheduling
  lmu::PenaltyReport case2;  // priority scheduling
  double savings = 0.0;
  double savings_energy = 0.0;  // kWh
};

inline RunReport make_run_report(const lmu::PenaltyReport& case1, const lmu::PenaltyReport& case2) {
  return {case1, case2, case1.penalty - case2.penalty, case1.energy_over_mdl - case2.energy_over_mdl};
}

inline nlohmann::json to_json(const RunReport& r) {
  return {{"case1", to_json(r.case1)},
          {"case2", to_json(r.case2)},
          {"savings", r.savings},
          {"savings_energy_kwh", r.savings_energy}};
}

}  // namespace hanemu::report
