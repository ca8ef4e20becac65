#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lfmo/policy.hpp"
#include "lfmo/simulate.hpp"

namespace lfmo {

// CSV rendering used by the CLI and tests alike. Numbers carry 6 significant
// digits, matching the published tables.

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string sweep_csv_header() {
  return "r,p,E_T_fail,E_T_rep,E_N_fail,E_N_rep,E_C_fail,E_C_rep,LTMN,LTMC";
}

inline std::string sweep_csv_row(const PolicyEvaluation& ev) {
  double inf = std::numeric_limits<double>::infinity();
  std::string row = std::to_string(ev.r);
  row += "," + format_number(ev.p);
  row += "," + format_number(ev.e_t_fail.value_or(inf));
  row += "," + format_number(ev.e_t_rep);
  row += "," + format_number(ev.e_n_fail.value_or(inf));
  row += "," + format_number(ev.e_n_rep);
  row += "," + format_number(ev.e_c_fail.value_or(inf));
  row += "," + format_number(ev.e_c_rep);
  row += "," + format_number(ev.ltmn);
  row += "," + format_number(ev.ltmc);
  return row;
}

inline std::string sweep_csv(const std::vector<PolicyEvaluation>& rows) {
  std::string out = sweep_csv_header() + "\n";
  for (const auto& ev : rows) out += sweep_csv_row(ev) + "\n";
  return out;
}

inline std::string simulation_csv(const SimulationResult& result) {
  std::string out = "metric,q25,q50,q75\n";
  auto line = [&](const char* name, const MetricQuantiles& q) {
    out += std::string(name) + "," + format_number(q.q25) + "," +
           format_number(q.q50) + "," + format_number(q.q75) + "\n";
  };
  line("p", result.p_hat);
  line("e_t_fail", result.e_t_fail_hat);
  line("ltmn", result.ltmn_hat);
  line("ltmc", result.ltmc_hat);
  return out;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "horizon,r,metric,q25,q50,q75,theoretical\n";
  for (const auto& row : rows) {
    out += format_number(row.horizon);
    out += "," + std::to_string(row.r);
    out += "," + row.metric;
    out += "," + format_number(row.q25);
    out += "," + format_number(row.q50);
    out += "," + format_number(row.q75);
    out += "," + format_number(row.theoretical);
    out += "\n";
  }
  return out;
}

}  // namespace lfmo
