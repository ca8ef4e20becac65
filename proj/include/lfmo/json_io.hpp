#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfmo/errors.hpp"
#include "lfmo/laplace_exponent.hpp"
#include "lfmo/policy.hpp"
#include "lfmo/signature.hpp"
#include "lfmo/structure.hpp"

namespace lfmo {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

namespace detail {

inline double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError(std::string("missing numeric field \"") + key + "\"");
  return j[key].get<double>();
}

inline std::string require_kind(const json& j) {
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ValidationError("spec needs a string \"kind\" field");
  return j["kind"].get<std::string>();
}

}  // namespace detail

// -------- subordinator specs --------
// {"kind":"cpp_exp","mu":0.9,"lambda":0.2,"gamma":1.0}
// {"kind":"pure_drift","mu":1.0}
// {"kind":"gamma","beta":1.0,"eta":1.0}
// {"kind":"inverse_gaussian","beta":1.0,"eta":1.0}
// {"kind":"stable","alpha":0.5}
// {"kind":"table","values":[...]}

struct SubordinatorSpec {
  std::optional<LaplaceExponent> exponent;  // absent for raw tables
  std::optional<std::vector<double>> table;

  PsiTable psi(int n) const {
    if (exponent) return PsiTable::from_exponent(*exponent, n);
    if (static_cast<int>(table->size()) != n)
      throw ValidationError("psi table has " + std::to_string(table->size()) +
                            " values but the system has n = " + std::to_string(n));
    return PsiTable::from_values(*table);
  }
};

inline SubordinatorSpec parse_subordinator(const json& j) {
  std::string kind = detail::require_kind(j);
  SubordinatorSpec spec;
  if (kind == "pure_drift") {
    spec.exponent = LaplaceExponent(PureDrift{detail::require_number(j, "mu")});
  } else if (kind == "cpp_exp") {
    spec.exponent = LaplaceExponent(CompoundPoissonExp{
        detail::require_number(j, "mu"), detail::require_number(j, "lambda"),
        detail::require_number(j, "gamma")});
  } else if (kind == "gamma") {
    spec.exponent = LaplaceExponent(GammaProcess{
        detail::require_number(j, "beta"), detail::require_number(j, "eta")});
  } else if (kind == "inverse_gaussian") {
    spec.exponent = LaplaceExponent(InverseGaussianProcess{
        detail::require_number(j, "beta"), detail::require_number(j, "eta")});
  } else if (kind == "stable") {
    spec.exponent =
        LaplaceExponent(StableSubordinator{detail::require_number(j, "alpha")});
  } else if (kind == "table") {
    if (!j.contains("values") || !j["values"].is_array())
      throw ValidationError("table subordinator needs a \"values\" array");
    spec.table = j["values"].get<std::vector<double>>();
  } else {
    throw ValidationError("unknown subordinator kind: " + kind);
  }
  return spec;
}

inline json subordinator_to_json(const json& original) { return original; }

// -------- system specs --------
// {"kind":"k_out_of_n_f","n":5,"k":3}
// {"kind":"series","n":3} / {"kind":"parallel","n":3}
// {"kind":"formula","n":3,"expr":"(1&2)|3"}
// {"kind":"two_terminal","nodes":[...],"edges":[["A","B"],...],
//  "source":"A","target":"B"}

inline SystemStructure parse_system(const json& j) {
  std::string kind = detail::require_kind(j);
  if (kind == "k_out_of_n_f") {
    return SystemStructure::k_out_of_n_f(
        static_cast<int>(detail::require_number(j, "n")),
        static_cast<int>(detail::require_number(j, "k")));
  }
  if (kind == "series")
    return SystemStructure::series(
        static_cast<int>(detail::require_number(j, "n")));
  if (kind == "parallel")
    return SystemStructure::parallel(
        static_cast<int>(detail::require_number(j, "n")));
  if (kind == "formula") {
    if (!j.contains("expr") || !j["expr"].is_string())
      throw ValidationError("formula spec needs an \"expr\" string");
    return SystemStructure::formula(
        static_cast<int>(detail::require_number(j, "n")),
        j["expr"].get<std::string>());
  }
  if (kind == "two_terminal") {
    for (const char* key : {"nodes", "edges", "source", "target"})
      if (!j.contains(key))
        throw ValidationError(std::string("two_terminal spec needs \"") + key +
                              "\"");
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2)
        throw ValidationError("two_terminal edges must be [node, node] pairs");
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return SystemStructure::two_terminal(
        j["nodes"].get<std::vector<std::string>>(), edges,
        j["source"].get<std::string>(), j["target"].get<std::string>());
  }
  throw ValidationError("unknown system kind: " + kind);
}

inline json system_to_json(const SystemStructure& s) {
  json j;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, KOutOfNF>) {
          j["kind"] = "k_out_of_n_f";
          j["n"] = s.component_count();
          j["k"] = k.k;
        } else if constexpr (std::is_same_v<T, Series>) {
          j["kind"] = "series";
          j["n"] = s.component_count();
        } else if constexpr (std::is_same_v<T, Parallel>) {
          j["kind"] = "parallel";
          j["n"] = s.component_count();
        } else if constexpr (std::is_same_v<T, BooleanFormula>) {
          j["kind"] = "formula";
          j["n"] = s.component_count();
          j["expr"] = k.text;
        } else {
          j["kind"] = "two_terminal";
          j["nodes"] = k.nodes;
          json edges = json::array();
          for (auto [a, b] : k.edges)
            edges.push_back(json::array({k.nodes[a], k.nodes[b]}));
          j["edges"] = edges;
          j["source"] = k.nodes[k.source];
          j["target"] = k.nodes[k.target];
        }
      },
      s.kind());
  return j;
}

// -------- cost specs --------
// {"c_cmp":[1,2,3],"c_sys":30}  or  {"c_cmp":{"linear":1.0},"c_sys":30}

inline CostModel parse_costs(const json& j, int n) {
  if (!j.contains("c_cmp"))
    throw ValidationError("cost spec needs \"c_cmp\"");
  CostModel m;
  const auto& cc = j["c_cmp"];
  if (cc.is_array()) {
    m.c_cmp = cc.get<std::vector<double>>();
  } else if (cc.is_object() && cc.contains("linear")) {
    double unit = cc["linear"].get<double>();
    m = CostModel::linear(n, unit, 0.0);
  } else {
    throw ValidationError("\"c_cmp\" must be an array or {\"linear\": unit}");
  }
  m.c_sys = detail::require_number(j, "c_sys");
  m.validate(n);
  return m;
}

inline json costs_to_json(const CostModel& m) {
  json j;
  j["c_cmp"] = m.c_cmp;
  j["c_sys"] = m.c_sys;
  return j;
}

// -------- signature output --------

inline json signature_to_json(const Signature& sig) {
  json j;
  j["n"] = sig.n;
  json s_exact = json::array(), s_float = json::array();
  for (const auto& v : sig.s) {
    s_exact.push_back(v.to_string());
    s_float.push_back(v.to_double());
  }
  json a_exact = json::array(), a_float = json::array();
  for (const auto& v : sig.a) {
    a_exact.push_back(v.to_string());
    a_float.push_back(v.to_double());
  }
  json sbar_exact = json::array();
  for (const auto& v : sig.sbar) sbar_exact.push_back(v.to_string());
  j["s"] = s_exact;
  j["s_float"] = s_float;
  j["sbar"] = sbar_exact;
  j["minimal_signature"] = a_exact;
  j["minimal_signature_float"] = a_float;
  return j;
}

inline json policy_evaluation_to_json(const PolicyEvaluation& ev) {
  json j;
  j["r"] = ev.r;
  j["p"] = ev.p;
  j["e_t_rep"] = ev.e_t_rep;
  if (ev.e_t_fail) j["e_t_fail"] = *ev.e_t_fail; else j["e_t_fail"] = nullptr;
  if (ev.e_n_fail) j["e_n_fail"] = *ev.e_n_fail; else j["e_n_fail"] = nullptr;
  if (ev.e_c_fail) j["e_c_fail"] = *ev.e_c_fail; else j["e_c_fail"] = nullptr;
  j["e_n_rep"] = ev.e_n_rep;
  j["e_c_rep"] = ev.e_c_rep;
  j["ltmc"] = ev.ltmc;
  j["ltmn"] = ev.ltmn;
  j["repair_rate"] = ev.repair_rate;
  j["system_failure_rate"] = ev.system_failure_rate;
  json dist = json::array();
  for (size_t i = 1; i < ev.n_rep_dist.size(); ++i)
    dist.push_back(ev.n_rep_dist[i]);
  j["n_rep_dist"] = dist;
  if (!ev.n_fail_dist.empty()) {
    json fdist = json::array();
    for (size_t i = 1; i < ev.n_fail_dist.size(); ++i)
      fdist.push_back(ev.n_fail_dist[i]);
    j["n_fail_dist"] = fdist;
  } else {
    j["n_fail_dist"] = nullptr;
  }
  return j;
}

}  // namespace lfmo
