// Command-line front end: evaluates r-out-of-n:R repair policies for
// semi-coherent systems with LFMO component lifetimes, exactly and by
// simulation.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfmo/errors.hpp"
#include "lfmo/failure_chain.hpp"
#include "lfmo/json_io.hpp"
#include "lfmo/oracle.hpp"
#include "lfmo/policy.hpp"
#include "lfmo/signature.hpp"
#include "lfmo/simulate.hpp"
#include "lfmo/table_io.hpp"

namespace {

struct CommonOptions {
  std::string system_path;
  std::string subordinator_path;
  std::string costs_path;
  int r = 0;
  double horizon = 1e4;
  int reps = 1000;
  uint64_t seed = 0;
  std::string format = "csv";
  std::string out_path;
};

void emit(const CommonOptions& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) throw lfmo::ValidationError("cannot write " + opt.out_path);
  out << text;
}

lfmo::SystemStructure load_system(const CommonOptions& opt) {
  if (opt.system_path.empty())
    throw lfmo::ValidationError("--system FILE is required");
  auto structure = lfmo::parse_system(lfmo::load_json_file(opt.system_path));
  auto report = lfmo::validate_semi_coherent(structure);
  if (!report.valid)
    throw lfmo::ValidationError("system is not semi-coherent: " + report.reason);
  return structure;
}

lfmo::PsiTable load_psi(const CommonOptions& opt, int n) {
  if (opt.subordinator_path.empty())
    throw lfmo::ValidationError("--subordinator FILE is required");
  auto spec =
      lfmo::parse_subordinator(lfmo::load_json_file(opt.subordinator_path));
  return spec.psi(n);
}

lfmo::CostModel load_costs(const CommonOptions& opt, int n) {
  if (opt.costs_path.empty())
    throw lfmo::ValidationError("--costs FILE is required");
  return lfmo::parse_costs(lfmo::load_json_file(opt.costs_path), n);
}

void require_r(const CommonOptions& opt, int n) {
  if (opt.r < 1 || opt.r > n)
    throw lfmo::ValidationError("r must be in 1.." + std::to_string(n));
}

int run_signature(const CommonOptions& opt) {
  auto structure = load_system(opt);
  auto sig = lfmo::structural_signature(structure);
  if (opt.format == "json") {
    emit(opt, lfmo::signature_to_json(sig).dump(2) + "\n");
  } else {
    std::string text = "k,s_exact,s_float\n";
    for (int k = 1; k <= sig.n; ++k)
      text += std::to_string(k) + "," + sig.s[k - 1].to_string() + "," +
              lfmo::format_number(sig.s[k - 1].to_double()) + "\n";
    text += "minimal_signature";
    for (const auto& a : sig.a) text += "," + a.to_string();
    text += "\n";
    emit(opt, text);
  }
  return 0;
}

int run_evaluate(const CommonOptions& opt) {
  auto structure = load_system(opt);
  int n = structure.component_count();
  require_r(opt, n);
  auto chain = lfmo::FailureChain(load_psi(opt, n));
  auto costs = load_costs(opt, n);
  auto sig = lfmo::structural_signature(structure);
  auto ev = lfmo::evaluate_policy(sig, chain, opt.r, costs);
  if (opt.format == "json")
    emit(opt, lfmo::policy_evaluation_to_json(ev).dump(2) + "\n");
  else
    emit(opt, lfmo::sweep_csv_header() + "\n" + lfmo::sweep_csv_row(ev) + "\n");
  return 0;
}

int run_sweep(const CommonOptions& opt) {
  auto structure = load_system(opt);
  int n = structure.component_count();
  auto chain = lfmo::FailureChain(load_psi(opt, n));
  auto costs = load_costs(opt, n);
  auto sig = lfmo::structural_signature(structure);
  auto rows = lfmo::sweep_policies(sig, chain, costs);
  if (opt.format == "json") {
    lfmo::json j = lfmo::json::array();
    for (const auto& ev : rows) j.push_back(lfmo::policy_evaluation_to_json(ev));
    emit(opt, j.dump(2) + "\n");
  } else {
    emit(opt, lfmo::sweep_csv(rows));
  }
  return 0;
}

int run_mttf(const CommonOptions& opt) {
  auto structure = load_system(opt);
  int n = structure.component_count();
  auto chain = lfmo::FailureChain(load_psi(opt, n));
  auto sig = lfmo::structural_signature(structure);
  double mttf = lfmo::system_mttf(sig, chain);
  if (opt.format == "json") {
    lfmo::json j;
    j["mttf"] = mttf;
    emit(opt, j.dump(2) + "\n");
  } else {
    emit(opt, "mttf\n" + lfmo::format_number(mttf) + "\n");
  }
  return 0;
}

int run_process_signature(const CommonOptions& opt) {
  auto structure = load_system(opt);
  int n = structure.component_count();
  auto chain = lfmo::FailureChain(load_psi(opt, n));
  auto sig = lfmo::structural_signature(structure);
  auto q = lfmo::process_signature(sig, chain);
  if (opt.format == "json") {
    lfmo::json j;
    lfmo::json arr = lfmo::json::array();
    for (int k = 1; k <= n; ++k) arr.push_back(q[k]);
    j["process_signature"] = arr;
    emit(opt, j.dump(2) + "\n");
  } else {
    std::string text = "j,q\n";
    for (int k = 1; k <= n; ++k)
      text += std::to_string(k) + "," + lfmo::format_number(q[k]) + "\n";
    emit(opt, text);
  }
  return 0;
}

int run_simulate(const CommonOptions& opt) {
  auto structure = load_system(opt);
  int n = structure.component_count();
  require_r(opt, n);
  lfmo::SimulationConfig config{structure, load_psi(opt, n), opt.r,
                                load_costs(opt, n), opt.horizon, opt.reps,
                                opt.seed};
  auto result = lfmo::simulate_policy(config);
  if (opt.format == "json") {
    lfmo::json j;
    auto quant = [](const lfmo::MetricQuantiles& q) {
      return lfmo::json{{"q25", q.q25}, {"q50", q.q50}, {"q75", q.q75}};
    };
    j["p"] = quant(result.p_hat);
    j["e_t_fail"] = quant(result.e_t_fail_hat);
    j["ltmn"] = quant(result.ltmn_hat);
    j["ltmc"] = quant(result.ltmc_hat);
    j["total_repairs"] = result.total_repairs;
    j["total_system_failures"] = result.total_system_failures;
    j["total_component_failures"] = result.total_component_failures;
    emit(opt, j.dump(2) + "\n");
  } else {
    emit(opt, lfmo::simulation_csv(result));
  }
  return 0;
}

int run_convergence(const CommonOptions& opt,
                    const std::vector<double>& horizons) {
  auto structure = load_system(opt);
  int n = structure.component_count();
  require_r(opt, n);
  lfmo::SimulationConfig config{structure, load_psi(opt, n), opt.r,
                                load_costs(opt, n), 1.0, opt.reps, opt.seed};
  auto rows = lfmo::convergence_study(config, horizons);
  emit(opt, lfmo::convergence_csv(rows));
  return 0;
}

int run_oracle(const CommonOptions& opt) {
  auto structure = load_system(opt);
  int n = structure.component_count();
  require_r(opt, n);
  lfmo::FullStateModel model(structure, load_psi(opt, n));
  auto metrics = model.cycle_metrics(opt.r, load_costs(opt, n));
  if (opt.format == "json") {
    lfmo::json j;
    j["p"] = metrics.p;
    j["e_t_rep"] = metrics.e_t_rep;
    j["e_n_rep"] = metrics.e_n_rep;
    j["e_c_rep"] = metrics.e_c_rep;
    j["ltmc"] = metrics.ltmc;
    j["ltmn"] = metrics.ltmn;
    lfmo::json dist = lfmo::json::array();
    for (int jj = 1; jj <= n; ++jj) dist.push_back(metrics.n_rep_dist[jj]);
    j["n_rep_dist"] = dist;
    emit(opt, j.dump(2) + "\n");
  } else {
    std::string text = "p,E_T_rep,E_N_rep,E_C_rep,LTMN,LTMC\n";
    text += lfmo::format_number(metrics.p);
    text += "," + lfmo::format_number(metrics.e_t_rep);
    text += "," + lfmo::format_number(metrics.e_n_rep);
    text += "," + lfmo::format_number(metrics.e_c_rep);
    text += "," + lfmo::format_number(metrics.ltmn);
    text += "," + lfmo::format_number(metrics.ltmc);
    text += "\n";
    emit(opt, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact and simulated evaluation of r-out-of-n:R repair policies for "
      "semi-coherent systems with Levy-frailty Marshall-Olkin lifetimes"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::vector<double> horizons = {10, 100, 1000, 10000};

  auto add_common = [&](CLI::App* cmd, bool needs_costs, bool needs_sub) {
    cmd->add_option("--system", opt.system_path, "system spec JSON file")
        ->required();
    if (needs_sub)
      cmd->add_option("--subordinator", opt.subordinator_path,
                      "subordinator spec JSON file")
          ->required();
    if (needs_costs)
      cmd->add_option("--costs", opt.costs_path, "cost spec JSON file")
          ->required();
    cmd->add_option("--format", opt.format, "output format (csv|json)")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", opt.out_path, "output path (default stdout)");
  };

  auto* sig_cmd = app.add_subcommand("signature",
                                     "exact structural and minimal signature");
  add_common(sig_cmd, false, false);

  auto* eval_cmd =
      app.add_subcommand("evaluate", "one policy evaluation per Theorem-1 forms");
  add_common(eval_cmd, true, true);
  eval_cmd->add_option("--r", opt.r, "repair threshold")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "policy table for r = 1..n");
  add_common(sweep_cmd, true, true);

  auto* mttf_cmd = app.add_subcommand("mttf", "mean time to system failure");
  add_common(mttf_cmd, false, true);

  auto* proc_cmd = app.add_subcommand(
      "process-signature", "distribution of failed components at system failure");
  add_common(proc_cmd, false, true);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo policy simulation");
  add_common(sim_cmd, true, true);
  sim_cmd->add_option("--r", opt.r, "repair threshold")->required();
  sim_cmd->add_option("--horizon", opt.horizon,
                      "simulation horizon (events at t == horizon count)");
  sim_cmd->add_option("--reps", opt.reps, "replications");
  sim_cmd->add_option("--seed", opt.seed, "RNG seed (xoshiro256** substreams)");

  auto* conv_cmd = app.add_subcommand("convergence",
                                      "estimator quantiles across horizons");
  add_common(conv_cmd, true, true);
  conv_cmd->add_option("--r", opt.r, "repair threshold")->required();
  conv_cmd->add_option("--horizons", horizons, "ascending horizons");
  conv_cmd->add_option("--reps", opt.reps, "replications");
  conv_cmd->add_option("--seed", opt.seed, "RNG seed");

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "full-state Markov-chain cross-check (n <= 12)");
  add_common(oracle_cmd, true, true);
  oracle_cmd->add_option("--r", opt.r, "repair threshold")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sig_cmd->parsed()) return run_signature(opt);
    if (eval_cmd->parsed()) return run_evaluate(opt);
    if (sweep_cmd->parsed()) return run_sweep(opt);
    if (mttf_cmd->parsed()) return run_mttf(opt);
    if (proc_cmd->parsed()) return run_process_signature(opt);
    if (sim_cmd->parsed()) return run_simulate(opt);
    if (conv_cmd->parsed()) return run_convergence(opt, horizons);
    if (oracle_cmd->parsed()) return run_oracle(opt);
  } catch (const lfmo::NumericInstabilityError& e) {
    std::cerr << "numeric instability: " << e.what() << "\n";
    return 2;
  } catch (const lfmo::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
