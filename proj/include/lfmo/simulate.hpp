#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lfmo/errors.hpp"
#include "lfmo/failure_chain.hpp"
#include "lfmo/laplace_exponent.hpp"
#include "lfmo/numeric.hpp"
#include "lfmo/policy.hpp"
#include "lfmo/rng.hpp"
#include "lfmo/structure.hpp"

namespace lfmo {

// Monte Carlo simulation of the repair process. Dynamics consume only psi
// and the transition-matrix rows of the embedded chain: that keeps this
// module an independent check of the signature-based engine, and makes the
// sampler valid for infinite-activity subordinators as well.

struct SimulationConfig {
  SystemStructure structure;
  PsiTable psi;
  int r = 1;
  CostModel costs;
  double horizon = 0.0;
  int replications = 1000;
  uint64_t seed = 0;

  void validate() const {
    if (structure.component_count() != psi.n())
      throw ValidationError("structure and psi table disagree on n");
    if (r < 1 || r > psi.n()) throw ValidationError("r must be in 1..n");
    if (!(horizon > 0)) throw ValidationError("horizon must be > 0");
    if (replications < 1) throw ValidationError("replications must be >= 1");
    costs.validate(psi.n());
  }
};

struct ReplicationEstimates {
  std::optional<double> p_hat;         // failure repairs / repairs
  std::optional<double> e_t_fail_hat;  // time of last system failure / count
  double ltmn_hat = 0.0;               // component failures / horizon
  double ltmc_hat = 0.0;               // accrued cost / horizon
  int64_t repairs = 0;
  int64_t system_failures = 0;
  int64_t component_failures = 0;
};

struct MetricQuantiles {
  double q25 = 0.0, q50 = 0.0, q75 = 0.0;
};

struct SimulationResult {
  std::vector<ReplicationEstimates> replications;
  MetricQuantiles p_hat, e_t_fail_hat, ltmn_hat, ltmc_hat;
  int64_t total_repairs = 0;
  int64_t total_system_failures = 0;
  int64_t total_component_failures = 0;
};

// One failure round: exponential sojourn at rate psi(n_alive), batch size
// from the embedded-chain row, victims uniform without replacement among the
// alive components.
struct FailureRound {
  double sojourn = 0.0;
  std::vector<int> new_failures;
};

inline FailureRound sample_failure_round(
    std::span<const int> alive, const PsiTable& psi,
    const std::vector<std::vector<double>>& transition, Xoshiro256& rng) {
  int n = psi.n();
  int n_alive = static_cast<int>(alive.size());
  if (n_alive < 1) throw ValidationError("sample_failure_round: nothing alive");
  int i = n - n_alive;  // current failed count = embedded-chain state

  FailureRound round;
  round.sojourn = rng.exponential(psi.at(n_alive));

  double u = rng.uniform();
  int j = n;  // fall through to the last state on roundoff
  double acc = 0.0;
  for (int cand = i + 1; cand <= n; ++cand) {
    acc += transition[i][cand];
    if (u < acc) {
      j = cand;
      break;
    }
  }
  int batch = j - i;

  // partial Fisher-Yates over a scratch copy of the alive list
  std::vector<int> pool(alive.begin(), alive.end());
  for (int pick = 0; pick < batch; ++pick) {
    uint64_t idx = pick + rng.below(pool.size() - pick);
    std::swap(pool[pick], pool[idx]);
    round.new_failures.push_back(pool[pick]);
  }
  return round;
}

namespace detail {

inline ReplicationEstimates simulate_one(const SimulationConfig& config,
                                         const std::vector<std::vector<double>>& transition,
                                         uint64_t replication_index) {
  int n = config.psi.n();
  Xoshiro256 rng(config.seed, replication_index);
  ReplicationEstimates est;

  double t = 0.0;
  double total_cost = 0.0;
  double last_system_failure = 0.0;
  uint64_t full = n >= 64 ? ~0ull : ((1ull << n) - 1);
  uint64_t failed_mask = 0;
  std::vector<int> alive(n);
  for (int i = 0; i < n; ++i) alive[i] = i;

  while (true) {
    FailureRound round =
        sample_failure_round(alive, config.psi, transition, rng);
    t += round.sojourn;
    if (t > config.horizon) break;  // events strictly after the horizon are discarded

    for (int c : round.new_failures) failed_mask |= 1ull << c;
    est.component_failures += static_cast<int64_t>(round.new_failures.size());
    int failed_count = __builtin_popcountll(failed_mask);

    bool system_down = !config.structure.evaluate(full & ~failed_mask);
    if (failed_count >= config.r || system_down) {
      est.repairs += 1;
      total_cost += config.costs.component_cost(failed_count);
      if (system_down) {
        est.system_failures += 1;
        total_cost += config.costs.c_sys;
        last_system_failure = t;
      }
      failed_mask = 0;
      alive.assign(n, 0);
      for (int i = 0; i < n; ++i) alive[i] = i;
    } else {
      alive.clear();
      for (int i = 0; i < n; ++i)
        if (!((failed_mask >> i) & 1ull)) alive.push_back(i);
    }
  }

  if (est.repairs > 0)
    est.p_hat = static_cast<double>(est.system_failures) /
                static_cast<double>(est.repairs);
  if (est.system_failures > 0)
    est.e_t_fail_hat = last_system_failure /
                       static_cast<double>(est.system_failures);
  est.ltmn_hat = static_cast<double>(est.component_failures) / config.horizon;
  est.ltmc_hat = total_cost / config.horizon;
  return est;
}

inline MetricQuantiles quantiles_of(const std::vector<double>& sample) {
  MetricQuantiles q;
  q.q25 = quantile(sample, 0.25);
  q.q50 = quantile(sample, 0.50);
  q.q75 = quantile(sample, 0.75);
  return q;
}

}  // namespace detail

inline SimulationResult simulate_policy(const SimulationConfig& config,
                                        int thread_count = 0) {
  config.validate();
  auto transition = transition_matrix(config.psi);

  SimulationResult result;
  result.replications.resize(config.replications);
  if (thread_count <= 0)
    thread_count = static_cast<int>(
        std::max(1u, std::thread::hardware_concurrency()));
  thread_count = std::min<int>(thread_count, config.replications);

  auto worker = [&](int t) {
    for (int i = t; i < config.replications; i += thread_count)
      result.replications[i] =
          detail::simulate_one(config, transition, static_cast<uint64_t>(i));
  };
  if (thread_count == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  std::vector<double> p_sample, tfail_sample, ltmn_sample, ltmc_sample;
  for (const auto& rep : result.replications) {
    if (rep.p_hat) p_sample.push_back(*rep.p_hat);
    if (rep.e_t_fail_hat) tfail_sample.push_back(*rep.e_t_fail_hat);
    ltmn_sample.push_back(rep.ltmn_hat);
    ltmc_sample.push_back(rep.ltmc_hat);
    result.total_repairs += rep.repairs;
    result.total_system_failures += rep.system_failures;
    result.total_component_failures += rep.component_failures;
  }
  result.p_hat = detail::quantiles_of(p_sample);
  result.e_t_fail_hat = detail::quantiles_of(tfail_sample);
  result.ltmn_hat = detail::quantiles_of(ltmn_sample);
  result.ltmc_hat = detail::quantiles_of(ltmc_sample);
  return result;
}

struct ConvergenceRow {
  double horizon = 0.0;
  int r = 0;
  std::string metric;
  double q25 = 0.0, q50 = 0.0, q75 = 0.0;
  double theoretical = 0.0;
};

// Quantile table across simulation horizons; the theoretical column comes
// from the analytic engine. Substreams depend only on (seed, replication),
// so a longer horizon extends the same sample paths.
inline std::vector<ConvergenceRow> convergence_study(
    const SimulationConfig& base, const std::vector<double>& horizons,
    int thread_count = 0) {
  if (horizons.empty())
    throw ValidationError("convergence_study: no horizons given");
  for (size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0))
      throw ValidationError("convergence_study: horizons must be > 0");
    if (i > 0 && horizons[i] <= horizons[i - 1])
      throw ValidationError("convergence_study: horizons must be ascending");
  }
  Signature sig = structural_signature(base.structure);
  FailureChain chain(base.psi);
  PolicyEvaluation theory = evaluate_policy(sig, chain, base.r, base.costs);
  double theory_t_fail =
      theory.e_t_fail ? *theory.e_t_fail : std::numeric_limits<double>::infinity();

  std::vector<ConvergenceRow> rows;
  for (double horizon : horizons) {
    SimulationConfig config = base;
    config.horizon = horizon;
    SimulationResult sim = simulate_policy(config, thread_count);
    auto push = [&](const std::string& metric, const MetricQuantiles& q,
                    double theoretical) {
      rows.push_back({horizon, base.r, metric, q.q25, q.q50, q.q75, theoretical});
    };
    push("p", sim.p_hat, theory.p);
    push("e_t_fail", sim.e_t_fail_hat, theory_t_fail);
    push("ltmn", sim.ltmn_hat, theory.ltmn);
    push("ltmc", sim.ltmc_hat, theory.ltmc);
  }
  return rows;
}

}  // namespace lfmo
