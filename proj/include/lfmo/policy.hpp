#pragma once

#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "lfmo/errors.hpp"
#include "lfmo/failure_chain.hpp"
#include "lfmo/numeric.hpp"
#include "lfmo/signature.hpp"

namespace lfmo {

// Repair cost structure: c_cmp[j-1] is the cost of repairing j failed
// components; c_sys is the additional charge when the system itself failed.
struct CostModel {
  std::vector<double> c_cmp;
  double c_sys = 0.0;

  static CostModel linear(int n, double unit_cost, double c_sys) {
    CostModel m;
    m.c_cmp.resize(n);
    for (int j = 1; j <= n; ++j) m.c_cmp[j - 1] = unit_cost * j;
    m.c_sys = c_sys;
    return m;
  }

  double component_cost(int j) const {
    if (j < 1 || j > static_cast<int>(c_cmp.size()))
      throw ValidationError("cost lookup out of range: j=" + std::to_string(j));
    return c_cmp[j - 1];
  }

  void validate(int n) const {
    if (static_cast<int>(c_cmp.size()) != n)
      throw ValidationError("cost model length " + std::to_string(c_cmp.size()) +
                            " != n = " + std::to_string(n));
    for (double c : c_cmp)
      if (!(c >= 0) || !std::isfinite(c))
        throw ValidationError("component repair costs must be finite and >= 0");
    if (!(c_sys >= 0) || !std::isfinite(c_sys))
      throw ValidationError("system repair cost must be finite and >= 0");
  }
};

// Outputs of one policy evaluation. e_t_fail / e_c_fail / e_n_fail are absent
// when p = 0: the system never fails under that policy, so the failure cycle
// quantities have no finite value.
struct PolicyEvaluation {
  int r = 0;
  double p = 0.0;                      // P(first repair is a system failure)
  double e_t_rep = 0.0;                // E[T_rep]
  std::optional<double> e_t_fail;      // E[T_fail] = E[T_rep]/p
  std::vector<double> n_rep_dist;      // index j = 1..n at [j]; [0] unused
  std::vector<double> n_fail_dist;     // P(N(T_fail)=j); empty when p = 0
  double e_n_rep = 0.0;                // E N[0, T_rep]
  std::optional<double> e_n_fail;      // E N[0, T_fail]
  double e_c_rep = 0.0;                // E C[0, T_rep]
  std::optional<double> e_c_fail;      // E C[0, T_fail]
  double ltmc = 0.0;                   // long-term mean cost per unit time
  double ltmn = 0.0;                   // long-term component failures per unit time
  double repair_rate = 0.0;            // 1 / E[T_rep]
  double system_failure_rate = 0.0;    // p / E[T_rep]

  bool never_fails() const { return !e_t_fail.has_value(); }
};

namespace detail {

inline void check_signature_vector(std::span<const double> s, int n) {
  if (static_cast<int>(s.size()) != n)
    throw ValidationError("signature length " + std::to_string(s.size()) +
                          " != n = " + std::to_string(n));
  CompensatedSum total;
  for (double v : s) {
    if (!(v >= -1e-12) || !std::isfinite(v))
      throw ValidationError("signature entries must be >= 0");
    total.add(v);
  }
  if (std::abs(total.value() - 1.0) > 1e-9)
    throw ValidationError("signature must sum to 1, got " +
                          std::to_string(total.value()));
}

}  // namespace detail

// Theorem-1 evaluation of the r-out-of-n:R policy for a system given by its
// structural signature. Recomputes p along both routes (the direct sum and
// one minus the complement sum) and refuses to return if they disagree.
inline PolicyEvaluation evaluate_policy(std::span<const double> s,
                                        const FailureChain& chain, int r,
                                        const CostModel& costs) {
  int n = chain.n();
  detail::check_signature_vector(s, n);
  costs.validate(n);
  if (r < 1 || r > n) throw ValidationError("r must be in 1..n");

  PolicyEvaluation out;
  out.r = r;

  // p = sum_{k<=r} s_k + sum_{k>r} s_k P(T_r = T_k)
  CompensatedSum p_direct;
  for (int k = 1; k <= r; ++k) p_direct.add(s[k - 1]);
  for (int k = r + 1; k <= n; ++k)
    p_direct.add(s[k - 1] * chain.prob_order_eq(r, k));
  // 1 - p = sum_{k>r} s_k P(T_r < T_k)
  CompensatedSum p_complement;
  for (int k = r + 1; k <= n; ++k)
    p_complement.add(s[k - 1] * chain.prob_order_lt(r, k));
  double p = p_direct.value();
  if (p < -1e-10 || p > 1.0 + 1e-10)
    throw NumericInstabilityError("p outside [0,1]: " + std::to_string(p));
  if (std::abs(p + p_complement.value() - 1.0) > 1e-10)
    throw NumericInstabilityError(
        "the two routes to p disagree: " + std::to_string(p) + " vs 1-" +
        std::to_string(p_complement.value()));
  p = std::min(1.0, std::max(0.0, p));
  out.p = p;

  // P(N(T_rep) = j) = sum_k s_k P(N(T_{min(r,k):n}) = j)
  out.n_rep_dist.assign(n + 1, 0.0);
  CompensatedSum dist_total;
  for (int j = 1; j <= n; ++j) {
    CompensatedSum sum;
    for (int k = 1; k <= n; ++k) {
      int m = std::min(r, k);
      if (m <= j && s[k - 1] != 0.0)
        sum.add(s[k - 1] * chain.prob_count_at_order(m, j));
    }
    out.n_rep_dist[j] = clamp_probability_like(sum.value(), "N(T_rep) mass");
    dist_total.add(out.n_rep_dist[j]);
  }
  if (std::abs(dist_total.value() - 1.0) > 1e-10)
    throw NumericInstabilityError("N(T_rep) distribution sums to " +
                                  std::to_string(dist_total.value()));

  // E[T_rep] = sum_k s_k E[T_{min(k,r):n}]
  CompensatedSum t_rep;
  for (int k = 1; k <= n; ++k)
    if (s[k - 1] != 0.0)
      t_rep.add(s[k - 1] * chain.order_stat_mean(std::min(k, r)));
  out.e_t_rep = t_rep.value();

  CompensatedSum n_rep;
  for (int j = 1; j <= n; ++j) n_rep.add(j * out.n_rep_dist[j]);
  out.e_n_rep = n_rep.value();

  CompensatedSum c_rep;
  c_rep.add(p * costs.c_sys);
  for (int j = 1; j <= n; ++j)
    c_rep.add(costs.component_cost(j) * out.n_rep_dist[j]);
  out.e_c_rep = c_rep.value();

  out.ltmc = out.e_c_rep / out.e_t_rep;
  out.ltmn = out.e_n_rep / out.e_t_rep;
  out.repair_rate = 1.0 / out.e_t_rep;

  if (p > 0.0) {
    out.e_t_fail = out.e_t_rep / p;
    out.e_c_fail = out.e_c_rep / p;
    out.e_n_fail = out.e_n_rep / p;
    out.system_failure_rate = p / out.e_t_rep;
    // conditional distribution of N at a failure repair
    out.n_fail_dist.assign(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) {
      CompensatedSum sum;
      for (int k = 1; k <= j; ++k) {
        int m = std::min(r, k);
        if (m <= j && s[k - 1] != 0.0)
          sum.add(s[k - 1] * chain.prob_count_at_order(m, j));
      }
      out.n_fail_dist[j] =
          clamp_probability_like(sum.value(), "N(T_fail) mass") / p;
    }
  } else {
    out.system_failure_rate = 0.0;
  }
  return out;
}

inline PolicyEvaluation evaluate_policy(const Signature& sig,
                                        const FailureChain& chain, int r,
                                        const CostModel& costs) {
  auto s = sig.s_doubles();
  return evaluate_policy(s, chain, r, costs);
}

// Process signature without repairs: q_j = sum_{k<=j} s_k QQ_{k-1 -> j}.
inline std::vector<double> process_signature(std::span<const double> s,
                                             const FailureChain& chain) {
  int n = chain.n();
  detail::check_signature_vector(s, n);
  std::vector<double> q(n + 1, 0.0);
  CompensatedSum total;
  for (int j = 1; j <= n; ++j) {
    CompensatedSum sum;
    for (int k = 1; k <= j; ++k)
      if (s[k - 1] != 0.0) sum.add(s[k - 1] * chain.qq(k - 1, j));
    q[j] = clamp_probability_like(sum.value(), "process signature mass");
    total.add(q[j]);
  }
  if (std::abs(total.value() - 1.0) > 1e-10)
    throw NumericInstabilityError("process signature sums to " +
                                  std::to_string(total.value()));
  return q;
}

inline std::vector<double> process_signature(const Signature& sig,
                                             const FailureChain& chain) {
  auto s = sig.s_doubles();
  return process_signature(s, chain);
}

// One row per r = 1..n. Rows are independent pure reads of the chain and are
// evaluated in parallel.
inline std::vector<PolicyEvaluation> sweep_policies(std::span<const double> s,
                                                    const FailureChain& chain,
                                                    const CostModel& costs) {
  int n = chain.n();
  std::vector<PolicyEvaluation> rows(n);
  int thread_count = std::min<int>(
      n, std::max(1u, std::thread::hardware_concurrency()));
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](int t) {
    for (int r = 1 + t; r <= n; r += thread_count) {
      try {
        rows[r - 1] = evaluate_policy(s, chain, r, costs);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (thread_count == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return rows;
}

inline std::vector<PolicyEvaluation> sweep_policies(const Signature& sig,
                                                    const FailureChain& chain,
                                                    const CostModel& costs) {
  auto s = sig.s_doubles();
  return sweep_policies(s, chain, costs);
}

// Closed forms for a k-out-of-n:F system (signature e_k): the policy stops at
// T_{min(k,r):n}, so every quantity reduces to one QQ row.
inline PolicyEvaluation kofn_policy(int k, const FailureChain& chain, int r,
                                    const CostModel& costs) {
  int n = chain.n();
  if (k < 1 || k > n) throw ValidationError("k must be in 1..n");
  if (r < 1 || r > n) throw ValidationError("r must be in 1..n");
  costs.validate(n);

  PolicyEvaluation out;
  out.r = r;
  int m = std::min(k, r);
  out.p = k > r ? chain.qq_range(r - 1, k, n) : 1.0;
  out.e_t_rep = chain.order_stat_mean(m);
  out.n_rep_dist.assign(n + 1, 0.0);
  for (int j = m; j <= n; ++j) out.n_rep_dist[j] = chain.qq(m - 1, j);
  CompensatedSum n_rep, c_rep;
  c_rep.add(out.p * costs.c_sys);
  for (int j = 1; j <= n; ++j) {
    n_rep.add(j * out.n_rep_dist[j]);
    c_rep.add(costs.component_cost(j) * out.n_rep_dist[j]);
  }
  out.e_n_rep = n_rep.value();
  out.e_c_rep = c_rep.value();
  out.ltmc = out.e_c_rep / out.e_t_rep;
  out.ltmn = out.e_n_rep / out.e_t_rep;
  out.repair_rate = 1.0 / out.e_t_rep;
  if (out.p > 0.0) {
    out.e_t_fail = out.e_t_rep / out.p;
    out.e_c_fail = out.e_c_rep / out.p;
    out.e_n_fail = out.e_n_rep / out.p;
    out.system_failure_rate = out.p / out.e_t_rep;
    out.n_fail_dist.assign(n + 1, 0.0);
    for (int j = k; j <= n; ++j)
      out.n_fail_dist[j] = chain.prob_count_at_order(m, j) / out.p;
  }
  return out;
}

// Corollary for iid exponential lifetimes (rate mu): closed harmonic-sum
// forms, no chain required.
inline PolicyEvaluation iid_policy(std::span<const double> s, int n, double mu,
                                   int r, const CostModel& costs) {
  if (mu <= 0) throw ValidationError("iid_policy: mu must be > 0");
  detail::check_signature_vector(s, n);
  if (r < 1 || r > n) throw ValidationError("r must be in 1..n");
  costs.validate(n);

  auto harmonic = [](int a, int b) {
    CompensatedSum h;
    for (int i = a; i <= b; ++i) h.add(1.0 / i);
    return h.value();
  };

  PolicyEvaluation out;
  out.r = r;
  CompensatedSum p_sum, tail;
  for (int k = 1; k <= r; ++k) p_sum.add(s[k - 1]);
  for (int k = r + 1; k <= n; ++k) tail.add(s[k - 1]);
  out.p = std::min(1.0, std::max(0.0, p_sum.value()));
  double s_tail = tail.value();

  // N(T_rep): s_j below r, everything at or past r piles up at exactly r.
  out.n_rep_dist.assign(n + 1, 0.0);
  for (int j = 1; j < r; ++j) out.n_rep_dist[j] = s[j - 1];
  CompensatedSum at_r;
  for (int k = r; k <= n; ++k) at_r.add(s[k - 1]);
  out.n_rep_dist[r] = at_r.value();

  CompensatedSum t_rep;
  for (int k = 1; k <= r; ++k)
    if (s[k - 1] != 0.0) t_rep.add(s[k - 1] * harmonic(n - k + 1, n));
  t_rep.add(s_tail * harmonic(n - r + 1, n));
  out.e_t_rep = t_rep.value() / mu;

  CompensatedSum c_rep;
  for (int k = 1; k <= r; ++k)
    if (s[k - 1] != 0.0)
      c_rep.add(s[k - 1] * (costs.c_sys + costs.component_cost(k)));
  c_rep.add(s_tail * costs.component_cost(r));
  out.e_c_rep = c_rep.value();

  CompensatedSum n_rep;
  for (int j = 1; j <= n; ++j) n_rep.add(j * out.n_rep_dist[j]);
  out.e_n_rep = n_rep.value();

  out.ltmc = out.e_c_rep / out.e_t_rep;
  out.ltmn = out.e_n_rep / out.e_t_rep;
  out.repair_rate = 1.0 / out.e_t_rep;
  if (out.p > 0.0) {
    out.e_t_fail = out.e_t_rep / out.p;
    out.e_c_fail = out.e_c_rep / out.p;
    out.e_n_fail = out.e_n_rep / out.p;
    out.system_failure_rate = out.p / out.e_t_rep;
    out.n_fail_dist.assign(n + 1, 0.0);
    for (int j = 1; j <= r; ++j)
      out.n_fail_dist[j] = (j < r ? s[j - 1] : s[r - 1]) / out.p;
  }
  return out;
}

// System survival without repairs, computed along both published routes:
// the Samaniego mixture over order statistics and the minimal-signature
// exponential mixture. The two must agree.
inline double system_survival(const Signature& sig, const FailureChain& chain,
                              double t) {
  if (t < 0) throw ValidationError("system_survival: t must be >= 0");
  if (sig.n != chain.n()) throw ValidationError("signature/chain n mismatch");
  auto s = sig.s_doubles();
  CompensatedSum mixture;
  for (int k = 1; k <= sig.n; ++k)
    if (s[k - 1] != 0.0)
      mixture.add(s[k - 1] * chain.order_stat_survival(k, t));
  CompensatedSum minimal;
  auto a = sig.a_doubles();
  for (int i = 1; i <= sig.n; ++i)
    minimal.add(a[i - 1] * std::exp(-chain.psi().at(i) * t));
  double v1 = mixture.value(), v2 = minimal.value();
  if (std::abs(v1 - v2) > 1e-10)
    throw NumericInstabilityError(
        "survival routes disagree: mixture=" + std::to_string(v1) +
        " minimal=" + std::to_string(v2));
  return std::min(1.0, clamp_probability_like(v1, "system survival"));
}

inline double system_mttf(const Signature& sig, const FailureChain& chain) {
  if (sig.n != chain.n()) throw ValidationError("signature/chain n mismatch");
  auto s = sig.s_doubles();
  CompensatedSum mixture;
  for (int k = 1; k <= sig.n; ++k)
    if (s[k - 1] != 0.0) mixture.add(s[k - 1] * chain.order_stat_mean(k));
  CompensatedSum minimal;
  auto a = sig.a_doubles();
  for (int i = 1; i <= sig.n; ++i)
    minimal.add(a[i - 1] / chain.psi().at(i));
  double v1 = mixture.value(), v2 = minimal.value();
  if (std::abs(v1 - v2) > 1e-10 * std::max(1.0, std::abs(v1)))
    throw NumericInstabilityError("MTTF routes disagree: " + std::to_string(v1) +
                                  " vs " + std::to_string(v2));
  return v1;
}

}  // namespace lfmo
