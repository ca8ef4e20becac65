#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lfmo/errors.hpp"
#include "lfmo/laplace_exponent.hpp"
#include "lfmo/numeric.hpp"
#include "lfmo/policy.hpp"
#include "lfmo/structure.hpp"

namespace lfmo {

// Ground-truth engine: the full 2^n continuous-time Markov chain over failed
// subsets, with shocks modeled as independent Poisson streams per subset.
// Shares nothing with the aggregated chain except psi itself; subset rates
// are computed along the other algebraic route
//   lambda^(n)_k = sum_{j=n-k}^{n} (-1)^{j-n+k+1} C(k, n-j) psi(j),
// and one repair cycle is solved by dense first-step analysis.
class FullStateModel {
 public:
  FullStateModel(SystemStructure structure, PsiTable psi)
      : structure_(std::move(structure)), psi_(std::move(psi)) {
    n_ = structure_.component_count();
    if (n_ != psi_.n())
      throw ValidationError("structure and psi table disagree on n");
    if (n_ > 12)
      throw ValidationError("full-state oracle is capped at n = 12 (2^12 states)");
    subset_rate_.assign(n_ + 1, 0.0);
    for (int k = 1; k <= n_; ++k) {
      CompensatedSum sum;
      for (int j = n_ - k; j <= n_; ++j) {
        double term = binomial(k, n_ - j) * psi_.at(j);
        sum.add((j - n_ + k + 1) % 2 == 0 ? term : -term);
      }
      subset_rate_[k] = clamp_probability_like(sum.value(), "subset shock rate");
    }
    // Lemma-1 identity: everything leaving the all-working state is psi(n).
    CompensatedSum total;
    for (int k = 1; k <= n_; ++k) total.add(binomial(n_, k) * subset_rate_[k]);
    if (std::abs(total.value() - psi_.at(n_)) >
        1e-9 * std::max(1.0, psi_.at(n_)))
      throw NumericInstabilityError(
          "total outgoing rate " + std::to_string(total.value()) +
          " != psi(n) = " + std::to_string(psi_.at(n_)));
  }

  const SystemStructure& structure() const { return structure_; }
  int n() const { return n_; }
  double subset_rate(int size) const { return subset_rate_.at(size); }

  struct CycleMetrics {
    double p = 0.0;
    double e_t_rep = 0.0;
    std::vector<double> n_rep_dist;  // index j = 1..n
    double e_n_rep = 0.0;
    double e_c_rep = 0.0;
    double ltmc = 0.0;
    double ltmn = 0.0;
  };

  // First repair cycle under the r-out-of-n:R policy, starting all-working.
  // Absorbing states: failed count >= r, or the system is down.
  CycleMetrics cycle_metrics(int r, const CostModel& costs) const {
    if (r < 1 || r > n_) throw ValidationError("r must be in 1..n");
    costs.validate(n_);

    uint64_t full = (1ull << n_) - 1;
    auto is_absorbing = [&](uint64_t failed) {
      int count = __builtin_popcountll(failed);
      return count >= r || !structure_.evaluate(full & ~failed);
    };

    // index transient states
    std::vector<int> transient_id(1ull << n_, -1);
    std::vector<uint64_t> transient;
    for (uint64_t f = 0; f <= full; ++f) {
      if (!is_absorbing(f)) {
        transient_id[f] = static_cast<int>(transient.size());
        transient.push_back(f);
      }
    }
    if (transient_id[0] < 0)
      throw ValidationError("all-working state is already absorbing");
    int m = static_cast<int>(transient.size());

    // aggregated rate F -> G, G = F | S for nonempty S subset of alive:
    // R(F->G) = sum_{W subset F} lambda_{|G\F| + |W|} * C(|F|, |W|)
    auto move_rate = [&](uint64_t from, uint64_t to) {
      int extra = __builtin_popcountll(to & ~from);
      int failed = __builtin_popcountll(from);
      CompensatedSum sum;
      for (int w = 0; w <= failed; ++w)
        sum.add(binomial(failed, w) * subset_rate_[extra + w]);
      return sum.value();
    };

    // For each transient state: total exit rate and jump probabilities.
    // exit(F) = sum over nonempty alive subsets S of R(F -> F|S).
    int cols = n_ + 3;  // [time, p_sys, cost] + n columns folded below
    (void)cols;
    std::vector<std::vector<double>> jump(m);     // to transient: (idx, prob)
    std::vector<std::vector<int>> jump_to(m);
    std::vector<double> exit_rate(m, 0.0);
    std::vector<double> absorb_sys(m, 0.0);       // P(jump to system-failed absorber)
    std::vector<std::vector<double>> absorb_count(m,
        std::vector<double>(n_ + 1, 0.0));        // by failed count at absorption
    std::vector<double> absorb_cost(m, 0.0);

    for (int idx = 0; idx < m; ++idx) {
      uint64_t f = transient[idx];
      uint64_t alive = full & ~f;
      CompensatedSum total;
      // iterate nonempty submasks of alive
      for (uint64_t s = alive; s != 0; s = (s - 1) & alive) {
        uint64_t g = f | s;
        double rate = move_rate(f, g);
        total.add(rate);
        if (transient_id[g] >= 0) {
          jump[idx].push_back(rate);
          jump_to[idx].push_back(transient_id[g]);
        } else {
          int count = __builtin_popcountll(g);
          bool sys_failed = !structure_.evaluate(full & ~g);
          if (sys_failed) absorb_sys[idx] += rate;
          absorb_count[idx][count] += rate;
          absorb_cost[idx] +=
              rate * (costs.component_cost(count) +
                      (sys_failed ? costs.c_sys : 0.0));
        }
      }
      exit_rate[idx] = total.value();
      for (auto& w : jump[idx]) w /= exit_rate[idx];
      absorb_sys[idx] /= exit_rate[idx];
      absorb_cost[idx] /= exit_rate[idx];
      for (auto& w : absorb_count[idx]) w /= exit_rate[idx];
    }

    // First-step equations: (I - J) x = b for several right-hand sides.
    int rhs_count = 3 + n_;  // time, p_sys, cost, count_1..count_n
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> b(m, std::vector<double>(rhs_count, 0.0));
    for (int i = 0; i < m; ++i) {
      a[i][i] = 1.0;
      for (size_t e = 0; e < jump[i].size(); ++e)
        a[i][jump_to[i][e]] -= jump[i][e];
      b[i][0] = 1.0 / exit_rate[i];
      b[i][1] = absorb_sys[i];
      b[i][2] = absorb_cost[i];
      for (int j = 1; j <= n_; ++j) b[i][3 + j - 1] = absorb_count[i][j];
    }
    solve_dense(a, b);

    int start = transient_id[0];
    CycleMetrics out;
    out.e_t_rep = b[start][0];
    out.p = b[start][1];
    out.e_c_rep = b[start][2];
    out.n_rep_dist.assign(n_ + 1, 0.0);
    CompensatedSum n_rep;
    for (int j = 1; j <= n_; ++j) {
      out.n_rep_dist[j] = b[start][3 + j - 1];
      n_rep.add(j * out.n_rep_dist[j]);
    }
    out.e_n_rep = n_rep.value();
    out.ltmc = out.e_c_rep / out.e_t_rep;
    out.ltmn = out.e_n_rep / out.e_t_rep;
    return out;
  }

 private:
  // Gaussian elimination with partial pivoting, multiple right-hand sides.
  static void solve_dense(std::vector<std::vector<double>>& a,
                          std::vector<std::vector<double>>& b) {
    int m = static_cast<int>(a.size());
    int rhs = b.empty() ? 0 : static_cast<int>(b[0].size());
    for (int col = 0; col < m; ++col) {
      int pivot = col;
      for (int row = col + 1; row < m; ++row)
        if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
      if (std::abs(a[pivot][col]) < 1e-300)
        throw NumericInstabilityError("singular first-step system");
      std::swap(a[col], a[pivot]);
      std::swap(b[col], b[pivot]);
      for (int row = col + 1; row < m; ++row) {
        double f = a[row][col] / a[col][col];
        if (f == 0.0) continue;
        for (int c = col; c < m; ++c) a[row][c] -= f * a[col][c];
        for (int c = 0; c < rhs; ++c) b[row][c] -= f * b[col][c];
      }
    }
    for (int col = m - 1; col >= 0; --col) {
      for (int c = 0; c < rhs; ++c) {
        double v = b[col][c];
        for (int k = col + 1; k < m; ++k) v -= a[col][k] * b[k][c];
        b[col][c] = v / a[col][col];
      }
    }
  }

  SystemStructure structure_;
  PsiTable psi_;
  int n_ = 0;
  std::vector<double> subset_rate_;  // lambda^(n)_k by shock size k
};

}  // namespace lfmo
