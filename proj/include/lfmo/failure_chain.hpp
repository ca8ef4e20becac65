#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lfmo/errors.hpp"
#include "lfmo/laplace_exponent.hpp"
#include "lfmo/numeric.hpp"

namespace lfmo {

namespace detail {

// Iterated forward difference of delta-psi in 113-bit arithmetic. The
// alternating binomial form of this quantity is conditioned like 2^k, which
// double inputs cannot survive past k ~ 25; the quad psi copies keep the
// noise floor below 1e-15 through n = 64.
inline __float128 shock_rate_quad(int l, int k, const PsiTable& psi) {
  std::vector<__float128> diff(k);
  for (int i = 0; i < k; ++i)
    diff[i] = psi.quad_at(l - k + i + 1) - psi.quad_at(l - k + i);
  for (int level = 1; level < k; ++level)
    for (int i = 0; i + level < k; ++i) diff[i] -= diff[i + 1];
  return diff[0];
}

}  // namespace detail

// Rate of a specific shock of size k when l components are alive:
//   lambda^(l)_k = sum_{i=0}^{k-1} C(k-1,i) (-1)^i (psi(l-k+i+1) - psi(l-k+i))
inline double shock_rate(int alive, int shock_size, const PsiTable& psi) {
  int l = alive, k = shock_size;
  if (k < 1 || k > l || l > psi.n())
    throw ValidationError("shock_rate: requires 1 <= k <= l <= n");
  return clamp_probability_like(
      static_cast<double>(detail::shock_rate_quad(l, k, psi)), "shock rate");
}

// One-step transition matrix of the embedded failed-count chain:
//   P[i][j] = C(n-i, j-i) * lambda^(n-i)_{j-i} / psi(n-i) for i < j, 0 otherwise.
// Row n is absorbing (all zeros).
inline std::vector<std::vector<double>> transition_matrix(const PsiTable& psi) {
  int n = psi.n();
  std::vector<std::vector<double>> p(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    CompensatedSum row;
    __float128 psi_alive = psi.quad_at(n - i);
    for (int j = i + 1; j <= n; ++j) {
      __float128 lambda = detail::shock_rate_quad(n - i, j - i, psi);
      __float128 rate = (__float128)binomial(n - i, j - i) * lambda;
      p[i][j] = clamp_probability_like(static_cast<double>(rate / psi_alive),
                                       "transition probability");
      row.add(p[i][j]);
    }
    if (std::abs(row.value() - 1.0) > 1e-10)
      throw NumericInstabilityError(
          "transition matrix row " + std::to_string(i) + " sums to " +
          std::to_string(row.value()));
  }
  return p;
}

// Everything Lemma-1-shaped: the psi table, transition matrix, and the
// cumulative jump probabilities QQ_{i->j} (probability that the chain,
// started at 0, jumps out of {0..i} directly into j).
class FailureChain {
 public:
  explicit FailureChain(PsiTable psi)
      : psi_(std::move(psi)), n_(psi_.n()), p_(transition_matrix(psi_)) {
    build_qq();
#ifndef NDEBUG
    if (n_ <= 32) cross_check_qq(1e-12);
#endif
  }

  int n() const { return n_; }
  const PsiTable& psi() const { return psi_; }
  const std::vector<std::vector<double>>& transition() const { return p_; }

  double p(int i, int j) const {
    check_state(i);
    check_state(j);
    return p_[i][j];
  }

  // Aggregate transition rate of the continuous-time failed-count chain.
  double aggregate_rate(int i, int j) const {
    check_state(i);
    check_state(j);
    if (i >= j || i >= n_) return 0.0;
    return binomial(n_ - i, j - i) * shock_rate(n_ - i, j - i, psi_);
  }

  // QQ_{i->j}: recursion path (production).
  double qq(int i, int j) const {
    check_state(i);
    check_state(j);
    if (j <= i) return 0.0;
    return qq_[i][j];
  }

  // QQQ_{i->[j,k]} = sum_{l=j}^{k} QQ_{i->l}
  double qq_range(int i, int j, int k) const {
    check_state(i);
    check_state(j);
    check_state(k);
    CompensatedSum sum;
    for (int l = j; l <= k; ++l) sum.add(qq(i, l));
    return sum.value();
  }

  // QQ_{i->j} assembled from matrix powers: Q_{l1->j} = sum_l (P^l)_{0,l1} P_{l1,j},
  // QQ_{i->j} = sum_{l1<=i} Q_{l1->j}. O(n^4); used as an internal oracle.
  double qq_via_matrix_power(int i, int j) const {
    check_state(i);
    check_state(j);
    if (j <= i) return 0.0;
    // powers[l][x] = (P^l)_{0,x}
    std::vector<std::vector<double>> powers(i + 1,
                                            std::vector<double>(n_ + 1, 0.0));
    powers[0][0] = 1.0;
    for (int l = 1; l <= i; ++l)
      for (int x = 0; x <= n_; ++x) {
        CompensatedSum s;
        for (int y = 0; y <= x; ++y)
          if (powers[l - 1][y] != 0.0) s.add(powers[l - 1][y] * p_[y][x]);
        powers[l][x] = s.value();
      }
    CompensatedSum total;
    for (int l1 = 0; l1 <= i; ++l1) {
      CompensatedSum q;
      for (int l = 0; l <= l1; ++l) q.add(powers[l][l1]);
      total.add(q.value() * p_[l1][j]);
    }
    return total.value();
  }

  // P(T_{r:n} < T_{k:n})
  double prob_order_lt(int r, int k) const {
    check_order(r);
    check_order(k);
    if (r >= k) return 0.0;
    return qq_range(r - 1, r, k - 1);
  }

  // P(T_{r:n} = T_{k:n})
  double prob_order_eq(int r, int k) const {
    check_order(r);
    check_order(k);
    if (r > k) return prob_order_eq(k, r);
    if (r == k) return 1.0;
    return qq_range(r - 1, k, n_);
  }

  // P(N(T_{r:n}) = j)
  double prob_count_at_order(int r, int j) const {
    check_order(r);
    check_order(j);
    if (r > j) return 0.0;
    return qq(r - 1, j);
  }

  // P(T_{k:n} > t) = sum_{i=n-k+1}^{n} C(n,i) C(i-1,n-k) (-1)^{i-n+k-1} e^{-t psi(i)}
  double order_stat_survival(int k, double t) const {
    check_order(k);
    if (t < 0) throw ValidationError("order_stat_survival: t must be >= 0");
    double v = order_stat_sum(k, [&](int i) { return std::exp(-t * psi_.at(i)); });
    return std::min(1.0, clamp_probability_like(v, "order statistic survival"));
  }

  // E[T_{k:n}]: same alternating sum with 1/psi(i) in place of the exponential.
  double order_stat_mean(int k) const {
    check_order(k);
    return clamp_probability_like(
        order_stat_sum(k, [&](int i) { return 1.0 / psi_.at(i); }),
        "order statistic mean");
  }

  // P(N(t) = k) for k = 0..n.
  std::vector<double> count_distribution(double t) const {
    if (t < 0) throw ValidationError("count_distribution: t must be >= 0");
    std::vector<double> dist(n_ + 1, 0.0);
    for (int k = 0; k <= n_; ++k) {
      CompensatedSum sum;
      for (int i = n_ - k; i <= n_; ++i) {
        double term = binomial(n_, i) * binomial(i, n_ - k) *
                      std::exp(-t * psi_.at(i));
        sum.add((i - n_ + k) % 2 == 0 ? term : -term);
      }
      dist[k] = std::min(1.0, clamp_probability_like(sum.value(),
                                                     "count distribution"));
    }
    return dist;
  }

  // Test hook: largest |recursion - matrix power| over all pairs.
  double qq_cross_check_error() const {
    double worst = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j <= n_; ++j)
        worst = std::max(worst, std::abs(qq_[i][j] - qq_via_matrix_power(i, j)));
    return worst;
  }

 private:
  void build_qq() {
    qq_.assign(n_ + 1, std::vector<double>(n_ + 1, 0.0));
    for (int j = 1; j <= n_; ++j) qq_[0][j] = p_[0][j];
    for (int i = 1; i < n_; ++i)
      for (int j = i + 1; j <= n_; ++j)
        qq_[i][j] = qq_[i - 1][j] + qq_[i - 1][i] * p_[i][j];
    for (int i = 0; i < n_; ++i) {
      CompensatedSum total;
      for (int j = i + 1; j <= n_; ++j) total.add(qq_[i][j]);
      if (std::abs(total.value() - 1.0) > 1e-10)
        throw NumericInstabilityError("QQ row " + std::to_string(i) +
                                      " sums to " + std::to_string(total.value()));
    }
  }

  void cross_check_qq(double tol) const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j <= n_; ++j)
        if (std::abs(qq_[i][j] - qq_via_matrix_power(i, j)) > tol)
          throw NumericInstabilityError(
              "QQ recursion and matrix-power forms disagree at (" +
              std::to_string(i) + "," + std::to_string(j) + ")");
  }

  template <typename F>
  double order_stat_sum(int k, F&& weight) const {
    CompensatedSum sum;
    for (int i = n_ - k + 1; i <= n_; ++i) {
      double term = binomial(n_, i) * binomial(i - 1, n_ - k) * weight(i);
      sum.add((i - n_ + k - 1) % 2 == 0 ? term : -term);
    }
    return sum.value();
  }

  void check_state(int i) const {
    if (i < 0 || i > n_)
      throw ValidationError("state index " + std::to_string(i) +
                            " out of 0.." + std::to_string(n_));
  }
  void check_order(int r) const {
    if (r < 1 || r > n_)
      throw ValidationError("order index " + std::to_string(r) +
                            " out of 1.." + std::to_string(n_));
  }

  PsiTable psi_;
  int n_;
  std::vector<std::vector<double>> p_;
  std::vector<std::vector<double>> qq_;
};

}  // namespace lfmo
