#pragma once

#include <quadmath.h>

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "lfmo/errors.hpp"

namespace lfmo {

// Subordinator catalog. Each variant carries its closed-form Laplace
// exponent; only the values at the integers 1..n ever reach the rest of
// the library.

struct PureDrift {
  double mu;  // psi(x) = mu * x
};
struct CompoundPoissonExp {
  double mu;      // drift >= 0
  double lambda;  // shock arrival rate > 0
  double gamma;   // exponential jump rate > 0; psi(x) = mu x + lambda x/(gamma+x)
};
struct GammaProcess {
  double beta, eta;  // psi(x) = beta * log(1 + x/eta)
};
struct InverseGaussianProcess {
  double beta, eta;  // psi(x) = beta * (sqrt(2x + eta^2) - eta)
};
struct StableSubordinator {
  double alpha;  // psi(x) = x^alpha, alpha in (0,1)
};

class LaplaceExponent {
 public:
  using Kind = std::variant<PureDrift, CompoundPoissonExp, GammaProcess,
                            InverseGaussianProcess, StableSubordinator>;

  explicit LaplaceExponent(Kind kind) : kind_(kind) { validate(); }

  double operator()(double x) const {
    return static_cast<double>(evaluate_quad(x));
  }

  // Quad-precision evaluation. The iterated differences that turn psi values
  // into shock rates are conditioned like 2^n, so the chain keeps 113-bit
  // copies of psi(1..n) internally; see PsiTable.
  __float128 evaluate_quad(double x) const {
    if (x < 0) throw ValidationError("laplace exponent requires x >= 0");
    __float128 qx = x;
    return std::visit(
        [qx](const auto& k) -> __float128 {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, PureDrift>) {
            return (__float128)k.mu * qx;
          } else if constexpr (std::is_same_v<T, CompoundPoissonExp>) {
            return (__float128)k.mu * qx +
                   (__float128)k.lambda * qx / ((__float128)k.gamma + qx);
          } else if constexpr (std::is_same_v<T, GammaProcess>) {
            return (__float128)k.beta * log1pq(qx / (__float128)k.eta);
          } else if constexpr (std::is_same_v<T, InverseGaussianProcess>) {
            __float128 eta = k.eta;
            return (__float128)k.beta * (sqrtq((__float128)2.0 * qx + eta * eta) - eta);
          } else {
            return qx == (__float128)0.0 ? (__float128)0.0 : powq(qx, (__float128)k.alpha);
          }
        },
        kind_);
  }

  const Kind& kind() const { return kind_; }

 private:
  void validate() const {
    std::visit(
        [](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          auto require = [](bool ok, const char* msg) {
            if (!ok) throw ValidationError(msg);
          };
          if constexpr (std::is_same_v<T, PureDrift>) {
            require(k.mu > 0, "pure_drift: mu must be > 0");
          } else if constexpr (std::is_same_v<T, CompoundPoissonExp>) {
            require(k.mu >= 0, "cpp_exp: mu must be >= 0");
            require(k.lambda > 0, "cpp_exp: lambda must be > 0");
            require(k.gamma > 0, "cpp_exp: gamma must be > 0");
            require(k.mu + k.lambda > 0, "cpp_exp: degenerate (mu+lambda = 0)");
          } else if constexpr (std::is_same_v<T, GammaProcess>) {
            require(k.beta > 0 && k.eta > 0, "gamma: beta, eta must be > 0");
          } else if constexpr (std::is_same_v<T, InverseGaussianProcess>) {
            require(k.beta > 0 && k.eta > 0,
                    "inverse_gaussian: beta, eta must be > 0");
          } else {
            require(k.alpha > 0 && k.alpha < 1, "stable: alpha must be in (0,1)");
          }
        },
        kind_);
  }

  Kind kind_;
};

// The values psi(1..n). This table is the only stochastic input every
// downstream computation consumes.
class PsiTable {
 public:
  static PsiTable from_exponent(const LaplaceExponent& exponent, int n) {
    if (n < 1) throw ValidationError("psi table requires n >= 1");
    std::vector<__float128> q(n);
    for (int k = 1; k <= n; ++k)
      q[k - 1] = exponent.evaluate_quad(static_cast<double>(k));
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = static_cast<double>(q[k]);
    return PsiTable(std::move(v), std::move(q));
  }

  // User-supplied values, validated against the subordinator invariants.
  // Raw tables only carry double precision, which bounds how large an n
  // their shock rates can support before the iterated differences drown.
  static PsiTable from_values(std::vector<double> values) {
    std::vector<__float128> q(values.begin(), values.end());
    return PsiTable(std::move(values), std::move(q));
  }

  int n() const { return static_cast<int>(values_.size()); }

  // psi(k) for 1 <= k <= n; psi(0) = 0 by definition.
  double at(int k) const {
    if (k == 0) return 0.0;
    if (k < 0 || k > n())
      throw ValidationError("psi index out of range: " + std::to_string(k));
    return values_[k - 1];
  }

  __float128 quad_at(int k) const {
    if (k == 0) return (__float128)0.0;
    if (k < 0 || k > n())
      throw ValidationError("psi index out of range: " + std::to_string(k));
    return quad_values_[k - 1];
  }

  const std::vector<double>& values() const { return values_; }

 private:
  PsiTable(std::vector<double> values, std::vector<__float128> quad_values)
      : values_(std::move(values)), quad_values_(std::move(quad_values)) {
    if (values_.empty()) throw ValidationError("psi table requires n >= 1");
    double prev = 0.0;
    for (size_t i = 0; i < values_.size(); ++i) {
      if (!(values_[i] > 0) || !std::isfinite(values_[i]))
        throw ValidationError("psi values must be finite and positive");
      if (values_[i] <= prev)
        throw ValidationError("psi values must be strictly increasing");
      prev = values_[i];
    }
    // Bernstein concavity of the forward differences, with roundoff slack.
    double d_prev = values_[0];  // psi(1) - psi(0)
    for (size_t i = 1; i < values_.size(); ++i) {
      double d = values_[i] - values_[i - 1];
      if (d > d_prev * (1.0 + 1e-12) + 1e-15)
        throw ValidationError(
            "psi differences must be nonincreasing (concavity violated at k=" +
            std::to_string(i) + ")");
      d_prev = d;
    }
  }

  std::vector<double> values_;
  std::vector<__float128> quad_values_;
};

}  // namespace lfmo
