#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lfmo/errors.hpp"

namespace lfmo {

// Neumaier-compensated accumulator. The alternating binomial sums in this
// library cancel heavily for large n; plain summation loses too many digits.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Binomial coefficients held exactly in 128-bit integers (exact through
// n = 64) and converted to double on demand.
inline __int128 binomial_i128(int n, int k) {
  if (k < 0 || k > n) return 0;
  static thread_local std::vector<std::vector<__int128>> cache;
  if ((int)cache.size() <= n) {
    int old = cache.size();
    cache.resize(n + 1);
    for (int row = old; row <= n; ++row) {
      cache[row].assign(row + 1, 1);
      for (int j = 1; j < row; ++j)
        cache[row][j] = cache[row - 1][j - 1] + cache[row - 1][j];
    }
  }
  return cache[n][k];
}

inline double binomial(int n, int k) {
  return static_cast<double>(binomial_i128(n, k));
}

// Clamp tiny negative roundoff to zero; anything worse is a real defect.
inline double clamp_probability_like(double x, const char* what,
                                     double tol = 1e-12) {
  if (x < 0.0) {
    if (x < -tol)
      throw NumericInstabilityError(std::string(what) + " = " +
                                    std::to_string(x) + " below -" +
                                    std::to_string(tol));
    return 0.0;
  }
  return x;
}

// Type-7 (linear interpolation) sample quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  double pos = q * (v.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace lfmo
