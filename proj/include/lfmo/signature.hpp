#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "lfmo/errors.hpp"
#include "lfmo/numeric.hpp"
#include "lfmo/rational.hpp"
#include "lfmo/structure.hpp"

namespace lfmo {

// Exact signature triple: s (failure-order distribution), sbar (tail sums,
// indices 0..n) and a (minimal signature, coefficients of sum_i a_i e^{-psi(i) t}).
struct Signature {
  int n = 0;
  std::vector<Rational> s;     // s[k-1] = s_k, k = 1..n
  std::vector<Rational> sbar;  // sbar[k], k = 0..n
  std::vector<Rational> a;     // a[i-1] = a_i, i = 1..n

  std::vector<double> s_doubles() const {
    std::vector<double> v(s.size());
    for (size_t i = 0; i < s.size(); ++i) v[i] = s[i].to_double();
    return v;
  }
  std::vector<double> a_doubles() const {
    std::vector<double> v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].to_double();
    return v;
  }
};

// a_i = C(n,i) * sum_{k=n-i+1}^{n} C(i-1, n-k) (-1)^{(i-1)-(n-k)} s_k, exact.
inline std::vector<Rational> minimal_signature(int n,
                                               const std::vector<Rational>& s) {
  if (static_cast<int>(s.size()) != n)
    throw ValidationError("minimal_signature: signature length mismatch");
  std::vector<Rational> a(n);
  for (int i = 1; i <= n; ++i) {
    Rational sum;
    for (int k = n - i + 1; k <= n; ++k) {
      Rational term = Rational(BigInt::from_i128(binomial_i128(i - 1, n - k)),
                               BigInt(1)) *
                      s[k - 1];
      if (((i - 1) - (n - k)) % 2 != 0) term = -term;
      sum = sum + term;
    }
    a[i - 1] = Rational(BigInt::from_i128(binomial_i128(n, i)), BigInt(1)) * sum;
  }
  Rational total;
  for (auto& ai : a) total = total + ai;
  if (total != Rational(1))
    throw NumericInstabilityError("minimal signature does not sum to 1");
  return a;
}

namespace detail {

inline Signature signature_from_level_counts(int n,
                                             const std::vector<uint64_t>& working) {
  Signature sig;
  sig.n = n;
  sig.sbar.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    // sbar_k = (# working states with exactly k failed) / C(n, n-k)
    sig.sbar[k] = Rational(BigInt::from_i128(working[k]),
                           BigInt::from_i128(binomial_i128(n, n - k)));
  }
  if (sig.sbar[0] != Rational(1))
    throw ValidationError("structure is not semi-coherent: phi(all-working) != 1");
  if (!sig.sbar[n].is_zero())
    throw ValidationError("structure is not semi-coherent: phi(all-failed) != 0");
  sig.s.resize(n);
  Rational total;
  for (int k = 1; k <= n; ++k) {
    sig.s[k - 1] = sig.sbar[k - 1] - sig.sbar[k];
    if (sig.s[k - 1] < Rational(0))
      throw ValidationError("structure is not monotone: negative signature entry");
    total = total + sig.s[k - 1];
  }
  if (total != Rational(1))
    throw NumericInstabilityError("signature does not sum to 1");
  sig.a = minimal_signature(n, sig.s);
  return sig;
}

}  // namespace detail

// Level-wise enumeration of all 2^n states. Exact integer counts; threaded
// for large state spaces. The 2^26 two-terminal case is the intended worst
// case and takes seconds, not hours.
inline Signature structural_signature(const SystemStructure& structure,
                                      int thread_count = 0) {
  int n = structure.component_count();
  if (n > 28)
    throw ValidationError(
        "structural_signature: n > 28 would enumerate more than 2^28 states; "
        "a sampling estimator is out of scope");
  uint64_t total = 1ull << n;
  if (thread_count <= 0) {
    thread_count = n >= 22 ? static_cast<int>(
                                 std::max(1u, std::thread::hardware_concurrency()))
                           : 1;
  }
  std::vector<std::vector<uint64_t>> partial(
      thread_count, std::vector<uint64_t>(n + 1, 0));
  auto worker = [&](int t) {
    uint64_t lo = total / thread_count * t;
    uint64_t hi = t + 1 == thread_count ? total : total / thread_count * (t + 1);
    auto& counts = partial[t];
    for (uint64_t mask = lo; mask < hi; ++mask) {
      if (structure.evaluate(mask))
        counts[n - __builtin_popcountll(mask)] += 1;
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
  std::vector<uint64_t> working(n + 1, 0);
  for (auto& counts : partial)
    for (int k = 0; k <= n; ++k) working[k] += counts[k];
  return detail::signature_from_level_counts(n, working);
}

// Counts, over all n! orderings without ties, the failure index at which the
// system first dies. Agrees exactly with the state-count route; kept as an
// independent oracle for small n.
inline Signature signature_via_permutations(const SystemStructure& structure) {
  int n = structure.component_count();
  if (n > 8)
    throw ValidationError("signature_via_permutations: n must be <= 8");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<uint64_t> death_counts(n + 1, 0);
  uint64_t full = (1ull << n) - 1;
  do {
    uint64_t mask = full;
    for (int step = 1; step <= n; ++step) {
      mask &= ~(1ull << perm[step - 1]);
      if (!structure.evaluate(mask)) {
        death_counts[step] += 1;
        break;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  uint64_t factorial = 1;
  for (int i = 2; i <= n; ++i) factorial *= i;
  Signature sig;
  sig.n = n;
  sig.s.resize(n);
  sig.sbar.resize(n + 1);
  sig.sbar[0] = Rational(1);
  Rational cumulative;
  for (int k = 1; k <= n; ++k) {
    sig.s[k - 1] = Rational(BigInt::from_i128(death_counts[k]),
                            BigInt::from_i128(factorial));
    cumulative = cumulative + sig.s[k - 1];
    sig.sbar[k] = Rational(1) - cumulative;
  }
  if (cumulative != Rational(1))
    throw ValidationError(
        "structure is not semi-coherent: some ordering never kills it");
  sig.a = minimal_signature(n, sig.s);
  return sig;
}

// Signature from a raw probability vector (mixed/randomized systems).
inline Signature signature_from_rationals(std::vector<Rational> s) {
  Signature sig;
  sig.n = static_cast<int>(s.size());
  Rational total;
  for (auto& v : s) {
    if (v < Rational(0)) throw ValidationError("signature entries must be >= 0");
    total = total + v;
  }
  if (total != Rational(1))
    throw ValidationError("signature must sum to exactly 1");
  sig.s = std::move(s);
  sig.sbar.resize(sig.n + 1);
  sig.sbar[0] = Rational(1);
  Rational cum;
  for (int k = 1; k <= sig.n; ++k) {
    cum = cum + sig.s[k - 1];
    sig.sbar[k] = Rational(1) - cum;
  }
  sig.a = minimal_signature(sig.n, sig.s);
  return sig;
}

}  // namespace lfmo
