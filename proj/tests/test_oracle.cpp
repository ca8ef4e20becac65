#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lfmo/failure_chain.hpp"
#include "lfmo/oracle.hpp"
#include "lfmo/policy.hpp"
#include "lfmo/signature.hpp"
#include "lfmo/structure.hpp"

using namespace lfmo;

namespace {

PsiTable cpp_psi(int n) {
  return PsiTable::from_exponent(LaplaceExponent(CompoundPoissonExp{0.9, 0.2, 1.0}),
                                 n);
}
PsiTable drift_psi(int n) {
  return PsiTable::from_exponent(LaplaceExponent(PureDrift{1.0}), n);
}

}  // namespace

TEST_CASE("bridge cycle under the compound Poisson model, r = 1") {
  FullStateModel model(SystemStructure::formula(3, "(1&2)|3"), cpp_psi(3));
  auto metrics = model.cycle_metrics(1, CostModel::linear(3, 1.0, 30.0));
  CHECK(metrics.p == doctest::Approx(0.0292398).epsilon(1e-5));
  CHECK(metrics.e_t_rep == doctest::Approx(0.350877).epsilon(1e-5));
  CHECK(metrics.ltmc == doctest::Approx(5.5).epsilon(1e-5));
}

TEST_CASE("series of two under pure drift, r = 2") {
  FullStateModel model(SystemStructure::series(2), drift_psi(2));
  auto metrics = model.cycle_metrics(2, CostModel::linear(2, 1.0, 3.0));
  CHECK(metrics.p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(metrics.e_t_rep == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("2-out-of-3:F at r = 1 reproduces the jump-range probability") {
  for (const auto& psi : {cpp_psi(3), drift_psi(3)}) {
    FullStateModel model(SystemStructure::k_out_of_n_f(3, 2), psi);
    FailureChain chain(psi);
    // every absorption with >= k failed is a system failure once k <= ...
    auto r2 = model.cycle_metrics(2, CostModel::linear(3, 1.0, 1.0));
    CHECK(r2.p == doctest::Approx(1.0).epsilon(1e-12));
    // at r = 1 the first repair preempts the system unless the first jump
    // lands at 2 or more failed components
    auto r1 = model.cycle_metrics(1, CostModel::linear(3, 1.0, 1.0));
    CHECK(r1.p == doctest::Approx(chain.qq_range(0, 2, 3)).epsilon(1e-12));
  }
}

TEST_CASE("total outgoing rate from the all-working state is psi(n)") {
  for (int n : {2, 3, 5, 8}) {
    auto psi = cpp_psi(n);
    FullStateModel model(SystemStructure::series(n), psi);
    CompensatedSum total;
    for (int k = 1; k <= n; ++k)
      total.add(binomial(n, k) * model.subset_rate(k));
    CHECK(total.value() == doctest::Approx(psi.at(n)).epsilon(1e-9));
  }
}

TEST_CASE("oracle equals the Theorem-1 engine across the n <= 4 catalog") {
  std::vector<SystemStructure> structures;
  structures.push_back(SystemStructure::formula(3, "(1&2)|3"));
  structures.push_back(SystemStructure::series(3));
  structures.push_back(SystemStructure::parallel(3));
  structures.push_back(SystemStructure::k_out_of_n_f(3, 2));
  structures.push_back(SystemStructure::k_out_of_n_f(4, 2));

  std::vector<LaplaceExponent> exponents = {
      LaplaceExponent(PureDrift{1.0}),
      LaplaceExponent(CompoundPoissonExp{0.9, 0.2, 1.0}),
      LaplaceExponent(GammaProcess{1.0, 1.0}),
  };

  for (const auto& structure : structures) {
    int n = structure.component_count();
    auto sig = structural_signature(structure);
    auto costs = CostModel::linear(n, 1.0, 10.0 * n);
    for (const auto& exponent : exponents) {
      auto psi = PsiTable::from_exponent(exponent, n);
      FailureChain chain(psi);
      FullStateModel model(structure, psi);
      for (int r = 1; r <= n; ++r) {
        auto expected = evaluate_policy(sig, chain, r, costs);
        auto oracle = model.cycle_metrics(r, costs);
        CHECK(std::abs(oracle.p - expected.p) <= 1e-10);
        CHECK(std::abs(oracle.e_t_rep - expected.e_t_rep) <= 1e-10);
        CHECK(std::abs(oracle.ltmc - expected.ltmc) <= 1e-10);
        double tv = 0.0;
        for (int j = 1; j <= n; ++j)
          tv += std::abs(oracle.n_rep_dist[j] - expected.n_rep_dist[j]);
        CHECK(tv / 2.0 <= 1e-10);
      }
    }
  }
}

TEST_CASE("relabeling components leaves the oracle unchanged") {
  // (1&2)|3 relabeled by the cycle 1->2->3->1 is (2&3)|1
  auto original = SystemStructure::formula(3, "(1&2)|3");
  auto relabeled = SystemStructure::formula(3, "(2&3)|1");
  auto psi = cpp_psi(3);
  auto costs = CostModel::linear(3, 1.0, 30.0);
  FullStateModel a(original, psi), b(relabeled, psi);
  for (int r = 1; r <= 3; ++r) {
    auto ma = a.cycle_metrics(r, costs);
    auto mb = b.cycle_metrics(r, costs);
    CHECK(ma.p == doctest::Approx(mb.p).epsilon(1e-14));
    CHECK(ma.e_t_rep == doctest::Approx(mb.e_t_rep).epsilon(1e-14));
    CHECK(ma.ltmc == doctest::Approx(mb.ltmc).epsilon(1e-14));
    for (int j = 1; j <= 3; ++j)
      CHECK(ma.n_rep_dist[j] == doctest::Approx(mb.n_rep_dist[j]).epsilon(1e-14));
  }
}

TEST_CASE("state-space guard") {
  CHECK_THROWS_AS(
      FullStateModel(SystemStructure::series(13),
                     PsiTable::from_exponent(LaplaceExponent(PureDrift{1.0}), 13)),
      ValidationError);
}
