#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "rejection/divergences.hpp"
#include "rejection/generate.hpp"
#include "rejection/losses.hpp"
#include "rejection/oracle.hpp"
#include "rejection/rejectors.hpp"
#include "rejection/task.hpp"

using namespace rejection;

namespace {

FiniteTask random_task(std::uint64_t seed, int n = 3, int l = 2,
                       double noise = 1.0) {
  TaskGenSpec spec;
  spec.n_inputs = n;
  spec.n_labels = l;
  spec.model_noise = noise;
  spec.seed = seed;
  return generate_task(spec);
}

FiniteTask uniform_fixture() {
  std::vector<ProbVector> truth(4, ProbVector({0.5, 0.5}));
  return FiniteTask(FiniteDomain(4, 2), ProbVector({0.25, 0.25, 0.25, 0.25}),
                    PosteriorField(std::move(truth)),
                    Logits(std::vector<double>(8, 0.0), 4, 2));
}

}  // namespace

TEST_CASE("oracle config and domain limits are enforced") {
  const FiniteTask task = random_task(1);
  OracleConfig cfg;
  CHECK_THROWS_AS(
      solve_marginal_ideal(LossKind::log_loss, task, Temperature(1e-7), cfg),
      std::invalid_argument);
  OracleConfig bad = cfg;
  bad.max_iters = 0;
  CHECK_THROWS_AS(
      solve_marginal_ideal(LossKind::log_loss, task, Temperature(1.0), bad),
      std::invalid_argument);

  const FiniteTask wide = random_task(2, 65, 2);
  CHECK_THROWS_AS(
      solve_marginal_ideal(LossKind::log_loss, wide, Temperature(1.0), cfg),
      std::invalid_argument);
  const FiniteTask big_joint = random_task(3, 52, 5);
  CHECK_THROWS_AS(
      solve_joint_ideal(LossKind::log_loss, big_joint, Temperature(1.0), cfg),
      std::invalid_argument);
  CHECK_THROWS_AS(exhaustive_rejector_search(LossKind::log_loss,
                                             random_task(4, 21, 2),
                                             RejectionCost(0.1)),
                  std::invalid_argument);
}

TEST_CASE("a huge temperature pins the ideal distribution to the truth") {
  const FiniteTask task = random_task(11, 4, 3);
  OracleConfig cfg;
  const Temperature lambda(1e6);

  const OracleSolution marginal =
      solve_marginal_ideal(LossKind::log_loss, task, lambda, cfg);
  CHECK(marginal.converged);
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    CHECK(std::abs(marginal.distribution[ux] - task.marginal()[ux]) <= 1e-4);
  }

  const OracleSolution joint =
      solve_joint_ideal(LossKind::log_loss, task, lambda, cfg);
  CHECK(joint.converged);
  for (int x = 0; x < task.n_inputs(); ++x) {
    for (int y = 0; y < task.n_labels(); ++y) {
      const auto i = static_cast<std::size_t>(x * task.n_labels() + y);
      CHECK(std::abs(joint.distribution[i] - task.joint(x, y)) <= 1e-4);
    }
  }
}

TEST_CASE("constant risk leaves the marginal untouched") {
  const FiniteTask fixture = uniform_fixture();
  OracleConfig cfg;
  const OracleSolution sol =
      solve_marginal_ideal(LossKind::log_loss, fixture, Temperature(2.0), cfg);
  CHECK(sol.converged);
  for (std::size_t x = 0; x < 4; ++x) {
    CHECK(sol.distribution[x] == 0.25);
  }
}

TEST_CASE("mirror descent matches the closed-form marginal ratio") {
  OracleConfig cfg;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const FiniteTask task = random_task(seed, 3, 2);
    const Temperature lambda(2.0);
    const LossKind kind =
        seed % 2 ? LossKind::log_loss : LossKind::modified_log_loss;
    const OracleSolution sol = solve_marginal_ideal(kind, task, lambda, cfg);
    CHECK(sol.converged);
    CHECK(sol.max_simplex_drift < 1e-12);

    const DensityRatioRejector closed = marginal_ratio(kind, task, lambda);
    std::vector<double> plug(3);
    for (std::size_t x = 0; x < 3; ++x) {
      CHECK(std::abs(sol.distribution[x] / task.marginal()[x] -
                     closed.scores[x]) <= 1e-6);
      plug[x] = task.marginal()[x] * closed.scores[x];
    }
    const double closed_value = marginal_objective(kind, task, lambda, plug);
    CHECK(std::abs(sol.objective_value - closed_value) <= 1e-8);
  }
}

TEST_CASE("joint mirror descent reproduces the exponential reweighting") {
  OracleConfig cfg;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const FiniteTask task = random_task(seed, 3, 2);
    const Temperature lambda(1.5);
    const OracleSolution sol =
        solve_joint_ideal(LossKind::modified_log_loss, task, lambda, cfg);
    CHECK(sol.converged);

    // Marginalized solution against the closed-form joint scores, which
    // are Bhattacharyya coefficients under this loss.
    const DensityRatioRejector closed =
        joint_ratio(LossKind::modified_log_loss, task, lambda);
    for (int x = 0; x < 3; ++x) {
      double mass = 0.0;
      for (int y = 0; y < 2; ++y) {
        mass += sol.distribution[static_cast<std::size_t>(2 * x + y)];
      }
      const auto ux = static_cast<std::size_t>(x);
      CHECK(std::abs(mass / task.marginal()[ux] - closed.scores[ux]) <= 1e-6);
      const double coeff = bhattacharyya_coeff(
          Skew(1.0 / lambda.lambda), task.model_posterior()[ux],
          task.bayes_posterior()[ux]);
      CHECK(std::abs(closed.normalizer * mass / task.marginal()[ux] - coeff) <=
            1e-6);
    }
  }
}

TEST_CASE("solver reports non-convergence when starved of iterations") {
  OracleConfig cfg;
  cfg.max_iters = 2;
  cfg.tolerance = 1e-16;
  const OracleSolution sol = solve_marginal_ideal(
      LossKind::log_loss, random_task(9, 5, 3), Temperature(0.5), cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations_used == 2);
}

TEST_CASE("exhaustive search endpoints") {
  const FiniteTask task = random_task(21, 6, 3);
  double max_risk = 0.0;
  for (int x = 0; x < 6; ++x) {
    max_risk = std::max(max_risk,
                        conditional_risk(LossKind::zero_one, task, x));
  }
  const auto [none, none_value] = exhaustive_rejector_search(
      LossKind::zero_one, task, RejectionCost(max_risk + 0.5));
  CHECK(none == RejectMask(6, 0));

  const auto [all, all_value] = exhaustive_rejector_search(
      LossKind::zero_one, task, RejectionCost(0.0));
  CHECK(all == RejectMask(6, 1));
  CHECK(all_value == 0.0);
}

TEST_CASE("exhaustive minimum is a lower bound for arbitrary masks") {
  std::mt19937_64 rng(31);
  const FiniteTask task = random_task(31, 8, 3);
  const RejectionCost c(0.4);
  const auto [best, best_value] =
      exhaustive_rejector_search(LossKind::log_loss, task, c);
  for (int trial = 0; trial < 100; ++trial) {
    RejectMask mask(8);
    for (auto& bit : mask) bit = rng() & 1u;
    CHECK(best_value <=
          rejection_objective(LossKind::log_loss, task, mask, c) + 1e-15);
  }
}

TEST_CASE("chow rule attains the exhaustive minimum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FiniteTask task = random_task(seed, 8, 3);
    for (LossKind kind : {LossKind::zero_one, LossKind::log_loss,
                          LossKind::modified_log_loss}) {
      for (double c : {0.0, 0.1, 0.5, 1.0}) {
        const RejectionCost cost(c);
        const auto [best, best_value] =
            exhaustive_rejector_search(kind, task, cost);
        const double chow_value = rejection_objective(
            kind, task, chow_rule(kind, task, cost), cost);
        CHECK(std::abs(chow_value - best_value) <= 1e-12);
      }
    }
  }
}

TEST_CASE("threshold scan recovers the chow mask") {
  const FiniteTask task = random_task(47, 6, 3);
  const Temperature lambda(2.0);

  // Cost beyond every risk: tau = 0 rejects nothing, like the chow mask.
  auto tau = chow_equivalence_scan(LossKind::log_loss, task, lambda,
                                   RejectionCost(50.0));
  REQUIRE(tau.has_value());
  CHECK(*tau == 0.0);

  // Zero cost: everything is rejected; some achievable threshold matches.
  tau = chow_equivalence_scan(LossKind::zero_one, task, lambda,
                              RejectionCost(0.0));
  REQUIRE(tau.has_value());
  const DensityRatioRejector rejector =
      marginal_ratio(LossKind::zero_one, task, lambda);
  CHECK(threshold_reject(rejector, Threshold::ratio(*tau)) == RejectMask(6, 1));

  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  constexpr double lambdas[] = {0.5, 1.0, 2.0, 10.0};
  for (int trial = 0; trial < 100; ++trial) {
    const FiniteTask t = random_task(static_cast<std::uint64_t>(trial), 6, 3);
    const LossKind kind = trial % 2 ? LossKind::log_loss : LossKind::zero_one;
    double max_risk = 0.0;
    for (int x = 0; x < 6; ++x) {
      max_risk = std::max(max_risk, conditional_risk(kind, t, x));
    }
    const RejectionCost c(u01(rng) * (1.2 * max_risk + 0.05));
    CHECK(chow_equivalence_scan(kind, t, Temperature(lambdas[trial % 4]), c)
              .has_value());
  }
}
