#include "rejection/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <span>

#include <json.hpp>

#include "rejection/divergences.hpp"
#include "rejection/generate.hpp"
#include "rejection/losses.hpp"
#include "rejection/oracle.hpp"
#include "rejection/rejectors.hpp"
#include "rejection/task.hpp"

namespace rejection {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTight = 1e-12;

constexpr LossKind kAllKinds[] = {LossKind::zero_one, LossKind::log_loss,
                                  LossKind::modified_log_loss};

std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.3g", v);
  return buffer;
}

FiniteTask sample_task(std::mt19937_64& rng, int n_inputs, int n_labels,
                       double noise) {
  TaskGenSpec spec;
  spec.n_inputs = n_inputs;
  spec.n_labels = n_labels;
  spec.model_noise = noise;
  spec.seed = rng();
  return generate_task(spec);
}

double noise_level(int trial) {
  constexpr double levels[] = {0.5, 1.0, 2.0};
  return levels[trial % 3];
}

// Thresholds strictly between distinct values (plus guards outside the
// range): every achievable mask is realized and no comparison sits on a
// tie, so cross-scale mask comparisons are float-robust.
std::vector<double> off_tie_grid(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> grid;
  if (sorted.front() > 0.0) grid.push_back(0.5 * sorted.front());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    grid.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  }
  grid.push_back(1.5 * sorted.back() + 1.0);
  return grid;
}

// |X| = 4 task with dyadic uniform marginal, uniform ground truth and a
// uniform model: every loss below is constant across (x, y), normalizers
// and scores come out exactly 1, and the marginal/joint relation is tight.
FiniteTask constant_loss_fixture() {
  const int n = 4;
  const int l = 2;
  std::vector<ProbVector> truth(static_cast<std::size_t>(n),
                                ProbVector({0.5, 0.5}));
  std::vector<double> logits(static_cast<std::size_t>(n * l), 0.0);
  return FiniteTask(FiniteDomain(n, l),
                    ProbVector({0.25, 0.25, 0.25, 0.25}),
                    PosteriorField(std::move(truth)),
                    Logits(std::move(logits), n, l));
}

}  // namespace

CheckResult check_chow_optimality(std::uint64_t seed, int n_tasks) {
  std::mt19937_64 rng(seed);
  constexpr double costs[] = {0.0, 0.1, 0.5, 1.0};
  double worst = -kInf;
  long long trials = 0;
  for (int t = 0; t < n_tasks; ++t) {
    const FiniteTask task = sample_task(rng, 8, 3, noise_level(t));
    for (LossKind kind : kAllKinds) {
      for (double c : costs) {
        const RejectionCost cost(c);
        const double chow_value =
            rejection_objective(kind, task, chow_rule(kind, task, cost), cost);
        const auto [best_mask, best_value] =
            exhaustive_rejector_search(kind, task, cost);
        worst = std::max(worst, chow_value - best_value);
        ++trials;
      }
    }
  }
  const bool pass = trials > 0 && worst <= kTight;
  return {"chow-optimality", pass, trials, worst,
          "objective excess of the closed-form rule over 2^|X| enumeration"};
}

CheckResult check_marginal_solver_agreement(std::uint64_t seed, int n_tasks) {
  std::mt19937_64 rng(seed);
  constexpr double lambdas[] = {0.5, 1.0, 2.0, 10.0};
  OracleConfig cfg;
  cfg.max_iters = 50000;
  cfg.tolerance = 1e-10;

  double worst_score = 0.0;
  double worst_objective = 0.0;
  int not_converged = 0;
  long long trials = 0;
  for (int t = 0; t < n_tasks; ++t) {
    const int n = 2 + t % 4;
    const int l = 2 + t % 2;
    const FiniteTask task = sample_task(rng, n, l, noise_level(t));
    const Temperature lambda(lambdas[t % 4]);
    const LossKind kind = kAllKinds[t % 3];
    cfg.seed = rng();

    const OracleSolution sol = solve_marginal_ideal(kind, task, lambda, cfg);
    if (!sol.converged) ++not_converged;
    const DensityRatioRejector closed = marginal_ratio(kind, task, lambda);

    std::vector<double> closed_distribution(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      const double ratio = sol.distribution[ux] / task.marginal()[ux];
      worst_score = std::max(worst_score,
                             std::abs(ratio - closed.scores[ux]));
      closed_distribution[ux] = task.marginal()[ux] * closed.scores[ux];
      ++trials;
    }
    worst_objective = std::max(
        worst_objective,
        std::abs(sol.objective_value -
                 marginal_objective(kind, task, lambda, closed_distribution)));
  }
  const bool pass = trials > 0 && worst_score <= 1e-6 &&
                    worst_objective <= 1e-8 && not_converged == 0;
  return {"marginal-solver-agreement", pass, trials, worst_score,
          "max |dQ/dP - score|; objective gap " + fmt(worst_objective) +
              ", unconverged " + std::to_string(not_converged)};
}

CheckResult check_joint_solver_agreement(std::uint64_t seed, int n_tasks) {
  std::mt19937_64 rng(seed);
  constexpr double lambdas[] = {0.5, 1.0, 2.0, 10.0};
  OracleConfig cfg;
  cfg.max_iters = 50000;
  cfg.tolerance = 1e-10;

  double worst_cell = 0.0;
  double worst_score = 0.0;
  double worst_objective = 0.0;
  int not_converged = 0;
  long long trials = 0;
  for (int t = 0; t < n_tasks; ++t) {
    const int n = 2 + t % 4;
    const int l = 2 + t % 2;
    const FiniteTask task = sample_task(rng, n, l, noise_level(t));
    const Temperature lambda(lambdas[t % 4]);
    const LossKind kind = kAllKinds[t % 3];
    cfg.seed = rng();

    const OracleSolution sol = solve_joint_ideal(kind, task, lambda, cfg);
    if (!sol.converged) ++not_converged;

    // Analytic solution evaluated from scratch: exponential reweighting of
    // the joint, normalized by direct summation.
    std::vector<double> reference(static_cast<std::size_t>(n * l), 0.0);
    double z = 0.0;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < l; ++y) {
        const double mass = task.joint(x, y);
        if (mass == 0.0) continue;
        const auto i = static_cast<std::size_t>(x * l + y);
        reference[i] =
            mass * std::exp(-loss(kind, task, x, y) / lambda.lambda);
        z += reference[i];
      }
    }
    for (double& v : reference) v /= z;

    for (std::size_t i = 0; i < reference.size(); ++i) {
      worst_cell = std::max(worst_cell,
                            std::abs(sol.distribution[i] - reference[i]));
      ++trials;
    }

    const DensityRatioRejector closed = joint_ratio(kind, task, lambda);
    for (int x = 0; x < n; ++x) {
      double q_marginal = 0.0;
      for (int y = 0; y < l; ++y) {
        q_marginal += sol.distribution[static_cast<std::size_t>(x * l + y)];
      }
      const auto ux = static_cast<std::size_t>(x);
      worst_score =
          std::max(worst_score, std::abs(q_marginal / task.marginal()[ux] -
                                         closed.scores[ux]));
    }
    worst_objective =
        std::max(worst_objective,
                 std::abs(sol.objective_value -
                          joint_objective(kind, task, lambda, reference)));
  }
  const bool pass = trials > 0 && worst_cell <= 1e-6 && worst_score <= 1e-6 &&
                    worst_objective <= 1e-8 && not_converged == 0;
  return {"joint-solver-agreement", pass, trials, std::max(worst_cell, worst_score),
          "max cell gap " + fmt(worst_cell) + ", marginalized score gap " +
              fmt(worst_score) + ", objective gap " + fmt(worst_objective) +
              ", unconverged " + std::to_string(not_converged)};
}

CheckResult check_chow_threshold_equivalence(std::uint64_t seed,
                                             int n_trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  constexpr double lambdas[] = {0.5, 1.0, 2.0, 10.0};
  int failures = 0;
  long long trials = 0;
  for (int t = 0; t < n_trials; ++t) {
    const FiniteTask task = sample_task(rng, 3 + t % 6, 2 + t % 2,
                                        noise_level(t));
    const LossKind kind = kAllKinds[t % 3];
    const Temperature lambda(lambdas[t % 4]);
    double max_risk = 0.0;
    for (int x = 0; x < task.n_inputs(); ++x) {
      max_risk = std::max(max_risk, conditional_risk(kind, task, x));
    }
    const double c = t % 10 == 0 ? 0.0 : u01(rng) * (1.2 * max_risk + 0.1);
    const auto tau = chow_equivalence_scan(kind, task, lambda,
                                           RejectionCost(c));
    ++trials;
    if (!tau.has_value()) {
      ++failures;
      continue;
    }
    const RejectMask via_ratio = threshold_reject(
        marginal_ratio(kind, task, lambda), Threshold::ratio(*tau));
    if (via_ratio != chow_rule(kind, task, RejectionCost(c))) ++failures;
  }
  const bool pass = trials > 0 && failures == 0;
  return {"chow-threshold-equivalence", pass, trials,
          static_cast<double>(failures),
          "scans that found no matching density-ratio threshold"};
}

CheckResult check_ratio_dominance(std::uint64_t seed, int n_tasks) {
  std::mt19937_64 rng(seed);
  constexpr double lambdas[] = {0.5, 1.0, 1.5, 2.0, 5.0, 10.0};
  double worst_score = -kInf;
  double worst_z = -kInf;
  int violations = 0;
  int fixture_failures = 0;
  long long trials = 0;
  for (int t = 0; t < n_tasks; ++t) {
    const FiniteTask task = sample_task(rng, 6, 3, noise_level(t));
    const DominanceReport report = ratio_dominance_check(
        kAllKinds[t % 3], task, Temperature(lambdas[t % 6]));
    worst_score = std::max(worst_score, report.worst_score_slack);
    worst_z = std::max(worst_z, report.z_slack);
    violations += report.rejector_violations;
    if (!report.pass) ++violations;
    ++trials;
  }

  // Constant-loss fixture: the relation is tight, bitwise.
  const FiniteTask fixture = constant_loss_fixture();
  for (double lam : {2.0, 5.0}) {
    const Temperature lambda(lam);
    const DensityRatioRejector marginal =
        marginal_ratio(LossKind::log_loss, fixture, lambda);
    const DensityRatioRejector joint =
        joint_ratio(LossKind::log_loss, fixture, lambda);
    for (double s : marginal.scores) {
      if (s != 1.0) ++fixture_failures;
    }
    for (double s : joint.scores) {
      if (s != 1.0) ++fixture_failures;
    }
    if (marginal.log_normalizer != joint.log_normalizer) ++fixture_failures;
    const DominanceReport tight =
        ratio_dominance_check(LossKind::log_loss, fixture, lambda);
    if (!tight.pass || tight.worst_score_slack != 0.0 || tight.z_slack != 0.0) {
      ++fixture_failures;
    }
    ++trials;
  }
  // Perfect-model fixture under the modified log-loss: both normalizers
  // are exactly 1.
  {
    const DensityRatioRejector marginal =
        marginal_ratio(LossKind::modified_log_loss, fixture, Temperature(2.0));
    const DensityRatioRejector joint =
        joint_ratio(LossKind::modified_log_loss, fixture, Temperature(2.0));
    if (marginal.normalizer != 1.0 || joint.normalizer != 1.0) {
      ++fixture_failures;
    }
    for (double s : marginal.scores) {
      if (s != 1.0) ++fixture_failures;
    }
    for (double s : joint.scores) {
      if (s != 1.0) ++fixture_failures;
    }
    ++trials;
  }

  const bool pass = trials > 0 && worst_score <= kTight && worst_z <= kTight &&
                    violations == 0 && fixture_failures == 0;
  return {"ratio-dominance", pass, trials, worst_score,
          "max Z*alpha - Z_j*alpha_j; Z/Z_j - 1 " + fmt(worst_z) +
              ", containment violations " + std::to_string(violations) +
              ", fixture failures " + std::to_string(fixture_failures)};
}

CheckResult check_bhatta_score_identity(std::uint64_t seed, int n_draws) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  long long trials = 0;
  while (trials < n_draws) {
    const FiniteTask task = sample_task(rng, 5, 3, noise_level(static_cast<int>(trials)));
    const Temperature lambda(1.05 + 9.0 * u01(rng));
    const DensityRatioRejector joint =
        joint_ratio(LossKind::modified_log_loss, task, lambda);
    for (int x = 0; x < task.n_inputs(); ++x) {
      const auto ux = static_cast<std::size_t>(x);
      const double zj_alpha =
          std::exp(joint.log_normalizer + std::log(joint.scores[ux]));
      const ProbVector& truth = task.bayes_posterior()[ux];
      const ProbVector& model = task.model_posterior()[ux];
      const double bc_model_first = bhattacharyya_coeff(
          Skew(1.0 / lambda.lambda), model, truth);
      const double bc_truth_first = bhattacharyya_coeff(
          Skew(1.0 - 1.0 / lambda.lambda), truth, model);
      worst = std::max(worst, std::abs(zj_alpha - bc_model_first));
      worst = std::max(worst, std::abs(zj_alpha - bc_truth_first));
      ++trials;
    }
  }

  // Bitwise bridge between the ratio scale and the divergence scale.
  int mismatches = 0;
  const int n_bridge = std::max(1, static_cast<int>(n_draws / 10));
  for (int t = 0; t < n_bridge; ++t) {
    const FiniteTask task = sample_task(rng, 6, 3, noise_level(t));
    const Temperature lambda(1.05 + 9.0 * u01(rng));
    const DensityRatioRejector joint =
        joint_ratio(LossKind::modified_log_loss, task, lambda);
    for (double tau : off_tie_grid(joint.scores)) {
      const RejectMask via_tau =
          threshold_reject(joint, Threshold::ratio(tau));
      const RejectMask via_kappa = bhatta_rejector(
          task, lambda, Threshold::divergence(joint.kappa_for(tau)));
      if (via_tau != via_kappa) ++mismatches;
      ++trials;
    }
  }
  const bool pass = worst <= kTight && mismatches == 0;
  return {"bhatta-score-identity", pass, trials, worst,
          "max |Z_j*alpha_j - BC| both skews; scale-bridge mismatches " +
              std::to_string(mismatches)};
}

CheckResult check_kl_score_identity(std::uint64_t seed, int n_draws,
                                    bool inject_kappa_sign_flip) {
  std::mt19937_64 rng(seed);
  constexpr double lambdas[] = {0.5, 1.0, 2.0, 10.0};
  double worst = 0.0;
  long long trials = 0;
  int task_index = 0;
  while (trials < n_draws) {
    const FiniteTask task =
        sample_task(rng, 5, 3, noise_level(task_index));
    const Temperature lambda(lambdas[task_index % 4]);
    ++task_index;
    const DensityRatioRejector marginal =
        marginal_ratio(LossKind::modified_log_loss, task, lambda);
    for (int x = 0; x < task.n_inputs(); ++x) {
      const auto ux = static_cast<std::size_t>(x);
      const double z_alpha =
          std::exp(marginal.log_normalizer + std::log(marginal.scores[ux]));
      const double reference = std::exp(
          -kl(task.bayes_posterior()[ux], task.model_posterior()[ux]) /
          lambda.lambda);
      worst = std::max(worst, std::abs(z_alpha - reference));
      ++trials;
    }
  }

  int mismatches = 0;
  const int n_bridge = std::max(1, static_cast<int>(n_draws / 10));
  for (int t = 0; t < n_bridge; ++t) {
    const FiniteTask task = sample_task(rng, 6, 3, noise_level(t));
    const Temperature lambda(lambdas[t % 4]);
    const DensityRatioRejector marginal =
        marginal_ratio(LossKind::modified_log_loss, task, lambda);
    for (double tau : off_tie_grid(marginal.scores)) {
      double kappa = marginal.kappa_for(tau);
      if (inject_kappa_sign_flip) kappa = -kappa;
      const RejectMask via_tau =
          threshold_reject(marginal, Threshold::ratio(tau));
      const RejectMask via_kappa =
          kl_rejector(task, lambda, Threshold::divergence(kappa));
      if (via_tau != via_kappa) ++mismatches;
      ++trials;
    }
  }
  const bool pass = worst <= kTight && mismatches == 0;
  return {"kl-score-identity", pass, trials, worst,
          "max |Z*alpha - exp(-KL/lambda)|; scale-bridge mismatches " +
              std::to_string(mismatches)};
}

CheckResult check_divergence_order(std::uint64_t seed, int n_pairs) {
  std::mt19937_64 rng(seed);
  constexpr double lambdas[] = {1.5, 2.0, 5.0, 100.0};
  double worst_order = -kInf;
  double worst_identity = 0.0;
  double worst_monotone = -kInf;
  long long trials = 0;
  int task_index = 0;
  while (trials < n_pairs) {
    const FiniteTask task = sample_task(rng, 4, 3, noise_level(task_index));
    ++task_index;
    for (int x = 0; x < task.n_inputs() && trials < n_pairs; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      const ProbVector& p = task.bayes_posterior()[ux];
      const ProbVector& q = task.model_posterior()[ux];
      const double lam = lambdas[trials % 4];
      const double beta = 1.0 - 1.0 / lam;
      const double bhatta = bhattacharyya_div(Skew(beta), p, q);
      const double klv = kl(p, q);
      worst_order = std::max(worst_order, bhatta - klv / lam);
      worst_identity = std::max(
          worst_identity, std::abs(bhatta - (1.0 - beta) * renyi(beta, p, q)));
      const double r_low = renyi(0.3, p, q);
      const double r_high = renyi(0.7, p, q);
      worst_monotone = std::max(worst_monotone, r_low - r_high);
      worst_monotone = std::max(worst_monotone, r_high - klv);
      ++trials;
    }
  }

  // Containment of the Bhattacharyya rejector in the KL rejector at the
  // lambda-scaled threshold.
  int violations = 0;
  const int n_tasks = std::max(1, static_cast<int>(n_pairs / 10));
  for (int t = 0; t < n_tasks; ++t) {
    const FiniteTask task = sample_task(rng, 6, 3, noise_level(t));
    const Temperature lambda(lambdas[t % 4]);
    std::vector<double> divergences(static_cast<std::size_t>(task.n_inputs()));
    for (int x = 0; x < task.n_inputs(); ++x) {
      const auto ux = static_cast<std::size_t>(x);
      divergences[ux] =
          bhattacharyya_div(Skew(1.0 - 1.0 / lambda.lambda),
                            task.bayes_posterior()[ux],
                            task.model_posterior()[ux]);
    }
    for (double kappa : off_tie_grid(divergences)) {
      const RejectMask narrow =
          bhatta_rejector(task, lambda, Threshold::divergence(kappa));
      const RejectMask wide = kl_rejector(
          task, lambda, Threshold::divergence(lambda.lambda * kappa));
      for (std::size_t x = 0; x < narrow.size(); ++x) {
        if (narrow[x] && !wide[x]) ++violations;
      }
      ++trials;
    }
  }
  const bool pass = worst_order <= kTight && worst_identity <= kTight &&
                    worst_monotone <= kTight && violations == 0;
  return {"divergence-order", pass, trials,
          std::max({worst_order, worst_identity, worst_monotone}),
          "bhatta vs KL/lambda slack " + fmt(worst_order) +
              ", renyi-bridge identity gap " + fmt(worst_identity) +
              ", monotonicity slack " + fmt(worst_monotone) +
              ", containment violations " + std::to_string(violations)};
}

CheckResult check_divergence_axioms(std::uint64_t seed, int n_pairs) {
  std::mt19937_64 rng(seed);
  int failures = 0;
  double worst_self = 0.0;
  long long trials = 0;
  int task_index = 0;
  while (trials < n_pairs) {
    const FiniteTask task = sample_task(rng, 4, 3, noise_level(task_index));
    ++task_index;
    for (int x = 0; x < task.n_inputs() && trials < n_pairs; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      const ProbVector& p = task.bayes_posterior()[ux];
      const ProbVector& q = task.model_posterior()[ux];
      for (double beta : {0.25, 0.5, 0.75}) {
        const double bc = bhattacharyya_coeff(Skew(beta), p, q);
        if (!(bc >= 0.0 && bc <= 1.0)) ++failures;
        if (!(bhattacharyya_div(Skew(beta), p, q) >= 0.0)) ++failures;
      }
      if (!(kl(p, q) >= 0.0)) ++failures;
      for (double alpha : {0.3, 0.7}) {
        if (!(renyi(alpha, p, q) >= 0.0)) ++failures;
      }
      worst_self = std::max({worst_self, kl(p, p),
                             bhattacharyya_div(Skew(0.5), p, p),
                             renyi(0.5, p, p)});
      ++trials;
    }
  }

  // Support violations must be infinite exactly, contained supports finite.
  const ProbVector p({0.5, 0.5, 0.0});
  const ProbVector q({0.5, 0.0, 0.5});
  const ProbVector full({0.2, 0.3, 0.5});
  if (kl(p, q) != kInf) ++failures;
  if (kl(q, p) != kInf) ++failures;
  if (kl(full, q) != kInf) ++failures;
  if (!std::isfinite(kl(q, full))) ++failures;
  const ProbVector disjoint_a({1.0, 0.0});
  const ProbVector disjoint_b({0.0, 1.0});
  if (bhattacharyya_coeff(Skew(0.5), disjoint_a, disjoint_b) != 0.0) ++failures;
  if (bhattacharyya_div(Skew(0.5), disjoint_a, disjoint_b) != kInf) ++failures;
  if (renyi(0.5, disjoint_a, disjoint_b) != kInf) ++failures;
  trials += 7;

  const bool pass = failures == 0 && worst_self <= kTight;
  return {"divergence-axioms", pass, trials, worst_self,
          "max self-divergence; range/support failures " +
              std::to_string(failures)};
}

CheckResult check_log_chow_forms(std::uint64_t seed, int n_trials) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int mismatches = 0;
  double worst = 0.0;
  long long trials = 0;
  for (int t = 0; t < n_trials; ++t) {
    const FiniteTask task = sample_task(rng, 6, 3, noise_level(t));
    double c = u01(rng) * 1.5 * std::log(3.0);
    if (t % 11 == 0) c = 0.0;
    if (t % 11 == 1) c = 10.0;
    const RejectionCost cost(c);
    if (chow_log_form(task, cost) !=
        chow_rule(LossKind::log_loss, task, cost)) {
      ++mismatches;
    }
    for (int x = 0; x < task.n_inputs(); ++x) {
      const auto ux = static_cast<std::size_t>(x);
      const ProbVector& truth = task.bayes_posterior()[ux];
      const double cross_entropy =
          conditional_risk(LossKind::log_loss, task, x);
      const double decomposition =
          shannon_entropy(truth) + kl(truth, task.model_posterior()[ux]);
      worst = std::max(worst, std::abs(cross_entropy - decomposition));
    }
    ++trials;
  }
  const bool pass = trials > 0 && mismatches == 0 && worst <= kTight;
  return {"log-chow-forms", pass, trials, worst,
          "cross-entropy decomposition gap; mask mismatches " +
              std::to_string(mismatches)};
}

CheckResult check_cascade_offset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const FiniteTask task = sample_task(rng, 8, 3, 1.0);
  double expected = 0.0;
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    expected += 2.0 * task.marginal()[ux] *
                shannon_entropy(task.bayes_posterior()[ux]);
  }

  double worst_spread = 0.0;
  double worst_offset = 0.0;
  long long trials = 0;
  for (double c : {0.0, 0.3}) {
    const RejectionCost cost(c);
    double lo = kInf;
    double hi = -kInf;
    RejectMask mask(8);
    for (std::uint32_t bits = 0; bits < 256; ++bits) {
      for (int x = 0; x < 8; ++x) {
        mask[static_cast<std::size_t>(x)] = (bits >> x) & 1u;
      }
      const double difference =
          cascade_objective(task, mask, cost) -
          rejection_objective(LossKind::modified_log_loss, task, mask, cost);
      lo = std::min(lo, difference);
      hi = std::max(hi, difference);
      worst_offset = std::max(worst_offset, std::abs(difference - expected));
      ++trials;
    }
    worst_spread = std::max(worst_spread, hi - lo);
  }
  const bool pass = worst_spread <= kTight && worst_offset <= kTight;
  return {"cascade-offset", pass, trials, worst_spread,
          "spread of cascade minus rejection objective over all masks; "
          "distance from twice the expected ground-truth entropy " +
              fmt(worst_offset)};
}

SuiteReport run_verification_suite(const VerifyOptions& options) {
  SuiteReport report;
  report.seed = options.seed;
  report.n_trials = options.n_trials;

  static const char* names[] = {
      "chow-optimality",        "marginal-solver-agreement",
      "joint-solver-agreement", "chow-threshold-equivalence",
      "ratio-dominance",        "bhatta-score-identity",
      "kl-score-identity",      "divergence-order",
      "divergence-axioms",      "log-chow-forms",
      "cascade-offset"};
  if (options.n_trials <= 0) {
    for (const char* name : names) {
      report.checks.push_back({name, false, 0, 0.0, "no trials"});
    }
    report.all_pass = false;
    return report;
  }

  const int big = options.n_trials;
  const int mid = std::max(1, options.n_trials / 5);
  const int small = std::max(1, options.n_trials / 10);
  const std::uint64_t s = options.seed;

  report.checks.push_back(check_chow_optimality(s + 1, mid));
  report.checks.push_back(check_marginal_solver_agreement(s + 2, small));
  report.checks.push_back(check_joint_solver_agreement(s + 3, small));
  report.checks.push_back(check_chow_threshold_equivalence(s + 4, small));
  report.checks.push_back(check_ratio_dominance(s + 5, big));
  report.checks.push_back(check_bhatta_score_identity(s + 6, big));
  report.checks.push_back(check_kl_score_identity(
      s + 7, big, options.inject_kl_kappa_sign_flip));
  report.checks.push_back(check_divergence_order(s + 8, big));
  report.checks.push_back(check_divergence_axioms(s + 9, big));
  report.checks.push_back(check_log_chow_forms(s + 10, big));
  report.checks.push_back(check_cascade_offset(s + 11));

  report.all_pass = true;
  for (const CheckResult& check : report.checks) {
    if (!check.pass) report.all_pass = false;
  }
  return report;
}

std::string report_to_json(const SuiteReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["n_trials"] = report.n_trials;
  j["all_pass"] = report.all_pass;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& check : report.checks) {
    nlohmann::ordered_json c;
    c["name"] = check.name;
    c["pass"] = check.pass;
    c["trials"] = check.trials;
    if (std::isfinite(check.worst_slack)) {
      c["worst_slack"] = check.worst_slack;
    } else {
      c["worst_slack"] = check.worst_slack > 0 ? "inf" : "-inf";
    }
    c["detail"] = check.detail;
    checks.push_back(std::move(c));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

std::string report_to_lines(const SuiteReport& report) {
  std::string out;
  int passed = 0;
  for (const CheckResult& check : report.checks) {
    out += check.pass ? "[PASS] " : "[FAIL] ";
    out += check.name;
    out += " trials=" + std::to_string(check.trials);
    out += " worst_slack=" + fmt(check.worst_slack);
    if (!check.detail.empty()) {
      out += " (" + check.detail + ")";
    }
    out += "\n";
    if (check.pass) ++passed;
  }
  out += "suite: " + std::string(report.all_pass ? "PASS" : "FAIL") + " (" +
         std::to_string(passed) + "/" +
         std::to_string(report.checks.size()) + " checks)\n";
  return out;
}

}  // namespace rejection
