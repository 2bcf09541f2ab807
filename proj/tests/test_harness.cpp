#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "rejection/divergences.hpp"
#include "rejection/generate.hpp"
#include "rejection/losses.hpp"
#include "rejection/rejectors.hpp"
#include "rejection/sweep.hpp"
#include "rejection/task.hpp"
#include "rejection/task_io.hpp"
#include "rejection/verify.hpp"

using namespace rejection;

namespace {

FiniteTask uniform_fixture() {
  std::vector<ProbVector> truth(4, ProbVector({0.5, 0.5}));
  return FiniteTask(FiniteDomain(4, 2), ProbVector({0.25, 0.25, 0.25, 0.25}),
                    PosteriorField(std::move(truth)),
                    Logits(std::vector<double>(8, 0.0), 4, 2));
}

}  // namespace

TEST_CASE("task generation is deterministic and honors its knobs") {
  TaskGenSpec spec;
  spec.n_inputs = 10;
  spec.n_labels = 4;
  spec.seed = 424242;
  const FiniteTask a = generate_task(spec);
  const FiniteTask b = generate_task(spec);
  CHECK(task_to_string(a) == task_to_string(b));
  spec.seed = 424243;
  CHECK(task_to_string(generate_task(spec)) != task_to_string(a));

  CHECK_THROWS_AS(generate_task(TaskGenSpec{0, 3}), std::invalid_argument);
  TaskGenSpec bad;
  bad.model_noise = -1.0;
  CHECK_THROWS_AS(generate_task(bad), std::invalid_argument);
}

TEST_CASE("zero model noise produces a perfect model") {
  TaskGenSpec spec;
  spec.n_inputs = 12;
  spec.n_labels = 3;
  spec.model_noise = 0.0;
  spec.seed = 5;
  const FiniteTask task = generate_task(spec);
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    for (int y = 0; y < task.n_labels(); ++y) {
      CHECK(std::abs(task.model_posterior()[ux][static_cast<std::size_t>(y)] -
                     task.bayes_posterior()[ux][static_cast<std::size_t>(y)]) <=
            1e-12);
    }
  }
}

TEST_CASE("unit model noise separates the posteriors") {
  TaskGenSpec spec;
  spec.n_inputs = 12;
  spec.n_labels = 3;
  spec.model_noise = 1.0;
  spec.seed = 6;
  const FiniteTask task = generate_task(spec);
  double mean_divergence = 0.0;
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    mean_divergence +=
        kl(task.bayes_posterior()[ux], task.model_posterior()[ux]);
  }
  mean_divergence /= task.n_inputs();
  CHECK(mean_divergence > 0.0);
}

TEST_CASE("sweep validates its grid") {
  const FiniteTask task = uniform_fixture();
  const Temperature lambda(2.0);
  CHECK_THROWS_AS(sweep(task, LossKind::log_loss, lambda, RatioKind::marginal,
                        std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep(task, LossKind::log_loss, lambda, RatioKind::marginal,
                        std::vector<double>{0.5, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep(task, LossKind::log_loss, lambda, RatioKind::marginal,
                        std::vector<double>{-0.5, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("sweep endpoints and monotone rejection rate") {
  TaskGenSpec spec;
  spec.n_inputs = 8;
  spec.n_labels = 3;
  spec.seed = 9;
  const FiniteTask task = generate_task(spec);
  const Temperature lambda(2.0);
  const DensityRatioRejector rejector =
      marginal_ratio(LossKind::log_loss, task, lambda);
  const SweepResult result = sweep(task, LossKind::log_loss, lambda,
                                   RatioKind::marginal,
                                   auto_tau_grid(rejector.scores));

  double full_risk = 0.0;
  for (int x = 0; x < task.n_inputs(); ++x) {
    full_risk += task.marginal()[static_cast<std::size_t>(x)] *
                 conditional_risk(LossKind::log_loss, task, x);
  }
  CHECK(result.rows.front().rejection_rate == 0.0);
  CHECK(result.rows.front().selective_risk ==
        doctest::Approx(full_risk).epsilon(1e-12));
  CHECK(result.rows.back().rejection_rate ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.rows.back().selective_risk == 0.0);
  CHECK(result.rows.back().n_rejected == task.n_inputs());

  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    CHECK(result.rows[i].rejection_rate >= result.rows[i - 1].rejection_rate);
    CHECK(result.rows[i].n_rejected >= result.rows[i - 1].n_rejected);
  }
}

TEST_CASE("selective risk never increases along the sweep for nonnegative "
          "losses") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TaskGenSpec spec;
    spec.n_inputs = 7;
    spec.n_labels = 3;
    spec.seed = seed;
    const FiniteTask task = generate_task(spec);
    const LossKind kind = seed % 2 ? LossKind::zero_one : LossKind::log_loss;
    const Temperature lambda(1.0 + (seed % 3));
    for (RatioKind rk : {RatioKind::marginal, RatioKind::joint}) {
      const DensityRatioRejector rejector =
          rk == RatioKind::marginal ? marginal_ratio(kind, task, lambda)
                                    : joint_ratio(kind, task, lambda);
      const SweepResult result =
          sweep(task, kind, lambda, rk, auto_tau_grid(rejector.scores));
      for (std::size_t i = 1; i < result.rows.size(); ++i) {
        CHECK(result.rows[i].selective_risk <=
              result.rows[i - 1].selective_risk + 1e-15);
      }
    }
  }
}

TEST_CASE("sweep CSV is byte-stable and carries the pinned columns") {
  TaskGenSpec spec;
  spec.n_inputs = 5;
  spec.n_labels = 3;
  spec.seed = 77;
  const FiniteTask task = generate_task(spec);
  const Temperature lambda(2.0);
  const DensityRatioRejector rejector =
      joint_ratio(LossKind::modified_log_loss, task, lambda);
  const auto grid = auto_tau_grid(rejector.scores);
  const std::string a = sweep_to_csv(
      sweep(task, LossKind::modified_log_loss, lambda, RatioKind::joint, grid));
  const std::string b = sweep_to_csv(
      sweep(task, LossKind::modified_log_loss, lambda, RatioKind::joint, grid));
  CHECK(a == b);
  CHECK(a.find("tau,kappa,rejection_rate,selective_risk,n_rejected,mask_hash") !=
        std::string::npos);
  CHECK(a.find("# loss=modified-log lambda=2 rejector=joint task=") !=
        std::string::npos);
}

TEST_CASE("rejector comparison shows containment, equality when constant") {
  const FiniteTask fixture = uniform_fixture();
  const Temperature lambda(2.0);
  const DensityRatioRejector joint =
      joint_ratio(LossKind::log_loss, fixture, lambda);
  const AgreementReport tight = compare_rejectors(
      fixture, LossKind::log_loss, lambda, auto_tau_grid(joint.scores));
  CHECK(tight.containment_violations == 0);
  CHECK(tight.divergence_violations == 0);
  for (const AgreementRow& row : tight.rows) {
    CHECK(row.only_marginal == 0);  // identical masks at matched thresholds
    CHECK(row.only_joint == 0);
    CHECK(row.both + row.neither == fixture.n_inputs());
  }

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    TaskGenSpec spec;
    spec.n_inputs = 6;
    spec.n_labels = 3;
    spec.seed = seed;
    const FiniteTask task = generate_task(spec);
    const Temperature lam(1.25 + (seed % 5));
    const DensityRatioRejector j =
        joint_ratio(LossKind::modified_log_loss, task, lam);
    const AgreementReport report = compare_rejectors(
        task, LossKind::modified_log_loss, lam, auto_tau_grid(j.scores));
    CHECK(report.containment_violations == 0);
    CHECK(report.divergence_violations == 0);
    for (const AgreementRow& row : report.rows) {
      CHECK(row.both + row.only_marginal + row.only_joint + row.neither ==
            task.n_inputs());
    }
  }
}

TEST_CASE("risk-coverage curves cover every rejector family") {
  TaskGenSpec spec;
  spec.n_inputs = 6;
  spec.n_labels = 3;
  spec.seed = 13;
  const FiniteTask task = generate_task(spec);
  for (RejectorFamily family :
       {RejectorFamily::chow, RejectorFamily::marginal, RejectorFamily::joint,
        RejectorFamily::kl, RejectorFamily::bhatta}) {
    const CurveResult curve = risk_coverage_curve(
        task, LossKind::log_loss,
        family == RejectorFamily::chow ? std::nullopt
                                       : std::make_optional(Temperature(2.0)),
        family);
    CHECK(curve.rows.size() >= 3);
    bool saw_full = false;
    bool saw_empty = false;
    for (const CurveRow& row : curve.rows) {
      CHECK(row.coverage >= 0.0);
      CHECK(row.coverage <= 1.0 + 1e-12);
      if (row.n_rejected == 0) saw_empty = true;
      if (row.n_rejected == task.n_inputs()) saw_full = true;
    }
    CHECK(saw_full);
    CHECK(saw_empty);
    const std::string csv = curve_to_csv(curve);
    CHECK(csv.find("threshold,coverage,selective_risk,n_rejected,mask_hash") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(risk_coverage_curve(task, LossKind::log_loss, std::nullopt,
                                      RejectorFamily::kl),
                  std::invalid_argument);
  CHECK_THROWS_AS(risk_coverage_curve(task, LossKind::log_loss, Temperature(0.8),
                                      RejectorFamily::bhatta),
                  std::invalid_argument);
  CHECK_THROWS_AS(rejector_family_from_flag("nearest"), std::invalid_argument);
}

TEST_CASE("rejection records round-trip including non-finite thresholds") {
  RejectionRecord record;
  record.kind = "marginal";
  record.lambda = 2.0;
  record.tau = 0.0;
  record.kappa = std::numeric_limits<double>::infinity();
  record.normalizer = 0.875;
  record.mask = {1, 0, 1};
  const std::string text = rejection_records_to_string({record});
  const auto parsed = rejection_records_from_string(text);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].kind == "marginal");
  CHECK(parsed[0].kappa == std::numeric_limits<double>::infinity());
  CHECK(parsed[0].normalizer == 0.875);
  CHECK(parsed[0].mask == RejectMask{1, 0, 1});
  CHECK(rejection_records_to_string(parsed) == text);
}

TEST_CASE("verification suite passes, reproduces, and respects trial budgets") {
  VerifyOptions options;
  options.seed = 11;
  options.n_trials = 60;
  const SuiteReport report = run_verification_suite(options);
  CHECK(report.all_pass);
  CHECK(report.checks.size() == 11);
  CHECK(report_to_json(report) ==
        report_to_json(run_verification_suite(options)));

  VerifyOptions empty = options;
  empty.n_trials = 0;
  const SuiteReport starved = run_verification_suite(empty);
  CHECK_FALSE(starved.all_pass);
  for (const CheckResult& check : starved.checks) {
    CHECK_FALSE(check.pass);
    CHECK(check.detail == "no trials");
  }
}

TEST_CASE("the injected sign flip is caught by the bridge check") {
  VerifyOptions options;
  options.seed = 11;
  options.n_trials = 60;
  options.inject_kl_kappa_sign_flip = true;
  const SuiteReport mutated = run_verification_suite(options);
  CHECK_FALSE(mutated.all_pass);
  for (const CheckResult& check : mutated.checks) {
    if (check.name == "kl-score-identity") {
      CHECK_FALSE(check.pass);
    } else {
      CHECK(check.pass);
    }
  }
}
