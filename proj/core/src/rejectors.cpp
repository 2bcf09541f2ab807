#include "rejection/rejectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rejection/divergences.hpp"

namespace rejection {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_mask(const FiniteTask& task, const RejectMask& mask,
                const char* who) {
  if (mask.size() != static_cast<std::size_t>(task.n_inputs())) {
    throw std::invalid_argument(std::string(who) + ": mask length != |X|");
  }
}

// Normalized exponential weights exp(base[x]) * weight[x] / Z with a shared
// shift by max(base), so scores stay representable for any risk scale. Fixed
// summation order keeps runs bit-reproducible.
struct NormalizedExp {
  std::vector<double> scores;
  double log_normalizer;
};

NormalizedExp normalize_against(const std::vector<double>& exponent,
                                const ProbVector& measure) {
  double shift = -kInf;
  for (double a : exponent) {
    if (std::isfinite(a)) shift = std::max(shift, a);
  }
  if (!std::isfinite(shift)) {
    throw std::invalid_argument(
        "density ratio: every exponent is non-finite");
  }
  std::vector<double> scores(exponent.size());
  double z = 0.0;
  for (std::size_t x = 0; x < exponent.size(); ++x) {
    scores[x] = std::exp(exponent[x] - shift);
    z += measure[x] * scores[x];
  }
  for (double& s : scores) s /= z;
  return {std::move(scores), shift + std::log(z)};
}

DensityRatioRejector finish_rejector(NormalizedExp parts, RatioKind kind,
                                     const FiniteTask& task, double lambda) {
  double against_marginal = 0.0;
  for (std::size_t x = 0; x < parts.scores.size(); ++x) {
    against_marginal += task.marginal()[x] * parts.scores[x];
  }
  if (std::abs(against_marginal - 1.0) > ProbVector::kSumTolerance) {
    throw std::runtime_error(
        "density ratio: scores do not integrate to 1 against the marginal");
  }
  return {std::move(parts.scores), std::exp(parts.log_normalizer),
          parts.log_normalizer, kind, lambda};
}

}  // namespace

Temperature::Temperature(double lambda_in)
    : lambda(lambda_in), above_one(lambda_in > 1.0) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("Temperature: lambda must be positive");
  }
}

RejectionCost::RejectionCost(double c_in) : c(c_in) {
  if (std::isnan(c) || c < 0.0) {
    throw std::invalid_argument("RejectionCost: c must be >= 0");
  }
}

Threshold Threshold::ratio(double tau) {
  if (std::isnan(tau) || tau < 0.0) {
    throw std::invalid_argument("Threshold: ratio-scale tau must be >= 0");
  }
  return Threshold(tau, Scale::ratio);
}

Threshold Threshold::divergence(double kappa) {
  if (std::isnan(kappa)) {
    throw std::invalid_argument("Threshold: kappa must not be NaN");
  }
  return Threshold(kappa, Scale::divergence);
}

double DensityRatioRejector::kappa_for(double tau) const {
  if (std::isnan(tau) || tau < 0.0) {
    throw std::invalid_argument("kappa_for: tau must be >= 0");
  }
  const double log_zt = log_normalizer + std::log(tau);
  return kind == RatioKind::marginal ? -lambda * log_zt : -log_zt;
}

double DensityRatioRejector::tau_for(double kappa) const {
  const double log_zt =
      kind == RatioKind::marginal ? -kappa / lambda : -kappa;
  return std::exp(log_zt - log_normalizer);
}

RejectMask chow_rule(LossKind kind, const FiniteTask& task, RejectionCost c) {
  RejectMask mask(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    mask[static_cast<std::size_t>(x)] =
        conditional_risk(kind, task, x) >= c.c ? 1 : 0;
  }
  return mask;
}

RejectMask chow_log_form(const FiniteTask& task, RejectionCost c) {
  RejectMask mask(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    const ProbVector& truth = task.bayes_posterior()[ux];
    const double divergence = kl(truth, task.model_posterior()[ux]);
    mask[ux] = divergence >= c.c - shannon_entropy(truth) ? 1 : 0;
  }
  return mask;
}

DensityRatioRejector marginal_ratio(LossKind kind, const FiniteTask& task,
                                    Temperature lambda) {
  std::vector<double> exponent(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    exponent[static_cast<std::size_t>(x)] =
        -conditional_risk(kind, task, x) / lambda.lambda;
  }
  return finish_rejector(normalize_against(exponent, task.marginal()),
                         RatioKind::marginal, task, lambda.lambda);
}

DensityRatioRejector joint_ratio(LossKind kind, const FiniteTask& task,
                                 Temperature lambda) {
  const int n = task.n_inputs();
  const int l = task.n_labels();
  // Shared shift over the whole support keeps per-label weights in (0, 1].
  std::vector<double> arg(static_cast<std::size_t>(n) *
                              static_cast<std::size_t>(l),
                          -kInf);
  double shift = -kInf;
  for (int x = 0; x < n; ++x) {
    const ProbVector& truth = task.bayes_posterior()[static_cast<std::size_t>(x)];
    for (int y = 0; y < l; ++y) {
      if (truth[static_cast<std::size_t>(y)] == 0.0) continue;
      const double a = -loss(kind, task, x, y) / lambda.lambda;
      arg[static_cast<std::size_t>(x * l + y)] = a;
      if (std::isfinite(a)) shift = std::max(shift, a);
    }
  }
  if (!std::isfinite(shift)) {
    throw std::invalid_argument("joint_ratio: every loss is non-finite");
  }
  std::vector<double> exponent(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    const ProbVector& truth = task.bayes_posterior()[static_cast<std::size_t>(x)];
    double w = 0.0;
    for (int y = 0; y < l; ++y) {
      const double mass = truth[static_cast<std::size_t>(y)];
      if (mass == 0.0) continue;
      w += mass * std::exp(arg[static_cast<std::size_t>(x * l + y)] - shift);
    }
    // w is E_{pi*}[exp(-loss/lambda)] / exp(shift); fold the shift back in
    // through the exponent so normalize_against sees one consistent scale.
    exponent[static_cast<std::size_t>(x)] = shift + std::log(w);
  }
  return finish_rejector(normalize_against(exponent, task.marginal()),
                         RatioKind::joint, task, lambda.lambda);
}

RejectMask threshold_reject(const DensityRatioRejector& rejector,
                            Threshold tau) {
  if (tau.scale != Threshold::Scale::ratio) {
    throw std::invalid_argument("threshold_reject: tau must be ratio-scale");
  }
  RejectMask mask(rejector.scores.size());
  for (std::size_t x = 0; x < rejector.scores.size(); ++x) {
    mask[x] = rejector.scores[x] <= tau.value ? 1 : 0;
  }
  return mask;
}

RejectMask bhatta_rejector(const FiniteTask& task, Temperature lambda,
                           Threshold kappa_j) {
  if (!lambda.above_one) {
    throw std::invalid_argument(
        "bhatta_rejector: lambda must exceed 1 for a valid skew");
  }
  if (kappa_j.scale != Threshold::Scale::divergence) {
    throw std::invalid_argument(
        "bhatta_rejector: kappa_j must be divergence-scale");
  }
  const Skew skew(1.0 - 1.0 / lambda.lambda);
  RejectMask mask(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    const double div = bhattacharyya_div(skew, task.bayes_posterior()[ux],
                                         task.model_posterior()[ux]);
    mask[ux] = div >= kappa_j.value ? 1 : 0;
  }
  return mask;
}

RejectMask kl_rejector(const FiniteTask& task, Temperature lambda,
                       Threshold kappa) {
  (void)lambda;  // enters only through the kappa <-> tau bridge
  if (kappa.scale != Threshold::Scale::divergence) {
    throw std::invalid_argument("kl_rejector: kappa must be divergence-scale");
  }
  RejectMask mask(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    const double div =
        kl(task.bayes_posterior()[ux], task.model_posterior()[ux]);
    mask[ux] = div >= kappa.value ? 1 : 0;
  }
  return mask;
}

double rejection_objective(LossKind kind, const FiniteTask& task,
                           const RejectMask& mask, RejectionCost c) {
  check_mask(task, mask, "rejection_objective");
  double objective = 0.0;
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    objective += task.marginal()[ux] *
                 (mask[ux] ? c.c : conditional_risk(kind, task, x));
  }
  return objective;
}

double cascade_objective(const FiniteTask& task, const RejectMask& mask,
                         RejectionCost c) {
  check_mask(task, mask, "cascade_objective");
  double objective = 0.0;
  double entropy_term = 0.0;
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    const double weight = task.marginal()[ux];
    const double deferral_risk =
        shannon_entropy(task.bayes_posterior()[ux]);
    entropy_term += weight * deferral_risk;
    objective += weight * (mask[ux] ? deferral_risk + c.c
                                    : conditional_risk(LossKind::log_loss,
                                                       task, x));
  }
  return objective + entropy_term;
}

std::vector<double> auto_tau_grid(std::span<const double> scores) {
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> grid;
  grid.reserve(2 * sorted.size() + 2);
  if (sorted.front() > 0.0) grid.push_back(0.5 * sorted.front());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    grid.push_back(sorted[i]);
    if (i + 1 < sorted.size()) {
      grid.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
  }
  grid.push_back(1.5 * sorted.back() + 1.0);
  return grid;
}

DominanceReport ratio_dominance_check(LossKind kind, const FiniteTask& task,
                                      Temperature lambda) {
  const DensityRatioRejector marginal = marginal_ratio(kind, task, lambda);
  const DensityRatioRejector joint = joint_ratio(kind, task, lambda);

  double worst = -kInf;
  for (std::size_t x = 0; x < marginal.scores.size(); ++x) {
    const double z_alpha =
        std::exp(marginal.log_normalizer + std::log(marginal.scores[x]));
    const double zj_alpha =
        std::exp(joint.log_normalizer + std::log(joint.scores[x]));
    worst = std::max(worst, z_alpha - zj_alpha);
  }
  const double z_ratio =
      std::exp(marginal.log_normalizer - joint.log_normalizer);

  const std::vector<double> grid = auto_tau_grid(marginal.scores);
  int violations = 0;
  for (double tau : grid) {
    const RejectMask wide = threshold_reject(marginal, Threshold::ratio(tau));
    const RejectMask narrow =
        threshold_reject(joint, Threshold::ratio(z_ratio * tau));
    for (std::size_t x = 0; x < wide.size(); ++x) {
      if (narrow[x] && !wide[x]) ++violations;
    }
  }

  constexpr double kSlack = 1e-12;
  DominanceReport report;
  report.worst_score_slack = worst;
  report.z_slack = z_ratio - 1.0;
  report.rejector_violations = violations;
  report.grid_size = static_cast<int>(grid.size());
  report.pass =
      worst <= kSlack && report.z_slack <= kSlack && violations == 0;
  return report;
}

}  // namespace rejection
