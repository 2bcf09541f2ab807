#include "rejection/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "rejection/divergences.hpp"
#include "rejection/task_io.hpp"

namespace rejection {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 1469598103934665603ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string format_hash(std::uint64_t h) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(h));
  return buffer;
}

void check_grid(std::span<const double> grid, const char* who) {
  if (grid.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty threshold grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::isnan(grid[i]) || grid[i] < 0.0) {
      throw std::invalid_argument(std::string(who) +
                                  ": grid values must be >= 0");
    }
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw std::invalid_argument(std::string(who) +
                                  ": grid must be sorted ascending");
    }
  }
}

double weighted_rate(const FiniteTask& task, const RejectMask& mask) {
  double rate = 0.0;
  for (std::size_t x = 0; x < mask.size(); ++x) {
    if (mask[x]) rate += task.marginal()[x];
  }
  return rate;
}

double selective_risk_of(const FiniteTask& task,
                         std::span<const double> risks,
                         const RejectMask& mask) {
  double risk = 0.0;
  for (std::size_t x = 0; x < mask.size(); ++x) {
    if (!mask[x]) risk += task.marginal()[x] * risks[x];
  }
  return risk;
}

int count_set(const RejectMask& mask) {
  int n = 0;
  for (auto b : mask) n += b ? 1 : 0;
  return n;
}

std::vector<double> risks_of(const FiniteTask& task, LossKind kind) {
  std::vector<double> risks(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    risks[static_cast<std::size_t>(x)] = conditional_risk(kind, task, x);
  }
  return risks;
}

std::vector<double> per_input_divergence(const FiniteTask& task,
                                         RejectorFamily family,
                                         double lambda) {
  std::vector<double> values(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    const auto ux = static_cast<std::size_t>(x);
    const ProbVector& truth = task.bayes_posterior()[ux];
    const ProbVector& model = task.model_posterior()[ux];
    values[ux] = family == RejectorFamily::kl
                     ? kl(truth, model)
                     : bhattacharyya_div(Skew(1.0 - 1.0 / lambda), truth,
                                         model);
  }
  return values;
}

}  // namespace

std::uint64_t mask_hash(const RejectMask& mask) {
  return fnv1a(mask.data(), mask.size());
}

std::uint64_t task_fingerprint(const FiniteTask& task) {
  const std::string text = task_to_string(task);
  return fnv1a(text.data(), text.size());
}

SweepResult sweep(const FiniteTask& task, LossKind kind, Temperature lambda,
                  RatioKind rejector_kind, std::span<const double> tau_grid) {
  check_grid(tau_grid, "sweep");
  const DensityRatioRejector rejector =
      rejector_kind == RatioKind::marginal ? marginal_ratio(kind, task, lambda)
                                           : joint_ratio(kind, task, lambda);
  const std::vector<double> risks = risks_of(task, kind);

  SweepResult result;
  result.kind = kind;
  result.lambda = lambda.lambda;
  result.rejector = rejector_kind;
  result.task_fingerprint = task_fingerprint(task);
  result.rows.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const RejectMask mask = threshold_reject(rejector, Threshold::ratio(tau));
    SweepRow row;
    row.tau = tau;
    row.kappa = rejector.kappa_for(tau);
    row.rejection_rate = weighted_rate(task, mask);
    row.selective_risk = selective_risk_of(task, risks, mask);
    row.n_rejected = count_set(mask);
    row.mask_hash = mask_hash(mask);
    result.rows.push_back(row);
  }
  return result;
}

AgreementReport compare_rejectors(const FiniteTask& task, LossKind kind,
                                  Temperature lambda,
                                  std::span<const double> tau_grid) {
  check_grid(tau_grid, "compare_rejectors");
  const DensityRatioRejector marginal = marginal_ratio(kind, task, lambda);
  const DensityRatioRejector joint = joint_ratio(kind, task, lambda);
  // Z_j / Z >= 1: the marginal threshold matched to the joint one.
  const double scale_up =
      std::exp(joint.log_normalizer - marginal.log_normalizer);

  AgreementReport report;
  report.kind = kind;
  report.lambda = lambda.lambda;
  report.task_fingerprint = task_fingerprint(task);
  report.containment_violations = 0;
  for (double tau : tau_grid) {
    const RejectMask joint_mask =
        threshold_reject(joint, Threshold::ratio(tau));
    const RejectMask marginal_mask =
        threshold_reject(marginal, Threshold::ratio(scale_up * tau));
    AgreementRow row{tau, scale_up * tau, 0, 0, 0, 0};
    for (std::size_t x = 0; x < joint_mask.size(); ++x) {
      if (joint_mask[x] && marginal_mask[x]) {
        ++row.both;
      } else if (marginal_mask[x]) {
        ++row.only_marginal;
      } else if (joint_mask[x]) {
        ++row.only_joint;
      } else {
        ++row.neither;
      }
    }
    report.containment_violations += row.only_joint;
    report.rows.push_back(row);
  }

  report.divergence_section = lambda.above_one;
  report.divergence_violations = 0;
  report.divergence_grid_size = 0;
  if (report.divergence_section) {
    const std::vector<double> divergences =
        per_input_divergence(task, RejectorFamily::bhatta, lambda.lambda);
    const std::vector<double> kappa_grid = auto_tau_grid(divergences);
    report.divergence_grid_size = static_cast<int>(kappa_grid.size());
    for (double kappa : kappa_grid) {
      const RejectMask narrow =
          bhatta_rejector(task, lambda, Threshold::divergence(kappa));
      const RejectMask wide = kl_rejector(
          task, lambda, Threshold::divergence(lambda.lambda * kappa));
      for (std::size_t x = 0; x < narrow.size(); ++x) {
        if (narrow[x] && !wide[x]) ++report.divergence_violations;
      }
    }
  }
  return report;
}

RejectorFamily rejector_family_from_flag(std::string_view flag) {
  if (flag == "chow") return RejectorFamily::chow;
  if (flag == "marginal") return RejectorFamily::marginal;
  if (flag == "joint") return RejectorFamily::joint;
  if (flag == "bhatta") return RejectorFamily::bhatta;
  if (flag == "kl") return RejectorFamily::kl;
  throw std::invalid_argument("unknown rejector: " + std::string(flag));
}

std::string_view rejector_family_flag(RejectorFamily family) {
  switch (family) {
    case RejectorFamily::chow:
      return "chow";
    case RejectorFamily::marginal:
      return "marginal";
    case RejectorFamily::joint:
      return "joint";
    case RejectorFamily::bhatta:
      return "bhatta";
    case RejectorFamily::kl:
      return "kl";
  }
  throw std::invalid_argument("bad RejectorFamily");
}

CurveResult risk_coverage_curve(const FiniteTask& task, LossKind kind,
                                std::optional<Temperature> lambda,
                                RejectorFamily family) {
  if (family != RejectorFamily::chow && !lambda.has_value()) {
    throw std::invalid_argument("risk_coverage_curve: lambda required");
  }
  const std::vector<double> risks = risks_of(task, kind);

  CurveResult result;
  result.family = family;
  result.kind = kind;
  result.lambda = lambda ? lambda->lambda
                         : std::numeric_limits<double>::quiet_NaN();
  result.task_fingerprint = task_fingerprint(task);

  std::vector<double> grid;
  std::vector<RejectMask> masks;
  switch (family) {
    case RejectorFamily::chow: {
      // Nonnegative risk values only: costs must be >= 0.
      std::vector<double> levels;
      for (double r : risks) levels.push_back(std::max(r, 0.0));
      grid = auto_tau_grid(levels);
      for (double c : grid) {
        masks.push_back(chow_rule(kind, task, RejectionCost(c)));
      }
      break;
    }
    case RejectorFamily::marginal:
    case RejectorFamily::joint: {
      const DensityRatioRejector rejector =
          family == RejectorFamily::marginal
              ? marginal_ratio(kind, task, *lambda)
              : joint_ratio(kind, task, *lambda);
      grid = auto_tau_grid(rejector.scores);
      for (double tau : grid) {
        masks.push_back(threshold_reject(rejector, Threshold::ratio(tau)));
      }
      break;
    }
    case RejectorFamily::kl:
    case RejectorFamily::bhatta: {
      const std::vector<double> values =
          per_input_divergence(task, family, lambda->lambda);
      grid = auto_tau_grid(values);
      for (double kappa : grid) {
        masks.push_back(family == RejectorFamily::kl
                            ? kl_rejector(task, *lambda,
                                          Threshold::divergence(kappa))
                            : bhatta_rejector(task, *lambda,
                                              Threshold::divergence(kappa)));
      }
      break;
    }
  }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    CurveRow row;
    row.threshold = grid[i];
    row.coverage = 1.0 - weighted_rate(task, masks[i]);
    row.selective_risk = selective_risk_of(task, risks, masks[i]);
    row.n_rejected = count_set(masks[i]);
    row.mask_hash = mask_hash(masks[i]);
    result.rows.push_back(row);
  }
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::string out = "# loss=" + std::string(loss_kind_flag(result.kind)) +
                    " lambda=" + format_double(result.lambda) + " rejector=" +
                    (result.rejector == RatioKind::marginal ? "marginal"
                                                            : "joint") +
                    " task=" + format_hash(result.task_fingerprint) + "\n";
  out += "tau,kappa,rejection_rate,selective_risk,n_rejected,mask_hash\n";
  for (const SweepRow& row : result.rows) {
    out += format_double(row.tau) + "," + format_double(row.kappa) + "," +
           format_double(row.rejection_rate) + "," +
           format_double(row.selective_risk) + "," +
           std::to_string(row.n_rejected) + "," + format_hash(row.mask_hash) +
           "\n";
  }
  return out;
}

std::string agreement_to_csv(const AgreementReport& report) {
  std::string out = "# loss=" + std::string(loss_kind_flag(report.kind)) +
                    " lambda=" + format_double(report.lambda) +
                    " task=" + format_hash(report.task_fingerprint) + "\n";
  out += "tau,tau_marginal,both,only_marginal,only_joint,neither\n";
  for (const AgreementRow& row : report.rows) {
    out += format_double(row.tau) + "," + format_double(row.tau_marginal) +
           "," + std::to_string(row.both) + "," +
           std::to_string(row.only_marginal) + "," +
           std::to_string(row.only_joint) + "," + std::to_string(row.neither) +
           "\n";
  }
  out += "# ratio_containment_violations=" +
         std::to_string(report.containment_violations) + "\n";
  if (report.divergence_section) {
    out += "# divergence_containment_violations=" +
           std::to_string(report.divergence_violations) +
           " grid_size=" + std::to_string(report.divergence_grid_size) + "\n";
  }
  return out;
}

std::string curve_to_csv(const CurveResult& result) {
  std::string out =
      "# rejector=" + std::string(rejector_family_flag(result.family)) +
      " loss=" + std::string(loss_kind_flag(result.kind)) +
      " lambda=" + format_double(result.lambda) +
      " task=" + format_hash(result.task_fingerprint) + "\n";
  out += "threshold,coverage,selective_risk,n_rejected,mask_hash\n";
  for (const CurveRow& row : result.rows) {
    out += format_double(row.threshold) + "," + format_double(row.coverage) +
           "," + format_double(row.selective_risk) + "," +
           std::to_string(row.n_rejected) + "," + format_hash(row.mask_hash) +
           "\n";
  }
  return out;
}

}  // namespace rejection
