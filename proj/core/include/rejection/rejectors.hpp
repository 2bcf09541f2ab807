#pragma once

// Rejectors and rejection objectives.
//
// Two families are implemented and cross-checkable against each other:
//
//  * Chow's rule: reject x iff the conditional risk at x is at least the
//    rejection cost c (ties reject).
//  * Density-ratio rejectors: reweight the marginal toward inputs the model
//    handles well, then reject x iff the ratio score falls at or below a
//    threshold tau (small ideal mass => reject; ties reject). The marginal
//    variant exponentiates the conditional risk; the joint variant averages
//    exponentiated per-label losses, which is never smaller (Jensen).
//
// Under the modified log-loss the joint scores are Bhattacharyya
// coefficients between model and ground-truth posteriors, and the marginal
// scores are exponentiated KL; bhatta_rejector / kl_rejector are the
// equivalent divergence-scale forms, bridged by
//    kappa_j = -log(Z_j * tau)      (joint)
//    kappa   = -lambda * log(Z * tau)  (marginal).

#include <span>
#include <vector>

#include "rejection/losses.hpp"
#include "rejection/task.hpp"

namespace rejection {

/// Regularization weight lambda > 0 on the dissimilarity term.
struct Temperature {
  explicit Temperature(double lambda);
  double lambda;
  /// The skew 1 - 1/lambda is valid only here.
  bool above_one;
};

/// Cost c >= 0 paid per rejected input.
struct RejectionCost {
  explicit RejectionCost(double c);
  double c;
};

/// A threshold lives either on the ratio scale (tau, nonnegative) or on the
/// divergence scale (kappa, any real).
struct Threshold {
  enum class Scale { ratio, divergence };

  static Threshold ratio(double tau);
  static Threshold divergence(double kappa);

  double value;
  Scale scale;

 private:
  Threshold(double v, Scale s) : value(v), scale(s) {}
};

enum class RatioKind { marginal, joint };

/// Per-input density-ratio scores alpha(x) = dQ/dP_x with their partition
/// constant. Scores integrate to 1 against the marginal; the log normalizer
/// is kept so threshold reparameterizations stay exact even when Z itself
/// under- or overflows.
struct DensityRatioRejector {
  std::vector<double> scores;
  double normalizer;      // Z (marginal) or Z_j (joint)
  double log_normalizer;  // log of the above, computed stably
  RatioKind kind;
  double lambda;

  /// Divergence-scale threshold equivalent to ratio-scale tau.
  double kappa_for(double tau) const;
  /// Inverse of kappa_for.
  double tau_for(double kappa) const;
};

/// Chow's rule: mask[x] = 1 iff conditional_risk(kind, x) >= c.
RejectMask chow_rule(LossKind kind, const FiniteTask& task, RejectionCost c);

/// Log-loss Chow's rule in divergence form: reject iff
/// kl(pi*(x), pi(x)) >= c - H(pi*(x)). Agrees with chow_rule(log_loss, c).
RejectMask chow_log_form(const FiniteTask& task, RejectionCost c);

/// Marginal ideal density ratio: alpha(x) proportional to
/// exp(-conditional_risk(x) / lambda), normalized against the marginal.
DensityRatioRejector marginal_ratio(LossKind kind, const FiniteTask& task,
                                    Temperature lambda);

/// Joint ideal density ratio: alpha_j(x) proportional to
/// E_{Y ~ pi*(x)}[exp(-loss(x, Y) / lambda)], normalized likewise.
DensityRatioRejector joint_ratio(LossKind kind, const FiniteTask& task,
                                 Temperature lambda);

/// mask[x] = 1 iff scores[x] <= tau (ratio scale, ties reject).
RejectMask threshold_reject(const DensityRatioRejector& rejector,
                            Threshold tau);

/// mask[x] = 1 iff B_{1 - 1/lambda}(pi*(x) || pi(x)) >= kappa_j. Requires
/// lambda > 1 so the skew is valid. With kappa_j = -log(Z_j * tau) this is
/// the joint ratio rejector for the modified log-loss.
RejectMask bhatta_rejector(const FiniteTask& task, Temperature lambda,
                           Threshold kappa_j);

/// mask[x] = 1 iff kl(pi*(x), pi(x)) >= kappa. With
/// kappa = -lambda * log(Z * tau) this is the marginal ratio rejector for
/// the modified log-loss; lambda enters only through that bridge.
RejectMask kl_rejector(const FiniteTask& task, Temperature lambda,
                       Threshold kappa);

/// Cost-penalized rejection objective:
/// sum_x P_x(x) * [(1 - mask[x]) * conditional_risk(x) + c * mask[x]].
double rejection_objective(LossKind kind, const FiniteTask& task,
                           const RejectMask& mask, RejectionCost c);

/// Two-model cascade objective: accepted inputs pay the model's log-loss
/// risk, rejected inputs defer to the ground-truth posterior and pay its
/// entropy plus the rejection cost, and the ground-truth entropy is added
/// once more as a standalone term. Differs from
/// rejection_objective(modified_log_loss, ...) by the mask-independent
/// constant 2 * E_{P_x}[H(pi*)].
double cascade_objective(const FiniteTask& task, const RejectMask& mask,
                         RejectionCost c);

/// Distinct score values plus midpoints between neighbors, padded below the
/// minimum and above the maximum: sweeping it realizes every achievable
/// mask of threshold_reject, tie behavior included. Sorted ascending.
std::vector<double> auto_tau_grid(std::span<const double> scores);

/// Numeric verification of the Jensen relation between the two ratio
/// rejectors on one task: Z <= Z_j, Z * alpha(x) <= Z_j * alpha_j(x)
/// pointwise, and containment of the joint rejection region in the marginal
/// one at matched thresholds tau' = (Z / Z_j) * tau across a threshold grid.
struct DominanceReport {
  bool pass;
  double worst_score_slack;  // max_x Z*alpha(x) - Z_j*alpha_j(x)
  double z_slack;            // Z / Z_j - 1
  int rejector_violations;
  int grid_size;
};

DominanceReport ratio_dominance_check(LossKind kind, const FiniteTask& task,
                                      Temperature lambda);

}  // namespace rejection
