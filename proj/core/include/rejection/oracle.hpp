#pragma once

// Independent brute-force solvers used to validate the closed forms.
//
// The two simplex programs (reweight the marginal, or the joint, toward
// inputs the model handles well, with a KL pull back to the truth) are
// solved by entropic mirror descent: multiplicative exponentiated-gradient
// steps that keep iterates strictly positive on the simplex, with
// backtracking halving whenever a step fails to decrease the objective.
// Both objectives are convex (linear term plus KL), so a stationary point
// is the global optimum. None of this shares arithmetic with the
// closed-form rejectors in rejectors.hpp; agreement between the two routes
// is the point.
//
// exhaustive_rejector_search enumerates every binary mask and is the
// optimality oracle for Chow's rule.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rejection/rejectors.hpp"

namespace rejection {

struct OracleConfig {
  int max_iters = 100000;
  /// Initial step, measured in units of 1/lambda (the natural scale of the
  /// entropic regularizer); backtracking halves it on objective increase.
  double step_size = 0.5;
  /// Stop once an iteration decreases the objective by less than this AND
  /// the dual stationarity residual (spread of the Lagrangian gradient over
  /// the support) is below lambda * 1e-10. The residual condition is what
  /// certifies componentwise accuracy; small objective decreases alone say
  /// nothing about small-mass coordinates.
  double tolerance = 1e-10;
  /// Unused by the deterministic solvers; kept so callers can thread one
  /// seed through every oracle invocation.
  std::uint64_t seed = 0;
};

struct OracleSolution {
  /// Over X for the marginal program; row-major over X x Y (zeros off the
  /// support of P) for the joint program.
  std::vector<double> distribution;
  double objective_value;
  bool converged;
  int iterations_used;
  /// Largest |sum - 1| observed on any normalized iterate.
  double max_simplex_drift;
};

/// Value of the marginal program's objective at an arbitrary point q on the
/// simplex over X: sum_x q(x) risk(x) + lambda * KL(q || P_x).
double marginal_objective(LossKind kind, const FiniteTask& task,
                          Temperature lambda, std::span<const double> q);

/// Value of the joint program's objective at q on the simplex over X x Y
/// (row-major): sum_{x,y} q(x,y) loss(x,y) + lambda * KL(q || P).
double joint_objective(LossKind kind, const FiniteTask& task,
                       Temperature lambda, std::span<const double> q);

/// Minimizes the marginal program by mirror descent from q = P_x.
/// Requires lambda > 1e-6 and |X| <= 64.
OracleSolution solve_marginal_ideal(LossKind kind, const FiniteTask& task,
                                    Temperature lambda,
                                    const OracleConfig& cfg);

/// Minimizes the joint program by mirror descent from q = P.
/// Requires lambda > 1e-6 and |X| * L <= 256.
OracleSolution solve_joint_ideal(LossKind kind, const FiniteTask& task,
                                 Temperature lambda, const OracleConfig& cfg);

/// Enumerates all 2^|X| masks (|X| <= 20) and returns a minimizer of
/// rejection_objective together with its value.
std::pair<RejectMask, double> exhaustive_rejector_search(LossKind kind,
                                                         const FiniteTask& task,
                                                         RejectionCost c);

/// Scans the |X|+1 achievable thresholds of the marginal ratio rejector for
/// one whose mask equals chow_rule(kind, c) bitwise. Returns that tau, or
/// nullopt if no achievable mask matches.
std::optional<double> chow_equivalence_scan(LossKind kind,
                                            const FiniteTask& task,
                                            Temperature lambda,
                                            RejectionCost c);

}  // namespace rejection
