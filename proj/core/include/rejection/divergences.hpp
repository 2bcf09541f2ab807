#pragma once

// Divergences between points on the simplex: Kullback-Leibler, the skewed
// Bhattacharyya coefficient/divergence, and the Renyi divergence that links
// the two families.
//
// Zero-mass conventions: 0 log 0 = 0 in KL, and 0^b = 0 for b > 0, so a term
// with p_i = 0 contributes nothing to a Bhattacharyya sum regardless of q_i.
// KL is +inf exactly when p puts mass where q has none.

#include "rejection/task.hpp"

namespace rejection {

/// Skew parameter, valid only on the open interval (0, 1).
struct Skew {
  explicit Skew(double beta);
  double beta;
};

/// KL(p || q) = sum_i p_i log(p_i / q_i). Nonnegative; +inf on support
/// violations; exactly 0 when p == q.
double kl(const ProbVector& p, const ProbVector& q);

/// Skewed Bhattacharyya coefficient BC_beta(p || q) = sum_i p_i^beta
/// q_i^(1-beta), with the skew on the FIRST argument. Lies in [0, 1]
/// (Holder bound, enforced); 1 iff p == q, 0 iff supports are disjoint.
double bhattacharyya_coeff(Skew beta, const ProbVector& p,
                           const ProbVector& q);

/// B_beta(p || q) = -log BC_beta(p || q). Nonnegative, +inf on disjoint
/// supports. Satisfies the skew swap B_beta(p||q) = B_{1-beta}(q||p).
double bhattacharyya_div(Skew beta, const ProbVector& p, const ProbVector& q);

/// Renyi divergence R_alpha(p || q) = log(sum_i p_i^alpha q_i^(1-alpha))
/// / (alpha - 1) for alpha in (0, 1). Non-decreasing in alpha with KL as
/// the alpha -> 1 limit, and B_beta = (1 - beta) * R_beta.
double renyi(double alpha, const ProbVector& p, const ProbVector& q);

}  // namespace rejection
