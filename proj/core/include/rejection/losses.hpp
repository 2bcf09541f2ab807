#pragma once

// Loss functions and conditional risk.
//
// Three losses are supported: zero-one, log-loss, and a modified log-loss
// that subtracts the ground-truth log-probability. The modified variant can
// be negative (when the model puts more mass on a label than the truth
// does); nothing downstream assumes nonnegative losses. All logarithms are
// natural, all divergence-flavored results are in nats.

#include <string>
#include <string_view>

#include "rejection/task.hpp"

namespace rejection {

enum class LossKind {
  zero_one,
  log_loss,
  modified_log_loss,
};

/// Parses a CLI flag value: "zero-one" | "log" | "modified-log".
LossKind loss_kind_from_flag(std::string_view flag);
std::string_view loss_kind_flag(LossKind kind);

/// Pointwise loss of the model at (x, y).
///   zero_one:          1 if predict(model_posterior(x)) != y else 0
///   log_loss:          -log pi_y(x)
///   modified_log_loss: -log(pi_y(x) / pi*_y(x))
/// May return +inf. Querying modified_log_loss at a label with
/// pi*_y(x) == 0 throws std::domain_error; expectations skip such labels
/// instead (see conditional_risk).
double loss(LossKind kind, const FiniteTask& task, int x, int y);

/// Expected loss at x under the ground-truth posterior,
/// sum_y pi*_y(x) * loss(kind, x, y), with the convention that labels of
/// zero ground-truth mass contribute 0 even where the loss is undefined.
/// For modified_log_loss this equals kl(pi*(x), pi(x)) up to rounding.
double conditional_risk(LossKind kind, const FiniteTask& task, int x);

/// -sum_i p_i log p_i with 0 log 0 = 0. Lies in [0, log L].
double shannon_entropy(const ProbVector& p);

}  // namespace rejection
