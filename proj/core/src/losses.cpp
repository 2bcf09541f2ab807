#include "rejection/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace rejection {

LossKind loss_kind_from_flag(std::string_view flag) {
  if (flag == "zero-one") return LossKind::zero_one;
  if (flag == "log") return LossKind::log_loss;
  if (flag == "modified-log") return LossKind::modified_log_loss;
  throw std::invalid_argument("unknown loss kind: " + std::string(flag));
}

std::string_view loss_kind_flag(LossKind kind) {
  switch (kind) {
    case LossKind::zero_one:
      return "zero-one";
    case LossKind::log_loss:
      return "log";
    case LossKind::modified_log_loss:
      return "modified-log";
  }
  throw std::invalid_argument("bad LossKind");
}

namespace {

void check_indices(const FiniteTask& task, int x, int y) {
  if (x < 0 || x >= task.n_inputs()) {
    throw std::invalid_argument("loss: input index out of range");
  }
  if (y < 0 || y >= task.n_labels()) {
    throw std::invalid_argument("loss: label index out of range");
  }
}

}  // namespace

double loss(LossKind kind, const FiniteTask& task, int x, int y) {
  check_indices(task, x, y);
  const auto ux = static_cast<std::size_t>(x);
  const auto uy = static_cast<std::size_t>(y);
  const ProbVector& model = task.model_posterior()[ux];
  switch (kind) {
    case LossKind::zero_one:
      return predict(model) == y ? 0.0 : 1.0;
    case LossKind::log_loss:
      return -std::log(model[uy]);
    case LossKind::modified_log_loss: {
      const double truth = task.bayes_posterior()[ux][uy];
      if (truth == 0.0) {
        throw std::domain_error(
            "modified_log_loss undefined where the ground-truth mass is 0");
      }
      return -std::log(model[uy] / truth);
    }
  }
  throw std::invalid_argument("bad LossKind");
}

double conditional_risk(LossKind kind, const FiniteTask& task, int x) {
  if (x < 0 || x >= task.n_inputs()) {
    throw std::invalid_argument("conditional_risk: input index out of range");
  }
  const ProbVector& truth = task.bayes_posterior()[static_cast<std::size_t>(x)];
  double risk = 0.0;
  for (int y = 0; y < task.n_labels(); ++y) {
    const double w = truth[static_cast<std::size_t>(y)];
    if (w == 0.0) continue;  // zero-mass labels contribute nothing
    risk += w * loss(kind, task, x, y);
  }
  return risk;
}

double shannon_entropy(const ProbVector& p) {
  double h = 0.0;
  for (double v : p) {
    if (v == 0.0) continue;
    h -= v * std::log(v);
  }
  return h;
}

}  // namespace rejection
