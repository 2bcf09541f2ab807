#include "rejection/task.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rejection {

FiniteDomain::FiniteDomain(int n_inputs_in, int n_labels_in)
    : n_inputs(n_inputs_in), n_labels(n_labels_in) {
  if (n_inputs < 1) {
    throw std::invalid_argument("FiniteDomain: n_inputs must be >= 1");
  }
  if (n_labels < 2) {
    throw std::invalid_argument("FiniteDomain: n_labels must be >= 2");
  }
}

ProbVector::ProbVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw std::invalid_argument("ProbVector: empty weight vector");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument(
          "ProbVector: entries must be finite and nonnegative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("ProbVector: entries sum to " +
                                std::to_string(sum) + ", not 1");
  }
  if (sum != 1.0) {
    for (double& w : weights_) w /= sum;
  }
}

PosteriorField::PosteriorField(std::vector<ProbVector> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) {
    throw std::invalid_argument("PosteriorField: no rows");
  }
  const std::size_t n_labels = rows_[0].size();
  for (const ProbVector& row : rows_) {
    if (row.size() != n_labels) {
      throw std::invalid_argument("PosteriorField: ragged rows");
    }
  }
}

Logits::Logits(std::vector<double> values, int n_inputs, int n_labels)
    : values_(std::move(values)), n_inputs_(n_inputs), n_labels_(n_labels) {
  if (n_inputs_ < 1 || n_labels_ < 1) {
    throw std::invalid_argument("Logits: nonpositive dimensions");
  }
  if (values_.size() != static_cast<std::size_t>(n_inputs_) *
                            static_cast<std::size_t>(n_labels_)) {
    throw std::invalid_argument("Logits: size does not match |X| x L");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Logits: entries must be finite");
    }
  }
}

namespace {

PosteriorField softmax_field(const Logits& logits) {
  std::vector<ProbVector> rows;
  rows.reserve(static_cast<std::size_t>(logits.n_inputs()));
  for (int x = 0; x < logits.n_inputs(); ++x) {
    rows.push_back(softmax(logits.row(static_cast<std::size_t>(x))));
  }
  return PosteriorField(std::move(rows));
}

}  // namespace

FiniteTask::FiniteTask(FiniteDomain domain, ProbVector marginal,
                       PosteriorField bayes_posterior, Logits logits)
    : domain_(domain),
      marginal_(std::move(marginal)),
      bayes_posterior_(std::move(bayes_posterior)),
      logits_(std::move(logits)),
      model_posterior_(softmax_field(logits_)) {
  const auto n = static_cast<std::size_t>(domain_.n_inputs);
  const auto l = static_cast<std::size_t>(domain_.n_labels);
  if (marginal_.size() != n) {
    throw std::invalid_argument("FiniteTask: marginal length != n_inputs");
  }
  if (bayes_posterior_.n_inputs() != n || bayes_posterior_.n_labels() != l) {
    throw std::invalid_argument("FiniteTask: posterior shape mismatch");
  }
  if (logits_.n_inputs() != domain_.n_inputs ||
      logits_.n_labels() != domain_.n_labels) {
    throw std::invalid_argument("FiniteTask: logits shape mismatch");
  }
  double joint_sum = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (marginal_[x] <= 0.0) {
      throw std::invalid_argument(
          "FiniteTask: marginal must be strictly positive (zero-mass input " +
          std::to_string(x) + ")");
    }
    for (std::size_t y = 0; y < l; ++y) {
      joint_sum += marginal_[x] * bayes_posterior_[x][y];
    }
  }
  if (std::abs(joint_sum - 1.0) > ProbVector::kSumTolerance) {
    throw std::invalid_argument("FiniteTask: joint mass sums to " +
                                std::to_string(joint_sum) + ", not 1");
  }
}

ProbVector softmax(std::span<const double> logits_row) {
  if (logits_row.empty()) {
    throw std::invalid_argument("softmax: empty row");
  }
  double max_logit = logits_row[0];
  for (double v : logits_row) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("softmax: non-finite logit");
    }
    max_logit = std::max(max_logit, v);
  }
  std::vector<double> exps(logits_row.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits_row.size(); ++i) {
    exps[i] = std::exp(logits_row[i] - max_logit);
    sum += exps[i];
  }
  for (double& e : exps) e /= sum;
  return ProbVector(std::move(exps));
}

int predict(const ProbVector& posterior_row) {
  int best = 0;
  for (std::size_t i = 1; i < posterior_row.size(); ++i) {
    if (posterior_row[i] > posterior_row[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

CombinedOutput combine(const FiniteTask& task, const RejectMask& mask) {
  const auto n = static_cast<std::size_t>(task.n_inputs());
  if (mask.size() != n) {
    throw std::invalid_argument("combine: mask length != n_inputs");
  }
  CombinedOutput out;
  out.outputs.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (mask[x]) {
      out.outputs[x] = std::nullopt;
    } else {
      out.outputs[x] = predict(task.model_posterior()[x]);
    }
  }
  return out;
}

}  // namespace rejection
