#pragma once

// Finite-domain probability objects and the fixed-model prediction layer.
//
// A task is a finite classification problem: a strictly positive marginal
// over the inputs, a ground-truth posterior row per input, and the logits
// of a fixed model under evaluation. Everything downstream (losses,
// divergences, rejectors, oracles) consumes these objects; all of them are
// immutable after construction and safe to share across threads.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rejection {

/// Sizes of the input domain X and label space Y. Labels need at least two
/// classes; a single input is allowed.
struct FiniteDomain {
  FiniteDomain(int n_inputs, int n_labels);

  int n_inputs;
  int n_labels;
};

/// A point on the probability simplex. Construction validates nonnegativity
/// and that the entries sum to 1 within kSumTolerance, then renormalizes so
/// the stored weights sum to 1 exactly up to rounding. Inputs further from 1
/// are rejected with std::invalid_argument.
class ProbVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit ProbVector(std::vector<double> weights);

  double operator[](std::size_t i) const { return weights_[i]; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& values() const { return weights_; }

  auto begin() const { return weights_.begin(); }
  auto end() const { return weights_.end(); }

  bool operator==(const ProbVector& other) const = default;

 private:
  std::vector<double> weights_;
};

/// One probability row per input: used both for the ground-truth posterior
/// and for the model posterior obtained by softmax of the logits.
class PosteriorField {
 public:
  explicit PosteriorField(std::vector<ProbVector> rows);

  const ProbVector& row(std::size_t x) const { return rows_[x]; }
  const ProbVector& operator[](std::size_t x) const { return rows_[x]; }
  std::size_t n_inputs() const { return rows_.size(); }
  std::size_t n_labels() const { return rows_.empty() ? 0 : rows_[0].size(); }

 private:
  std::vector<ProbVector> rows_;
};

/// Raw model outputs, one row of L finite reals per input.
class Logits {
 public:
  Logits(std::vector<double> values, int n_inputs, int n_labels);

  std::span<const double> row(std::size_t x) const {
    return {values_.data() + x * static_cast<std::size_t>(n_labels_),
            static_cast<std::size_t>(n_labels_)};
  }
  int n_inputs() const { return n_inputs_; }
  int n_labels() const { return n_labels_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;  // row-major |X| x L
  int n_inputs_;
  int n_labels_;
};

/// A complete finite task: P(x, y) = marginal(x) * bayes_posterior(x)[y]
/// plus the fixed model's logits. Construction checks that the joint sums
/// to 1 within ProbVector::kSumTolerance and that the marginal is strictly
/// positive everywhere (density ratios against the marginal must be
/// well-defined). The model posterior softmax(logits(x)) is computed once
/// here so every consumer sees bit-identical rows.
class FiniteTask {
 public:
  FiniteTask(FiniteDomain domain, ProbVector marginal,
             PosteriorField bayes_posterior, Logits logits);

  const FiniteDomain& domain() const { return domain_; }
  int n_inputs() const { return domain_.n_inputs; }
  int n_labels() const { return domain_.n_labels; }

  const ProbVector& marginal() const { return marginal_; }
  const PosteriorField& bayes_posterior() const { return bayes_posterior_; }
  const Logits& logits() const { return logits_; }
  const PosteriorField& model_posterior() const { return model_posterior_; }

  /// Joint mass P(x, y).
  double joint(int x, int y) const {
    return marginal_[static_cast<std::size_t>(x)] *
           bayes_posterior_[static_cast<std::size_t>(x)]
                           [static_cast<std::size_t>(y)];
  }

 private:
  FiniteDomain domain_;
  ProbVector marginal_;
  PosteriorField bayes_posterior_;
  Logits logits_;
  PosteriorField model_posterior_;
};

/// Binary reject mask over the inputs: 1 rejects, 0 accepts.
using RejectMask = std::vector<std::uint8_t>;

/// Per-input output of the combined model: a 0-based label when accepted,
/// std::nullopt as the rejection token.
struct CombinedOutput {
  std::vector<std::optional<int>> outputs;

  bool rejected(std::size_t x) const { return !outputs[x].has_value(); }
  int label(std::size_t x) const { return *outputs[x]; }
  std::size_t size() const { return outputs.size(); }
};

/// Softmax with max-subtraction. The result sums to 1 up to rounding and is
/// strictly positive whenever the logit spread stays below the exp underflow
/// threshold (~745 nats); entries further below the row maximum flush to
/// zero honestly. Non-finite input throws std::invalid_argument.
ProbVector softmax(std::span<const double> logits_row);

/// Index of the largest entry, ties broken to the lowest index. 0-based.
int predict(const ProbVector& posterior_row);

/// Applies a reject mask: accepted inputs get predict(softmax(logits(x))),
/// rejected inputs get the rejection token. Mask length must be |X|.
CombinedOutput combine(const FiniteTask& task, const RejectMask& mask);

}  // namespace rejection
