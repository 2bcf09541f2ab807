#include "rejection/generate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rejection {

namespace {

std::vector<double> dirichlet(std::mt19937_64& rng, int dim,
                              double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> draws(static_cast<std::size_t>(dim));
  double sum = 0.0;
  for (double& d : draws) {
    do {
      d = gamma(rng);
    } while (!(d > 0.0));  // discard underflowed draws; marginals must stay positive
    sum += d;
  }
  for (double& d : draws) d /= sum;
  return draws;
}

}  // namespace

FiniteTask generate_task(const TaskGenSpec& spec) {
  if (spec.n_inputs < 1 || spec.n_labels < 2) {
    throw std::invalid_argument("TaskGenSpec: need n_inputs >= 1, n_labels >= 2");
  }
  if (!(spec.marginal_concentration > 0.0) ||
      !(spec.posterior_concentration > 0.0)) {
    throw std::invalid_argument("TaskGenSpec: concentrations must be positive");
  }
  if (spec.model_noise < 0.0) {
    throw std::invalid_argument("TaskGenSpec: model_noise must be >= 0");
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  FiniteDomain domain(spec.n_inputs, spec.n_labels);
  ProbVector marginal(dirichlet(rng, spec.n_inputs, spec.marginal_concentration));

  std::vector<ProbVector> truth_rows;
  truth_rows.reserve(static_cast<std::size_t>(spec.n_inputs));
  std::vector<double> logits(static_cast<std::size_t>(spec.n_inputs) *
                             static_cast<std::size_t>(spec.n_labels));
  for (int x = 0; x < spec.n_inputs; ++x) {
    std::vector<double> row =
        dirichlet(rng, spec.n_labels, spec.posterior_concentration);
    for (int y = 0; y < spec.n_labels; ++y) {
      double value = std::log(row[static_cast<std::size_t>(y)]);
      if (spec.model_noise > 0.0) {
        value += spec.model_noise * normal(rng);
      }
      logits[static_cast<std::size_t>(x * spec.n_labels + y)] = value;
    }
    truth_rows.emplace_back(std::move(row));
  }

  return FiniteTask(domain, std::move(marginal),
                    PosteriorField(std::move(truth_rows)),
                    Logits(std::move(logits), spec.n_inputs, spec.n_labels));
}

}  // namespace rejection
