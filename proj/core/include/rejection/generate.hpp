#pragma once

// Synthetic task generation.
//
// Marginals and ground-truth posterior rows are Dirichlet draws (normalized
// Gamma variates from a std::mt19937_64 stream), and the model's logits are
// log of the ground truth plus Gaussian noise, so model_noise = 0 yields a
// perfect model. Identical specs produce bit-identical tasks within one
// build; the sampling recipe is documented so other implementations can
// match it distributionally.

#include <cstdint>

#include "rejection/task.hpp"

namespace rejection {

struct TaskGenSpec {
  int n_inputs = 16;
  int n_labels = 3;
  double marginal_concentration = 1.0;   // Dirichlet parameter for P_x
  double posterior_concentration = 1.0;  // Dirichlet parameter per pi*(x)
  double model_noise = 1.0;              // scale of logit perturbation
  std::uint64_t seed = 0;
};

FiniteTask generate_task(const TaskGenSpec& spec);

}  // namespace rejection
