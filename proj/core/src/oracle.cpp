#include "rejection/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rejection {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinLambda = 1e-6;
constexpr int kMaxBacktracks = 60;

// One simplex program: minimize <q, cost> + lambda * KL(q || base) over the
// simplex spanned by the support of base. Entries of base must be positive.
struct SimplexProgram {
  std::vector<double> cost;
  std::vector<double> base;
  double lambda;
};

double program_objective(const SimplexProgram& prog,
                         std::span<const double> q) {
  if (q.size() != prog.base.size()) {
    throw std::invalid_argument("oracle objective: dimension mismatch");
  }
  double value = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;  // 0 log 0 = 0 and no linear contribution
    value += q[i] * prog.cost[i] +
             prog.lambda * q[i] * std::log(q[i] / prog.base[i]);
  }
  return value;
}

// Spread of the Lagrangian gradient over the support: zero at the optimum,
// and a bound on the componentwise log-accuracy of q (|log q - log q*| <=
// residual / lambda). Unlike the objective decrease, this certificate does
// not lose the small-mass coordinates in summation noise.
double dual_residual(const SimplexProgram& prog,
                     const std::vector<double>& q) {
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;  // boundary coordinate, optimal there
    const double g =
        prog.cost[i] + prog.lambda * (std::log(q[i] / prog.base[i]) + 1.0);
    if (!std::isfinite(g)) continue;
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return hi > lo ? hi - lo : 0.0;
}

OracleSolution run_mirror_descent(const SimplexProgram& prog,
                                  const OracleConfig& cfg) {
  if (cfg.max_iters < 1 || !(cfg.step_size > 0.0) || !(cfg.tolerance > 0.0)) {
    throw std::invalid_argument("OracleConfig: invalid settings");
  }
  const std::size_t n = prog.base.size();
  std::vector<double> q = prog.base;  // feasible, strictly positive
  double objective = program_objective(prog, q);
  const double initial_step = cfg.step_size / prog.lambda;
  const double residual_target = prog.lambda * 1e-10;
  double step = initial_step;
  double drift = 0.0;
  bool converged = false;
  int iters = 0;

  std::vector<double> gradient(n);
  std::vector<double> proposal(n);
  while (iters < cfg.max_iters) {
    ++iters;
    for (std::size_t i = 0; i < n; ++i) {
      // A zeroed coordinate (infinite cost, or underflow) is a fixed point
      // of the multiplicative update; leave it at zero instead of feeding
      // log(0) back into the gradient.
      gradient[i] = q[i] == 0.0
                        ? 0.0
                        : prog.cost[i] +
                              prog.lambda *
                                  (std::log(q[i] / prog.base[i]) + 1.0);
    }

    // Multiplicative step with a shared shift, then renormalize onto the
    // simplex; halve the step until the objective stops increasing. The
    // acceptance slack admits summation-noise-sized increases (the KL term
    // carries noise of order lambda * eps), else the objective ratchet jams
    // at the bottom of its noise band while the iterate is still
    // approaching the optimum.
    const double accept_slack =
        1e-14 * (1.0 + std::abs(objective) + prog.lambda);
    double new_objective = 0.0;
    int backtracks = 0;
    for (;; ++backtracks) {
      if (backtracks > kMaxBacktracks) break;
      double shift = -kInf;
      for (std::size_t i = 0; i < n; ++i) {
        proposal[i] =
            q[i] == 0.0 ? -kInf : std::log(q[i]) - step * gradient[i];
        shift = std::max(shift, proposal[i]);
      }
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        proposal[i] = std::exp(proposal[i] - shift);
        total += proposal[i];
      }
      for (std::size_t i = 0; i < n; ++i) proposal[i] /= total;
      new_objective = program_objective(prog, proposal);
      if (new_objective <= objective + accept_slack) break;
      step *= 0.5;
    }
    if (backtracks > kMaxBacktracks) {
      // No step length decreases the objective any further; report
      // convergence only if stationarity actually holds.
      converged = dual_residual(prog, q) <= residual_target;
      break;
    }

    q.swap(proposal);
    step = std::min(step * 2.0, initial_step);  // recover halved steps
    double on_simplex = 0.0;
    for (double v : q) on_simplex += v;
    drift = std::max(drift, std::abs(on_simplex - 1.0));

    const double decrease = objective - new_objective;
    objective = new_objective;
    if (decrease < cfg.tolerance &&
        dual_residual(prog, q) <= residual_target) {
      converged = true;
      break;
    }
  }

  return {std::move(q), objective, converged, iters, drift};
}

void check_lambda(Temperature lambda) {
  if (lambda.lambda <= kMinLambda) {
    throw std::invalid_argument(
        "oracle: lambda <= 1e-6 is refused (ill-conditioned exponentials)");
  }
}

}  // namespace

double marginal_objective(LossKind kind, const FiniteTask& task,
                          Temperature lambda, std::span<const double> q) {
  SimplexProgram prog;
  prog.lambda = lambda.lambda;
  prog.base = task.marginal().values();
  prog.cost.resize(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    prog.cost[static_cast<std::size_t>(x)] = conditional_risk(kind, task, x);
  }
  return program_objective(prog, q);
}

double joint_objective(LossKind kind, const FiniteTask& task,
                       Temperature lambda, std::span<const double> q) {
  const int n = task.n_inputs();
  const int l = task.n_labels();
  if (q.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(l)) {
    throw std::invalid_argument("joint_objective: dimension mismatch");
  }
  double value = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < l; ++y) {
      const auto i = static_cast<std::size_t>(x * l + y);
      if (q[i] == 0.0) continue;
      const double mass = task.joint(x, y);
      if (mass == 0.0) {
        return kInf;  // q puts mass outside the support of P
      }
      value += q[i] * loss(kind, task, x, y) +
               lambda.lambda * q[i] * std::log(q[i] / mass);
    }
  }
  return value;
}

OracleSolution solve_marginal_ideal(LossKind kind, const FiniteTask& task,
                                    Temperature lambda,
                                    const OracleConfig& cfg) {
  check_lambda(lambda);
  if (task.n_inputs() > 64) {
    throw std::invalid_argument("solve_marginal_ideal: |X| > 64 refused");
  }
  SimplexProgram prog;
  prog.lambda = lambda.lambda;
  prog.base = task.marginal().values();
  prog.cost.resize(static_cast<std::size_t>(task.n_inputs()));
  for (int x = 0; x < task.n_inputs(); ++x) {
    prog.cost[static_cast<std::size_t>(x)] = conditional_risk(kind, task, x);
  }
  return run_mirror_descent(prog, cfg);
}

OracleSolution solve_joint_ideal(LossKind kind, const FiniteTask& task,
                                 Temperature lambda, const OracleConfig& cfg) {
  check_lambda(lambda);
  const int n = task.n_inputs();
  const int l = task.n_labels();
  if (n * l > 256) {
    throw std::invalid_argument("solve_joint_ideal: |X| * L > 256 refused");
  }

  // Solve on the support of P; off-support cells must carry zero mass for
  // the KL term to stay finite.
  std::vector<std::size_t> support;
  SimplexProgram prog;
  prog.lambda = lambda.lambda;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < l; ++y) {
      const double mass = task.joint(x, y);
      if (mass == 0.0) continue;
      support.push_back(static_cast<std::size_t>(x * l + y));
      prog.base.push_back(mass);
      prog.cost.push_back(loss(kind, task, x, y));
    }
  }
  OracleSolution on_support = run_mirror_descent(prog, cfg);

  std::vector<double> full(static_cast<std::size_t>(n) *
                               static_cast<std::size_t>(l),
                           0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    full[support[i]] = on_support.distribution[i];
  }
  on_support.distribution = std::move(full);
  return on_support;
}

std::pair<RejectMask, double> exhaustive_rejector_search(LossKind kind,
                                                         const FiniteTask& task,
                                                         RejectionCost c) {
  const int n = task.n_inputs();
  if (n > 20) {
    throw std::invalid_argument(
        "exhaustive_rejector_search: |X| > 20 refused (2^|X| masks)");
  }
  std::vector<double> risk(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    risk[static_cast<std::size_t>(x)] = conditional_risk(kind, task, x);
  }

  RejectMask best_mask(static_cast<std::size_t>(n), 0);
  double best_value = kInf;
  const std::uint32_t masks = 1u << n;
  RejectMask candidate(static_cast<std::size_t>(n));
  for (std::uint32_t bits = 0; bits < masks; ++bits) {
    double value = 0.0;
    for (int x = 0; x < n; ++x) {
      const bool rejected = (bits >> x) & 1u;
      candidate[static_cast<std::size_t>(x)] = rejected ? 1 : 0;
      value += task.marginal()[static_cast<std::size_t>(x)] *
               (rejected ? c.c : risk[static_cast<std::size_t>(x)]);
    }
    if (value < best_value) {
      best_value = value;
      best_mask = candidate;
    }
  }
  return {best_mask, best_value};
}

std::optional<double> chow_equivalence_scan(LossKind kind,
                                            const FiniteTask& task,
                                            Temperature lambda,
                                            RejectionCost c) {
  const RejectMask target = chow_rule(kind, task, c);
  const DensityRatioRejector rejector = marginal_ratio(kind, task, lambda);

  std::vector<double> candidates;
  candidates.push_back(0.0);
  std::vector<double> sorted = rejector.scores;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  candidates.insert(candidates.end(), sorted.begin(), sorted.end());
  candidates.push_back(sorted.back() + 1.0);

  for (double tau : candidates) {
    if (threshold_reject(rejector, Threshold::ratio(tau)) == target) {
      return tau;
    }
  }
  return std::nullopt;
}

}  // namespace rejection
