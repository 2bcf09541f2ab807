#include "rejection/divergences.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rejection {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lengths(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("divergence: length mismatch");
  }
}

}  // namespace

Skew::Skew(double beta_in) : beta(beta_in) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::invalid_argument("Skew: beta must lie in (0, 1)");
  }
}

double kl(const ProbVector& p, const ProbVector& q) {
  check_lengths(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum < 0.0 ? 0.0 : sum;  // Gibbs bound; rounding may dip below 0
}

double bhattacharyya_coeff(Skew beta, const ProbVector& p,
                           const ProbVector& q) {
  check_lengths(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0 || q[i] == 0.0) continue;
    sum += std::pow(p[i], beta.beta) * std::pow(q[i], 1.0 - beta.beta);
  }
  return sum > 1.0 ? 1.0 : sum;  // Holder bound
}

double bhattacharyya_div(Skew beta, const ProbVector& p, const ProbVector& q) {
  const double coeff = bhattacharyya_coeff(beta, p, q);
  if (coeff == 0.0) return kInf;
  if (coeff >= 1.0) return 0.0;
  return -std::log(coeff);
}

double renyi(double alpha, const ProbVector& p, const ProbVector& q) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("renyi: alpha must lie in (0, 1)");
  }
  check_lengths(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0 || q[i] == 0.0) continue;
    sum += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  if (sum == 0.0) return kInf;
  if (sum > 1.0) sum = 1.0;
  const double value = std::log(sum) / (alpha - 1.0);
  return value == 0.0 ? 0.0 : value;  // avoid -0
}

}  // namespace rejection
