#pragma once

// Threshold sweeps, risk-coverage curves, and rejector agreement reports.
//
// Everything here evaluates exact expectations under the task's marginal
// (no sampled labels), so outputs are deterministic given the inputs, and
// CSV emission is byte-stable across runs of the same build.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rejection/rejectors.hpp"
#include "rejection/task.hpp"

namespace rejection {

/// FNV-1a over the mask bits; identifies a mask in CSV output.
std::uint64_t mask_hash(const RejectMask& mask);

/// FNV-1a over the serialized task; identifies the task in CSV metadata.
std::uint64_t task_fingerprint(const FiniteTask& task);

struct SweepRow {
  double tau;
  double kappa;            // divergence-scale equivalent of tau
  double rejection_rate;   // P[reject]
  double selective_risk;   // sum_x P_x (1 - mask) * conditional_risk
  int n_rejected;
  std::uint64_t mask_hash;
};

struct SweepResult {
  LossKind kind;
  double lambda;
  RatioKind rejector;
  std::uint64_t task_fingerprint;
  std::vector<SweepRow> rows;  // sorted by tau
};

/// Thresholds the chosen density-ratio rejector over an ascending tau grid.
SweepResult sweep(const FiniteTask& task, LossKind kind, Temperature lambda,
                  RatioKind rejector_kind, std::span<const double> tau_grid);

struct AgreementRow {
  double tau;           // joint rejector threshold
  double tau_marginal;  // matched marginal threshold (Z_j / Z) * tau
  int both;
  int only_marginal;
  int only_joint;  // containment violation when nonzero
  int neither;
};

struct AgreementReport {
  LossKind kind;
  double lambda;
  std::uint64_t task_fingerprint;
  std::vector<AgreementRow> rows;
  int containment_violations;  // sum of only_joint across rows
  /// Divergence-scale containment (KL rejector at lambda*kappa vs
  /// Bhattacharyya rejector at kappa); only run for lambda > 1.
  bool divergence_section;
  int divergence_violations;
  int divergence_grid_size;
};

/// Joint mask at tau against marginal mask at (Z_j / Z) * tau across the
/// grid, counting agreement cells; the joint region must be contained in
/// the marginal one. For lambda > 1 a second containment check runs on the
/// divergence scale.
AgreementReport compare_rejectors(const FiniteTask& task, LossKind kind,
                                  Temperature lambda,
                                  std::span<const double> tau_grid);

enum class RejectorFamily { chow, marginal, joint, bhatta, kl };

RejectorFamily rejector_family_from_flag(std::string_view flag);
std::string_view rejector_family_flag(RejectorFamily family);

struct CurveRow {
  double threshold;  // c (chow), tau (marginal/joint), kappa (kl/bhatta)
  double coverage;   // 1 - P[reject]
  double selective_risk;
  int n_rejected;
  std::uint64_t mask_hash;
};

struct CurveResult {
  RejectorFamily family;
  LossKind kind;
  double lambda;  // NaN for chow
  std::uint64_t task_fingerprint;
  std::vector<CurveRow> rows;
};

/// Risk-coverage curve over the family's natural auto grid (all achievable
/// masks). lambda is required for every family except chow, and must
/// exceed 1 for bhatta.
CurveResult risk_coverage_curve(const FiniteTask& task, LossKind kind,
                                std::optional<Temperature> lambda,
                                RejectorFamily family);

std::string sweep_to_csv(const SweepResult& result);
std::string agreement_to_csv(const AgreementReport& report);
std::string curve_to_csv(const CurveResult& result);

}  // namespace rejection
