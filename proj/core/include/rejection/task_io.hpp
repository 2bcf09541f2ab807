#pragma once

// File formats.
//
// Tasks are JSON objects with fields {n_inputs, n_labels, marginal,
// bayes_posterior, logits}; doubles are printed in shortest round-trip
// form, so write -> read -> write is byte-identical. Rejector applications
// serialize as JSON records {kind, lambda, tau, kappa, Z, mask}.

#include <string>
#include <vector>

#include "rejection/task.hpp"

namespace rejection {

std::string task_to_string(const FiniteTask& task);
FiniteTask task_from_string(const std::string& text);

void write_task_file(const std::string& path, const FiniteTask& task);
FiniteTask read_task_file(const std::string& path);

/// One thresholded rejector application: which rejector, both threshold
/// scales, the partition constant, and the resulting mask.
struct RejectionRecord {
  std::string kind;  // "marginal" | "joint" | "chow" | "kl" | "bhatta"
  double lambda;
  double tau;
  double kappa;
  double normalizer;  // Z or Z_j
  RejectMask mask;
};

std::string rejection_records_to_string(
    const std::vector<RejectionRecord>& records);
std::vector<RejectionRecord> rejection_records_from_string(
    const std::string& text);

void write_rejection_records(const std::string& path,
                             const std::vector<RejectionRecord>& records);
std::vector<RejectionRecord> read_rejection_records(const std::string& path);

}  // namespace rejection
