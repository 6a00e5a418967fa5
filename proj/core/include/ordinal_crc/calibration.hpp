#pragma once
//
// Threshold calibration: choose lambda_hat so that the calibration-set
// condition  sum_i L_i(lambda_hat) <= (n+1) * alpha - B  holds, with B = 1.
//
// Under the set-construction convention used here, sets shrink as lambda
// grows, so each sample's loss L_i(lambda) is a non-decreasing step function
// of lambda and lambda_hat is the largest feasible threshold. The step
// functions change value only at a sample's chain transition values, which
// makes an exact breakpoint-based search possible alongside plain bisection.

#include <span>
#include <vector>

#include "ordinal_crc/sets.hpp"
#include "ordinal_crc/types.hpp"

namespace ordinal_crc {

/// Canonical per-sample loss step function: loss(lambda) equals losses[j] for
/// the largest thresholds[j] <= lambda, and 0 below thresholds[0] (the
/// full-coverage end). Thresholds and losses are strictly increasing.
struct SampleBreakpoints {
  std::vector<double> thresholds;
  std::vector<double> losses;
};

/// Pooled-jump diagnostics: M bounds how many samples jump at a common
/// threshold, and the largest empirical-risk jump obeys
/// max_empirical_jump <= (M + 1) * B / n.
struct JumpDiagnostics {
  size_t max_collision_m = 0;
  double max_empirical_jump = 0.0;
};

/// Discretizes L_i(lambda) for one sample from its greedy chain.
SampleBreakpoints sample_breakpoints(const LabeledScore& row, const LossSpec& loss);

/// Step-function evaluation with at-or-above-threshold semantics.
double step_loss_at(const SampleBreakpoints& bp, double lambda);

/// Sum of step_loss_at over rows, accumulated in row order (deterministic).
double total_step_loss(std::span<const SampleBreakpoints> bps, double lambda);

/// Largest machine-representable feasible lambda, found by sweeping the
/// pooled breakpoints. Throws InfeasibleError when even lambda = 0 violates
/// the condition (alpha too small for n).
CalibrationResult calibrate_exact(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss);
CalibrationResult calibrate_exact(std::span<const SampleBreakpoints> bps, double alpha, const LossSpec& loss);

/// Bisection on [0, 1] starting from 0.5, halving until the step size is
/// <= delta, then stepping down once if the final iterate is infeasible.
/// Agrees with calibrate_exact within delta.
CalibrationResult calibrate_binary(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss,
                                   double delta);
CalibrationResult calibrate_binary(std::span<const SampleBreakpoints> bps, double alpha, const LossSpec& loss,
                                   double delta);

/// Pools all sample breakpoints (matching thresholds within 1e-12) and
/// reports the worst collision count and empirical-risk jump.
JumpDiagnostics jump_diagnostics(const std::vector<LabeledScore>& rows, const LossSpec& loss);
JumpDiagnostics jump_diagnostics(std::span<const SampleBreakpoints> bps);

}  // namespace ordinal_crc
