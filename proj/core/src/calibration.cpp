#include "ordinal_crc/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "ordinal_crc/losses.hpp"

namespace ordinal_crc {
namespace {

constexpr double kCollisionTolerance = 1e-12;

std::vector<SampleBreakpoints> breakpoints_for(const std::vector<LabeledScore>& rows, const LossSpec& loss) {
  validate_dataset(rows);
  std::vector<SampleBreakpoints> bps;
  bps.reserve(rows.size());
  for (const auto& row : rows) bps.push_back(sample_breakpoints(row, loss));
  return bps;
}

double condition_bound(size_t n, double alpha, const LossSpec& loss) {
  if (n == 0) throw ConfigError("calibration needs at least one row");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  return static_cast<double>(n + 1) * alpha - loss.bound();
}

CalibrationResult make_result(std::span<const SampleBreakpoints> bps, double lambda_hat, double alpha,
                              CalibrationMethod method, std::optional<double> delta, const LossSpec& loss) {
  CalibrationResult result;
  result.lambda_hat = lambda_hat;
  result.alpha = alpha;
  result.n = bps.size();
  result.method = method;
  result.delta = delta;
  result.loss = loss;
  result.empirical_sum = total_step_loss(bps, lambda_hat);
  return result;
}

}  // namespace

SampleBreakpoints sample_breakpoints(const LabeledScore& row, const LossSpec& loss) {
  const int k = row.scores.num_classes();
  const GreedyChain chain = loss.kind == LossSpec::Kind::weighted ? weighted_chain(row.scores, loss.weights)
                                                                  : divergence_chain(row.scores);
  const std::vector<double> thresholds = chain_lambda_thresholds(chain, loss.kind);

  // Chain step j is selected for lambda in [thresholds[j], thresholds[j-1]).
  // Walking from the full range toward the singleton (lambda increasing),
  // record a breakpoint wherever the loss changes; equal-threshold steps are
  // skipped because the smaller set wins at a shared threshold.
  SampleBreakpoints bp;
  double value = pointwise_loss(row.label, chain.steps.back(), loss, k);  // 0: full coverage
  for (int j = k - 1; j >= 0; --j) {
    if (j > 0 && thresholds[static_cast<size_t>(j)] == thresholds[static_cast<size_t>(j - 1)]) continue;
    const double loss_j = pointwise_loss(row.label, chain.steps[static_cast<size_t>(j)], loss, k);
    if (loss_j != value) {
      bp.thresholds.push_back(thresholds[static_cast<size_t>(j)]);
      bp.losses.push_back(loss_j);
      value = loss_j;
    }
  }
  return bp;
}

double step_loss_at(const SampleBreakpoints& bp, double lambda) {
  auto it = std::upper_bound(bp.thresholds.begin(), bp.thresholds.end(), lambda);
  if (it == bp.thresholds.begin()) return 0.0;
  return bp.losses[static_cast<size_t>(it - bp.thresholds.begin()) - 1];
}

double total_step_loss(std::span<const SampleBreakpoints> bps, double lambda) {
  double total = 0.0;
  for (const auto& bp : bps) total += step_loss_at(bp, lambda);
  return total;
}

CalibrationResult calibrate_exact(std::span<const SampleBreakpoints> bps, double alpha, const LossSpec& loss) {
  const double bound = condition_bound(bps.size(), alpha, loss);
  if (bound < 0.0) {
    throw InfeasibleError("infeasible: alpha below B/(n+1)");
  }

  // Event sweep over pooled jumps. The cumulative sum tracks
  // total_step_loss(lambda) segment by segment; the largest feasible lambda
  // is either 1 or the predecessor of the first threshold whose jumps push
  // the sum past the bound.
  struct Event {
    double threshold;
    double jump;
  };
  std::vector<Event> events;
  for (const auto& bp : bps) {
    double prev = 0.0;
    for (size_t j = 0; j < bp.thresholds.size(); ++j) {
      events.push_back({bp.thresholds[j], bp.losses[j] - prev});
      prev = bp.losses[j];
    }
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.threshold < b.threshold; });

  double lambda_hat = 1.0;
  double cumulative = 0.0;
  for (size_t i = 0; i < events.size();) {
    const double threshold = events[i].threshold;
    for (; i < events.size() && events[i].threshold == threshold; ++i) cumulative += events[i].jump;
    if (cumulative > bound) {
      if (threshold <= 0.0) throw InfeasibleError("infeasible: no feasible threshold at this alpha");
      lambda_hat = std::nextafter(threshold, 0.0);
      break;
    }
  }

  // The sweep accumulates jumps in pooled order while the reported sum adds
  // per-row values in row order; re-check so the feasibility invariant holds
  // for the sum actually reported, stepping down a breakpoint if rounding
  // ever disagrees.
  while (total_step_loss(bps, lambda_hat) > bound) {
    double next = -1.0;
    for (const auto& bp : bps) {
      for (double t : bp.thresholds) {
        if (t <= lambda_hat && t > next) next = t;
      }
    }
    if (next < 0.0) throw InfeasibleError("infeasible: no feasible threshold at this alpha");
    lambda_hat = std::nextafter(next, 0.0);
    if (lambda_hat < 0.0) throw InfeasibleError("infeasible: no feasible threshold at this alpha");
  }

  return make_result(bps, lambda_hat, alpha, CalibrationMethod::exact, std::nullopt, loss);
}

CalibrationResult calibrate_exact(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss) {
  const auto bps = breakpoints_for(rows, loss);
  return calibrate_exact(std::span<const SampleBreakpoints>(bps), alpha, loss);
}

CalibrationResult calibrate_binary(std::span<const SampleBreakpoints> bps, double alpha, const LossSpec& loss,
                                   double delta) {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  const double bound = condition_bound(bps.size(), alpha, loss);
  if (bound < 0.0 || total_step_loss(bps, 0.0) > bound) {
    throw InfeasibleError("infeasible: alpha below B/(n+1)");
  }

  // Every bisection iterate is a dyadic rational, so the arithmetic below is
  // exact and the final feasible fallback lands on the last feasible iterate.
  double lambda = 0.5;
  double step = 0.5;  // |lambda_k - lambda_{k-1}|
  while (step > delta) {
    const double half = step / 2.0;
    lambda += total_step_loss(bps, lambda) > bound ? -half : half;
    step = half;
  }
  if (total_step_loss(bps, lambda) > bound) {
    lambda -= step;  // one delta-step down reaches the feasible bracket end
  }
  if (total_step_loss(bps, lambda) > bound) {
    throw InfeasibleError("infeasible: bisection found no feasible threshold");
  }
  return make_result(bps, lambda, alpha, CalibrationMethod::binary, delta, loss);
}

CalibrationResult calibrate_binary(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss,
                                   double delta) {
  const auto bps = breakpoints_for(rows, loss);
  return calibrate_binary(std::span<const SampleBreakpoints>(bps), alpha, loss, delta);
}

JumpDiagnostics jump_diagnostics(std::span<const SampleBreakpoints> bps) {
  if (bps.empty()) throw ConfigError("jump diagnostics need at least one row");
  struct Jump {
    double threshold;
    double size;
    size_t row;
  };
  std::vector<Jump> jumps;
  for (size_t r = 0; r < bps.size(); ++r) {
    double prev = 0.0;
    for (size_t j = 0; j < bps[r].thresholds.size(); ++j) {
      jumps.push_back({bps[r].thresholds[j], bps[r].losses[j] - prev, r});
      prev = bps[r].losses[j];
    }
  }
  std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.threshold < b.threshold; });

  JumpDiagnostics diag;
  diag.max_collision_m = 1;
  const double n = static_cast<double>(bps.size());
  for (size_t i = 0; i < jumps.size();) {
    // Cluster thresholds within the tolerance of the cluster anchor.
    const double anchor = jumps[i].threshold;
    double total = 0.0;
    std::vector<size_t> rows_here;
    for (; i < jumps.size() && jumps[i].threshold - anchor <= kCollisionTolerance; ++i) {
      total += jumps[i].size;
      rows_here.push_back(jumps[i].row);
    }
    std::sort(rows_here.begin(), rows_here.end());
    rows_here.erase(std::unique(rows_here.begin(), rows_here.end()), rows_here.end());
    diag.max_collision_m = std::max(diag.max_collision_m, rows_here.size());
    diag.max_empirical_jump = std::max(diag.max_empirical_jump, total / n);
  }
  return diag;
}

JumpDiagnostics jump_diagnostics(const std::vector<LabeledScore>& rows, const LossSpec& loss) {
  const auto bps = breakpoints_for(rows, loss);
  return jump_diagnostics(std::span<const SampleBreakpoints>(bps));
}

}  // namespace ordinal_crc
