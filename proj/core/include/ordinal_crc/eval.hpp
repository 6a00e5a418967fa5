#pragma once
//
// Experiment harness: repeated random calibration/test splits, risk and
// set-size statistics, alpha sweeps with shared per-trial seeds, and
// alpha-for-target-size matching.
//
// Trials are independent; per-trial seeds derive from the master seed and the
// trial index, and per-trial results are reduced in trial order, so reports
// are identical for any worker count.

#include <cstdint>
#include <optional>
#include <vector>

#include "ordinal_crc/types.hpp"

namespace ordinal_crc::eval {

/// Aggregated statistics of a batch of calibration/test trials.
struct RiskReport {
  double alpha = 0.0;
  int trials = 0;
  size_t n_calibration = 0;
  size_t n_test = 0;
  double mean_risk = 0.0;
  std::vector<double> risk_per_trial;
  std::vector<double> lambda_hat_per_trial;
  double mean_set_size = 0.0;
  /// size_histogram[w] counts test predictions of width w; index 0 unused.
  std::vector<size_t> size_histogram;
  /// centroid_histogram[b] counts test predictions with centroid b/2
  /// (half-integer buckets, b = lower + upper).
  std::vector<size_t> centroid_histogram;
};

/// Per trial: seeded shuffle, split into calibration and test halves,
/// calibrate_exact on the calibration half, then mean loss and set statistics
/// on the test half.
RiskReport run_trials(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss, int trials,
                      double split, uint64_t seed, int threads = 1);

/// One report per alpha, with trial seeds shared across alphas so set-size
/// monotonicity in alpha holds exactly rather than statistically.
std::vector<RiskReport> sweep_alpha(const std::vector<LabeledScore>& rows, const std::vector<double>& alphas,
                                    const LossSpec& loss, int trials, double split, uint64_t seed,
                                    int threads = 1);

/// Index of the first sweep entry whose mean risk moved by less than 1e-4
/// relative to its predecessor: the saturation regime, where sets have shrunk
/// to singletons and extra risk budget changes nothing.
std::optional<size_t> first_saturation_index(const std::vector<RiskReport>& sweep);

/// Bisection on alpha until the mean set size is within tol of target_size.
/// Mean size is monotone in alpha under shared trial seeds.
double alpha_for_target_size(const std::vector<LabeledScore>& rows, const LossSpec& loss, double target_size,
                             int trials, uint64_t seed, double tol, double split = 0.5, int threads = 1);

/// Histogram of set centroids over the rows at a fixed lambda, bucketed at
/// half-integer resolution (index = lower + upper).
std::vector<size_t> centroid_distribution(const std::vector<LabeledScore>& rows, const LossSpec& loss,
                                          double lambda);

}  // namespace ordinal_crc::eval
