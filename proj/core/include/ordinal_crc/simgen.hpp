#pragma once
//
// Synthetic ordinal data: K Gaussian classes on a 2-D plane, class i centered
// at (i, i), with exact Bayes posteriors standing in for classifier scores.
// Class priors are equal. Sampling uses independent per-class seeded streams,
// so generation is deterministic (and parallelizable) per seed.

#include <array>
#include <cstdint>
#include <vector>

#include "ordinal_crc/types.hpp"

namespace ordinal_crc::simgen {

using Point2 = std::array<double, 2>;

/// One class-conditional density: mean and a symmetric positive-definite
/// 2x2 covariance.
struct GaussianClassSpec {
  Point2 mean{0.0, 0.0};
  std::array<std::array<double, 2>, 2> covariance{{{1.0, 0.0}, {0.0, 1.0}}};
};

struct SamplePoint {
  Point2 point;
  ClassIndex label = 0;
};

/// Class i centered at (i, i); covariance A*A^T + 0.25*I with A a seeded
/// matrix of standard normal entries (the ridge keeps random draws away from
/// singularity).
std::vector<GaussianClassSpec> make_default_specs(int num_classes, uint64_t seed);

/// n_per_class draws per class from its Gaussian.
std::vector<SamplePoint> sample_dataset(const std::vector<GaussianClassSpec>& specs, int n_per_class,
                                        uint64_t seed);

/// Posterior over classes at a point, proportional to the class densities
/// (equal priors). Computed via log densities with max subtraction so the
/// result never underflows to an all-zero vector.
ScoreVector bayes_posterior(const Point2& point, const std::vector<GaussianClassSpec>& specs);

/// Temperature-scaled posterior, softmax(log density / temperature):
/// temperature 1 is exact, larger values emulate a miscalibrated model.
ScoreVector scaled_posterior(const Point2& point, const std::vector<GaussianClassSpec>& specs,
                             double temperature);

/// Full pipeline: sample a dataset and score every point with its (possibly
/// temperature-scaled) posterior.
std::vector<LabeledScore> simulate_scores(const std::vector<GaussianClassSpec>& specs, int n_per_class,
                                          uint64_t seed, double temperature = 1.0);

}  // namespace ordinal_crc::simgen
