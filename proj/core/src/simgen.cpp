#include "ordinal_crc/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "ordinal_crc/rng.hpp"

namespace ordinal_crc::simgen {
namespace {

struct Cholesky2 {
  double l00, l10, l11;
};

void validate_spec(const GaussianClassSpec& spec) {
  const auto& c = spec.covariance;
  if (std::abs(c[0][1] - c[1][0]) > 1e-12) throw DataError("covariance must be symmetric");
  // Symmetric 2x2 is positive definite iff both leading minors are positive.
  if (!(c[0][0] > 0.0 && c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0.0)) {
    throw DataError("covariance must be positive definite");
  }
}

Cholesky2 cholesky(const GaussianClassSpec& spec) {
  const auto& c = spec.covariance;
  const double l00 = std::sqrt(c[0][0]);
  const double l10 = c[1][0] / l00;
  const double l11 = std::sqrt(c[1][1] - l10 * l10);
  return {l00, l10, l11};
}

double log_density(const Point2& x, const GaussianClassSpec& spec) {
  const auto& c = spec.covariance;
  const double det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
  const double dx = x[0] - spec.mean[0];
  const double dy = x[1] - spec.mean[1];
  const double quad = (c[1][1] * dx * dx - 2.0 * c[0][1] * dx * dy + c[0][0] * dy * dy) / det;
  return -std::log(2.0 * 3.14159265358979323846) - 0.5 * std::log(det) - 0.5 * quad;
}

}  // namespace

std::vector<GaussianClassSpec> make_default_specs(int num_classes, uint64_t seed) {
  if (num_classes < 2) throw ConfigError("simulated data needs at least 2 classes");
  std::vector<GaussianClassSpec> specs(static_cast<size_t>(num_classes));
  for (int i = 0; i < num_classes; ++i) {
    Rng rng(seed, static_cast<uint64_t>(i));
    double a[2][2];
    for (auto& row : a) {
      for (double& entry : row) entry = rng.normal();
    }
    auto& spec = specs[static_cast<size_t>(i)];
    spec.mean = {static_cast<double>(i), static_cast<double>(i)};
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        spec.covariance[static_cast<size_t>(r)][static_cast<size_t>(c)] =
            a[r][0] * a[c][0] + a[r][1] * a[c][1] + (r == c ? 0.25 : 0.0);
      }
    }
    validate_spec(spec);
  }
  return specs;
}

std::vector<SamplePoint> sample_dataset(const std::vector<GaussianClassSpec>& specs, int n_per_class,
                                        uint64_t seed) {
  if (n_per_class < 1) throw ConfigError("n_per_class must be at least 1");
  for (const auto& spec : specs) validate_spec(spec);
  std::vector<SamplePoint> rows;
  rows.reserve(specs.size() * static_cast<size_t>(n_per_class));
  for (size_t cls = 0; cls < specs.size(); ++cls) {
    // Stream ids offset by 1000 so spec generation and sampling never share
    // a stream for the same seed.
    Rng rng(seed, 1000 + cls);
    const Cholesky2 chol = cholesky(specs[cls]);
    for (int i = 0; i < n_per_class; ++i) {
      const double z0 = rng.normal();
      const double z1 = rng.normal();
      rows.push_back({{specs[cls].mean[0] + chol.l00 * z0, specs[cls].mean[1] + chol.l10 * z0 + chol.l11 * z1},
                      static_cast<ClassIndex>(cls)});
    }
  }
  return rows;
}

ScoreVector bayes_posterior(const Point2& point, const std::vector<GaussianClassSpec>& specs) {
  return scaled_posterior(point, specs, 1.0);
}

ScoreVector scaled_posterior(const Point2& point, const std::vector<GaussianClassSpec>& specs,
                             double temperature) {
  if (specs.empty()) throw ConfigError("posterior needs at least one class spec");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  std::vector<double> logits(specs.size());
  for (size_t i = 0; i < specs.size(); ++i) {
    validate_spec(specs[i]);
    logits[i] = log_density(point, specs[i]) / temperature;
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) sum += (l = std::exp(l - max_logit));
  for (double& l : logits) l /= sum;
  return ScoreVector{std::move(logits)};
}

std::vector<LabeledScore> simulate_scores(const std::vector<GaussianClassSpec>& specs, int n_per_class,
                                          uint64_t seed, double temperature) {
  const auto points = sample_dataset(specs, n_per_class, seed);
  std::vector<LabeledScore> rows;
  rows.reserve(points.size());
  for (const auto& sample : points) {
    rows.push_back({scaled_posterior(sample.point, specs, temperature), sample.label});
  }
  return rows;
}

}  // namespace ordinal_crc::simgen
