#include "ordinal_crc/types.hpp"

#include <algorithm>
#include <cmath>

namespace ordinal_crc {

ScoreVector ScoreVector::normalized(std::vector<double> probs) {
  if (probs.empty()) throw DataError("invalid score: empty vector");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw DataError("invalid score: entries must be finite and nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-4) {
    throw DataError("invalid score: entries sum to " + std::to_string(sum) + ", expected 1 within 1e-4");
  }
  for (double& p : probs) p /= sum;
  return ScoreVector{std::move(probs)};
}

WeightScheme WeightScheme::from_weights(std::vector<double> raw) {
  if (raw.empty()) throw DataError("invalid weights: empty");
  double max = 0.0;
  for (double w : raw) {
    if (!std::isfinite(w) || w < 0.0) throw DataError("invalid weights: entries must be finite and nonnegative");
    max = std::max(max, w);
  }
  if (max <= 0.0) throw DataError("invalid weights: at least one entry must be positive");
  for (double& w : raw) w /= max;
  return WeightScheme{std::move(raw)};
}

WeightScheme WeightScheme::equal(int num_classes) {
  if (num_classes < 1) throw ConfigError("weights need at least one class");
  return WeightScheme{std::vector<double>(static_cast<size_t>(num_classes), 1.0)};
}

WeightScheme WeightScheme::linear(int num_classes) {
  if (num_classes < 2) throw ConfigError("linear weights need at least two classes");
  std::vector<double> raw(static_cast<size_t>(num_classes));
  for (int i = 0; i < num_classes; ++i) raw[static_cast<size_t>(i)] = static_cast<double>(i);
  return from_weights(std::move(raw));
}

int validate_dataset(const std::vector<LabeledScore>& rows) {
  if (rows.empty()) throw DataError("empty dataset");
  const int k = rows.front().scores.num_classes();
  for (const auto& row : rows) {
    if (row.scores.num_classes() != k) throw DataError("inconsistent class count across rows");
    // Re-validate in case the row was assembled by hand rather than through
    // ScoreVector::normalized.
    double sum = 0.0;
    for (double p : row.scores.probs) {
      if (!std::isfinite(p) || p < 0.0) throw DataError("invalid score: entries must be finite and nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-4) throw DataError("invalid score: entries must sum to 1 within 1e-4");
    if (row.label < 0 || row.label >= k) {
      throw DataError("label " + std::to_string(row.label) + " out of range [0, " + std::to_string(k - 1) + "]");
    }
  }
  return k;
}

}  // namespace ordinal_crc
