#include "ordinal_crc/losses.hpp"


namespace ordinal_crc {
namespace {

void check_dims(int k, const PredictionSet& set) {
  if (set.upper >= k) throw DataError("prediction set exceeds class count");
}

}  // namespace

double weighted_loss(ClassIndex y, const PredictionSet& set, const WeightScheme& w) {
  const int k = w.num_classes();
  check_dims(k, set);
  if (y < 0 || y >= k) throw DataError("label out of range");
  return set.contains(y) ? 0.0 : w[y];
}

double divergence_loss(ClassIndex y, const PredictionSet& set, int num_classes) {
  if (num_classes < 2) throw ConfigError("divergence loss needs K >= 2");
  check_dims(num_classes, set);
  if (y < 0 || y >= num_classes) throw DataError("label out of range");
  if (set.contains(y)) return 0.0;
  const int dist = y < set.lower ? set.lower - y : y - set.upper;
  return static_cast<double>(dist) / static_cast<double>(num_classes - 1);
}

double pointwise_loss(ClassIndex y, const PredictionSet& set, const LossSpec& loss, int num_classes) {
  return loss.kind == LossSpec::Kind::weighted ? weighted_loss(y, set, loss.weights)
                                               : divergence_loss(y, set, num_classes);
}

double covered_weighted_mass(const ScoreVector& scores, const WeightScheme& w, const PredictionSet& set) {
  if (scores.num_classes() != w.num_classes()) throw DataError("scores/weights dimension mismatch");
  check_dims(scores.num_classes(), set);
  double mass = 0.0;
  for (ClassIndex i = set.lower; i <= set.upper; ++i) mass += w[i] * scores[i];
  return mass;
}

double total_weighted_mass(const ScoreVector& scores, const WeightScheme& w) {
  if (scores.num_classes() != w.num_classes()) throw DataError("scores/weights dimension mismatch");
  double mass = 0.0;
  for (ClassIndex i = 0; i < scores.num_classes(); ++i) mass += w[i] * scores[i];
  return mass;
}

double interval_risk_weighted(const ScoreVector& scores, const WeightScheme& w, const PredictionSet& set) {
  return total_weighted_mass(scores, w) - covered_weighted_mass(scores, w, set);
}

double interval_risk_divergence(const ScoreVector& scores, const PredictionSet& set) {
  const int k = scores.num_classes();
  if (k < 2) throw ConfigError("divergence risk needs K >= 2");
  check_dims(k, set);
  // Left and right tails are summed in ascending index order so that risks of
  // nested sets compare monotonically even in floating point.
  double left = 0.0;
  for (ClassIndex i = 0; i < set.lower; ++i) left += static_cast<double>(set.lower - i) * scores[i];
  double right = 0.0;
  for (ClassIndex i = set.upper + 1; i < k; ++i) right += static_cast<double>(i - set.upper) * scores[i];
  return (left + right) / static_cast<double>(k - 1);
}

}  // namespace ordinal_crc
