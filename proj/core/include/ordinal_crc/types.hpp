#pragma once
//
// Core value types shared by every module: score vectors over K ordered
// classes, contiguous prediction sets [l, u], class weight schemes, and the
// loss/calibration descriptors built from them.
//
// All types are immutable values after construction and safe to share across
// threads.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordinal_crc {

/// Index of an ordinal class; valid values are 0..K-1 for the ambient K.
using ClassIndex = int;

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid parameter values (alpha out of range, bad lambda, ...).
class ConfigError : public Error {
  using Error::Error;
};

/// Data that violates a type invariant (negative score, label out of range).
class DataError : public Error {
  using Error::Error;
};

/// No threshold can satisfy the calibration condition at the requested alpha.
class InfeasibleError : public Error {
  using Error::Error;
};

/// File-level problems: unreadable paths, malformed CSV/JSON.
class IoError : public Error {
  using Error::Error;
};

/// Per-example class-probability vector over K ordered classes.
///
/// Entries must be nonnegative and finite. Vectors whose sum deviates from 1
/// by at most 1e-4 are silently renormalized (softmax exports lose precision
/// in CSV round-trips); larger deviations are rejected.
struct ScoreVector {
  std::vector<double> probs;

  static ScoreVector normalized(std::vector<double> probs);

  int num_classes() const { return static_cast<int>(probs.size()); }
  double operator[](ClassIndex i) const { return probs[static_cast<size_t>(i)]; }
};

/// Contiguous class interval {lower, ..., upper}.
struct PredictionSet {
  ClassIndex lower = 0;
  ClassIndex upper = 0;

  PredictionSet() = default;
  PredictionSet(ClassIndex l, ClassIndex u) : lower(l), upper(u) {
    if (l < 0 || l > u) throw DataError("invalid prediction set [" + std::to_string(l) + ", " + std::to_string(u) + "]");
  }

  int width() const { return upper - lower + 1; }
  bool contains(ClassIndex y) const { return lower <= y && y <= upper; }
  /// Midpoint (l+u)/2, on a half-integer grid.
  double centroid() const { return 0.5 * (lower + upper); }
  bool contains_set(const PredictionSet& inner) const {
    return lower <= inner.lower && inner.upper <= upper;
  }

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

/// Per-class weights h(i), max-normalized so that max h(i) == 1.
struct WeightScheme {
  std::vector<double> weights;

  static WeightScheme from_weights(std::vector<double> raw);
  /// h(i) = 1 for every class (plain miscoverage).
  static WeightScheme equal(int num_classes);
  /// h(i) = i before normalization; note h(0) = 0.
  static WeightScheme linear(int num_classes);

  int num_classes() const { return static_cast<int>(weights.size()); }
  double operator[](ClassIndex i) const { return weights[static_cast<size_t>(i)]; }
};

/// Tagged choice of loss family. Both families are normalized to [0, 1], so
/// the almost-sure loss bound B is 1 in either case.
struct LossSpec {
  enum class Kind { weighted, divergence };

  Kind kind = Kind::weighted;
  WeightScheme weights;  // meaningful only when kind == weighted

  static LossSpec weighted(WeightScheme w) { return {Kind::weighted, std::move(w)}; }
  static LossSpec divergence() { return {Kind::divergence, {}}; }

  double bound() const { return 1.0; }  // B
};

/// A labeled example represented by its score vector.
struct LabeledScore {
  ScoreVector scores;
  ClassIndex label = 0;
};

enum class CalibrationMethod { exact, binary };

/// Calibrated threshold together with the inputs and diagnostics that
/// produced it. Satisfies empirical_sum <= (n+1)*alpha - B by construction.
struct CalibrationResult {
  double lambda_hat = 0.0;
  double alpha = 0.0;
  size_t n = 0;
  CalibrationMethod method = CalibrationMethod::exact;
  std::optional<double> delta;  // binary-search precision, when method == binary
  LossSpec loss;
  double empirical_sum = 0.0;  // sum of L_i(lambda_hat) over the calibration rows
};

/// Checks a dataset for a consistent class count K, valid score vectors and
/// in-range labels; returns K.
int validate_dataset(const std::vector<LabeledScore>& rows);

}  // namespace ordinal_crc
