#pragma once
//
// Set-valued losses for ordinal prediction sets, and the interval risk of a
// set under a score vector.
//
// Weighted family:    L(y, [l,u]) = h(y) * 1(y not in [l,u])
// Divergence family:  L(y, [l,u]) = min_{k in [l,u]} |y - k| / (K - 1)
//
// Both losses are in [0, 1] and shrink (weakly) as the set grows.

#include "ordinal_crc/types.hpp"

namespace ordinal_crc {

/// h(y) if y lies outside the set, else 0.
double weighted_loss(ClassIndex y, const PredictionSet& set, const WeightScheme& w);

/// Distance from y to the interval, normalized by K-1; 0 when covered.
double divergence_loss(ClassIndex y, const PredictionSet& set, int num_classes);

/// Dispatch on the loss family.
double pointwise_loss(ClassIndex y, const PredictionSet& set, const LossSpec& loss, int num_classes);

/// Expected weighted loss of the set under the scores treated as a
/// distribution: D(x) - sum_{i in [l,u]} h(i) * p_i, with D(x) = sum_i h(i) * p_i.
double interval_risk_weighted(const ScoreVector& scores, const WeightScheme& w, const PredictionSet& set);

/// Expected divergence loss of the set under the scores:
/// (sum_{i<l} (l-i) p_i + sum_{i>u} (i-u) p_i) / (K-1).
double interval_risk_divergence(const ScoreVector& scores, const PredictionSet& set);

/// Weighted mass sum_{i in [l,u]} h(i) * p_i covered by the set.
double covered_weighted_mass(const ScoreVector& scores, const WeightScheme& w, const PredictionSet& set);

/// D(x) = sum_i h(i) * p_i, the conditional-risk upper bound at x.
double total_weighted_mass(const ScoreVector& scores, const WeightScheme& w);

}  // namespace ordinal_crc
