#pragma once
//
// Construction of contiguous, nested prediction sets.
//
// Both loss families share the same scheme: start from the point prediction
// and grow the interval one class at a time, always toward the neighbor that
// helps most. The resulting chain of K nested sets is what a threshold lambda
// selects from: larger lambda means a weaker requirement and a smaller set.
//
// Every returned set is contiguous, contains the point prediction, and the
// family is nested across lambda.

#include <vector>

#include "ordinal_crc/types.hpp"

namespace ordinal_crc {

/// Nested family grown greedily from the point prediction to the full range.
///
/// steps[0] is the singleton at the point prediction, steps[K-1] the full
/// range, and each step widens by exactly one class. step_stat[j] is the
/// accumulated weighted mass of steps[j] for the weighted family
/// (non-decreasing) and the residual interval risk for the divergence family
/// (non-increasing, ending at exactly 0).
struct GreedyChain {
  std::vector<PredictionSet> steps;
  std::vector<double> step_stat;

  int num_classes() const { return static_cast<int>(steps.size()); }
};

/// Weighted family: argmax_i h(i) * p_i; divergence family: argmax_i p_i.
/// Ties resolve to the smaller index. Errors when every weighted product is
/// zero (no admissible point prediction).
ClassIndex point_prediction(const ScoreVector& scores, const LossSpec& loss);

/// Greedy chain for the weighted family: each step extends toward the
/// adjacent class with the strictly larger weighted score; ties extend the
/// upper end.
GreedyChain weighted_chain(const ScoreVector& scores, const WeightScheme& w);

/// Greedy chain for the divergence family: each step extends toward the side
/// with the larger one-step risk reduction (head(l-1) vs tail(u+1)); ties
/// extend the lower end. step_stat holds normalized residual risks.
GreedyChain divergence_chain(const ScoreVector& scores);

/// First chain element whose accumulated mass reaches 1 - lambda; the full
/// range when the total weighted mass cannot reach it (its loss is then 0,
/// so inf over lambda of the per-sample loss stays 0).
PredictionSet build_weighted_set(const ScoreVector& scores, const WeightScheme& w, double lambda);

/// First chain element whose residual risk is <= lambda. The full range has
/// residual exactly 0, so the search always terminates.
PredictionSet build_divergence_set(const ScoreVector& scores, double lambda);

/// Set selection for a precomputed chain; used to reuse chains across many
/// lambda values.
PredictionSet select_from_chain(const GreedyChain& chain, LossSpec::Kind kind, double lambda);

/// Chain selection thresholds on the lambda axis: 1 - mass for the weighted
/// family (clamped into [0, 1]) and the residual risk for the divergence
/// family. Non-increasing along the chain; steps[j] is selected exactly when
/// j is the first index with threshold <= lambda.
std::vector<double> chain_lambda_thresholds(const GreedyChain& chain, LossSpec::Kind kind);

PredictionSet build_set(const ScoreVector& scores, const LossSpec& loss, double lambda);

/// Level-alpha set from an oracle posterior: the narrowest interval whose
/// covered weighted mass reaches D(x) - alpha, found by exhaustive search.
/// Ties prefer larger covered mass, then containment of the point
/// prediction, then the smaller lower end.
PredictionSet oracle_weighted_set(const ScoreVector& posterior, const WeightScheme& w, double alpha);

/// Narrowest interval with normalized divergence risk <= alpha, exhaustive.
/// Ties prefer smaller risk, then the smaller lower end.
PredictionSet oracle_divergence_set(const ScoreVector& posterior, double alpha);

}  // namespace ordinal_crc
