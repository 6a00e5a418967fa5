#include "ordinal_crc/sets.hpp"

#include <algorithm>
#include <cmath>

#include "ordinal_crc/losses.hpp"

namespace ordinal_crc {
namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
}

ClassIndex argmax_first(const std::vector<double>& values) {
  return static_cast<ClassIndex>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

ClassIndex point_prediction(const ScoreVector& scores, const LossSpec& loss) {
  const int k = scores.num_classes();
  if (loss.kind == LossSpec::Kind::divergence) {
    return argmax_first(scores.probs);
  }
  if (loss.weights.num_classes() != k) throw DataError("scores/weights dimension mismatch");
  std::vector<double> products(static_cast<size_t>(k));
  double max = 0.0;
  for (int i = 0; i < k; ++i) {
    products[static_cast<size_t>(i)] = loss.weights[i] * scores[i];
    max = std::max(max, products[static_cast<size_t>(i)]);
  }
  if (max <= 0.0) throw DataError("no admissible point prediction: all weighted scores are zero");
  return argmax_first(products);
}

GreedyChain weighted_chain(const ScoreVector& scores, const WeightScheme& w) {
  const int k = scores.num_classes();
  if (w.num_classes() != k) throw DataError("scores/weights dimension mismatch");
  std::vector<double> s(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) s[static_cast<size_t>(i)] = w[i] * scores[i];

  const ClassIndex yhat = point_prediction(scores, LossSpec::weighted(w));
  GreedyChain chain;
  chain.steps.reserve(static_cast<size_t>(k));
  chain.step_stat.reserve(static_cast<size_t>(k));

  ClassIndex lower = yhat, upper = yhat;
  double mass = s[static_cast<size_t>(yhat)];
  chain.steps.emplace_back(lower, upper);
  chain.step_stat.push_back(mass);

  while (upper - lower + 1 < k) {
    bool extend_lower;
    if (lower == 0) {
      extend_lower = false;
    } else if (upper == k - 1) {
      extend_lower = true;
    } else {
      // Strictly-greater test: ties extend the upper end.
      extend_lower = s[static_cast<size_t>(lower - 1)] > s[static_cast<size_t>(upper + 1)];
    }
    if (extend_lower) {
      --lower;
      mass += s[static_cast<size_t>(lower)];
    } else {
      ++upper;
      mass += s[static_cast<size_t>(upper)];
    }
    chain.steps.emplace_back(lower, upper);
    chain.step_stat.push_back(mass);
  }
  return chain;
}

GreedyChain divergence_chain(const ScoreVector& scores) {
  const int k = scores.num_classes();
  const ClassIndex yhat = point_prediction(scores, LossSpec::divergence());

  // head(j) = sum_{i<=j} p_i, tail(j) = sum_{i>=j} p_i: the one-step risk
  // reductions of extending the lower/upper boundary (times K-1).
  std::vector<double> head(static_cast<size_t>(k)), tail(static_cast<size_t>(k));
  double acc = 0.0;
  for (int i = 0; i < k; ++i) head[static_cast<size_t>(i)] = (acc += scores[i]);
  acc = 0.0;
  for (int i = k - 1; i >= 0; --i) tail[static_cast<size_t>(i)] = (acc += scores[i]);

  GreedyChain chain;
  chain.steps.reserve(static_cast<size_t>(k));
  chain.step_stat.reserve(static_cast<size_t>(k));

  ClassIndex lower = yhat, upper = yhat;
  chain.steps.emplace_back(lower, upper);
  // Residuals are evaluated directly from the interval rather than by
  // subtracting reductions; the full range then lands on exactly 0 and the
  // sequence is floating-point monotone.
  chain.step_stat.push_back(k == 1 ? 0.0 : interval_risk_divergence(scores, chain.steps.back()));

  while (upper - lower + 1 < k) {
    bool extend_lower;
    if (lower == 0) {
      extend_lower = false;
    } else if (upper == k - 1) {
      extend_lower = true;
    } else {
      // >= : ties extend the lower end.
      extend_lower = head[static_cast<size_t>(lower - 1)] >= tail[static_cast<size_t>(upper + 1)];
    }
    if (extend_lower) {
      --lower;
    } else {
      ++upper;
    }
    chain.steps.emplace_back(lower, upper);
    chain.step_stat.push_back(interval_risk_divergence(scores, chain.steps.back()));
  }
  return chain;
}

std::vector<double> chain_lambda_thresholds(const GreedyChain& chain, LossSpec::Kind kind) {
  std::vector<double> thresholds(chain.step_stat.size());
  for (size_t j = 0; j < chain.step_stat.size(); ++j) {
    thresholds[j] = kind == LossSpec::Kind::weighted
                        ? std::clamp(1.0 - chain.step_stat[j], 0.0, 1.0)
                        : chain.step_stat[j];
  }
  return thresholds;
}

PredictionSet select_from_chain(const GreedyChain& chain, LossSpec::Kind kind, double lambda) {
  check_lambda(lambda);
  if (kind == LossSpec::Kind::weighted) {
    for (size_t j = 0; j < chain.steps.size(); ++j) {
      // mass >= 1 - lambda, phrased so the comparison is bit-identical to the
      // per-sample breakpoint thresholds used by calibration.
      if (std::clamp(1.0 - chain.step_stat[j], 0.0, 1.0) <= lambda) return chain.steps[j];
    }
    return chain.steps.back();  // total weighted mass below 1 - lambda: full range
  }
  for (size_t j = 0; j < chain.steps.size(); ++j) {
    if (chain.step_stat[j] <= lambda) return chain.steps[j];
  }
  return chain.steps.back();  // unreachable: the last residual is exactly 0
}

PredictionSet build_weighted_set(const ScoreVector& scores, const WeightScheme& w, double lambda) {
  return select_from_chain(weighted_chain(scores, w), LossSpec::Kind::weighted, lambda);
}

PredictionSet build_divergence_set(const ScoreVector& scores, double lambda) {
  return select_from_chain(divergence_chain(scores), LossSpec::Kind::divergence, lambda);
}

PredictionSet build_set(const ScoreVector& scores, const LossSpec& loss, double lambda) {
  return loss.kind == LossSpec::Kind::weighted ? build_weighted_set(scores, loss.weights, lambda)
                                               : build_divergence_set(scores, lambda);
}

PredictionSet oracle_weighted_set(const ScoreVector& posterior, const WeightScheme& w, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  const int k = posterior.num_classes();
  if (w.num_classes() != k) throw DataError("scores/weights dimension mismatch");
  const double required = total_weighted_mass(posterior, w) - alpha;
  const ClassIndex yhat = point_prediction(posterior, LossSpec::weighted(w));

  bool found = false;
  PredictionSet best;
  double best_mass = -1.0;
  bool best_covers_yhat = false;
  for (int width = 1; width <= k; ++width) {
    for (int lower = 0; lower + width - 1 < k; ++lower) {
      const PredictionSet candidate(lower, lower + width - 1);
      const double mass = covered_weighted_mass(posterior, w, candidate);
      if (mass < required) continue;
      const bool covers = candidate.contains(yhat);
      if (!found || mass > best_mass || (mass == best_mass && covers && !best_covers_yhat)) {
        found = true;
        best = candidate;
        best_mass = mass;
        best_covers_yhat = covers;
      }
      // Remaining ties keep the smaller lower end, i.e. the earlier candidate.
    }
    if (found) break;
  }
  return found ? best : PredictionSet(0, k - 1);
}

PredictionSet oracle_divergence_set(const ScoreVector& posterior, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  const int k = posterior.num_classes();
  if (k < 2) throw ConfigError("divergence sets need K >= 2");

  for (int width = 1; width <= k; ++width) {
    bool found = false;
    PredictionSet best;
    double best_risk = 0.0;
    for (int lower = 0; lower + width - 1 < k; ++lower) {
      const PredictionSet candidate(lower, lower + width - 1);
      const double risk = interval_risk_divergence(posterior, candidate);
      if (risk > alpha) continue;
      if (!found || risk < best_risk) {
        found = true;
        best = candidate;
        best_risk = risk;
      }
    }
    if (found) return best;
  }
  return PredictionSet(0, k - 1);  // risk of the full range is 0 <= alpha
}

}  // namespace ordinal_crc
