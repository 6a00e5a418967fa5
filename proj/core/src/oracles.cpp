#include "ordinal_crc/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "ordinal_crc/losses.hpp"

namespace ordinal_crc::oracles {
namespace {

void extend_paths(std::vector<PredictionSet>& path, int num_classes, NestedChainFamily& out) {
  const PredictionSet last = path.back();  // by value: emplace_back may reallocate
  if (last.width() == num_classes) {
    out.chains.push_back(path);
    return;
  }
  if (last.lower > 0) {
    path.emplace_back(last.lower - 1, last.upper);
    extend_paths(path, num_classes, out);
    path.pop_back();
  }
  if (last.upper < num_classes - 1) {
    path.emplace_back(last.lower, last.upper + 1);
    extend_paths(path, num_classes, out);
    path.pop_back();
  }
}

double chain_stat(const PredictionSet& set, const ScoreVector& scores, const LossSpec& loss) {
  if (loss.kind == LossSpec::Kind::weighted) {
    return std::clamp(1.0 - covered_weighted_mass(scores, loss.weights, set), 0.0, 1.0);
  }
  return interval_risk_divergence(scores, set);
}

}  // namespace

NestedChainFamily enumerate_chains(int num_classes, ClassIndex yhat) {
  if (num_classes < 1 || num_classes > 12) throw ConfigError("chain enumeration supports 1 <= K <= 12");
  if (yhat < 0 || yhat >= num_classes) throw ConfigError("yhat out of range");
  NestedChainFamily family;
  std::vector<PredictionSet> path{PredictionSet(yhat, yhat)};
  extend_paths(path, num_classes, family);
  return family;
}

int chain_width_at(const std::vector<PredictionSet>& chain, const ScoreVector& scores, const LossSpec& loss,
                   double lambda) {
  for (const auto& set : chain) {
    if (chain_stat(set, scores, loss) <= lambda) return set.width();
  }
  return chain.back().width();
}

bool verify_non_domination(const ScoreVector& scores, const LossSpec& loss) {
  const int k = scores.num_classes();
  if (k > 8) throw ConfigError("non-domination check supports K <= 8");
  const ClassIndex yhat = point_prediction(scores, loss);
  const GreedyChain greedy = loss.kind == LossSpec::Kind::weighted ? weighted_chain(scores, loss.weights)
                                                                   : divergence_chain(scores);
  const NestedChainFamily family = enumerate_chains(k, yhat);

  // Lambda grid: every transition value of every chain, plus midpoints to
  // probe segment interiors, plus the endpoints.
  std::vector<double> grid{0.0, 1.0};
  for (const auto& chain : family.chains) {
    for (const auto& set : chain) grid.push_back(std::clamp(chain_stat(set, scores, loss), 0.0, 1.0));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const size_t transitions = grid.size();
  for (size_t i = 0; i + 1 < transitions; ++i) grid.push_back(0.5 * (grid[i] + grid[i + 1]));

  for (const auto& chain : family.chains) {
    bool weakly_better_everywhere = true;
    bool strictly_better_somewhere = false;
    for (double lambda : grid) {
      const int w_greedy = chain_width_at(greedy.steps, scores, loss, lambda);
      const int w_other = chain_width_at(chain, scores, loss, lambda);
      if (w_other > w_greedy) {
        weakly_better_everywhere = false;
        break;
      }
      if (w_other < w_greedy) strictly_better_somewhere = true;
    }
    if (weakly_better_everywhere && strictly_better_somewhere) return false;
  }
  return true;
}

double calibrate_grid(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss,
                      double grid_step) {
  if (!(grid_step > 0.0)) throw ConfigError("grid_step must be positive");
  const int k = validate_dataset(rows);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const double bound = static_cast<double>(rows.size() + 1) * alpha - loss.bound();
  if (bound < 0.0) throw InfeasibleError("infeasible: alpha below B/(n+1)");

  std::vector<GreedyChain> chains;
  chains.reserve(rows.size());
  for (const auto& row : rows) {
    chains.push_back(loss.kind == LossSpec::Kind::weighted ? weighted_chain(row.scores, loss.weights)
                                                           : divergence_chain(row.scores));
  }
  auto total_loss_at = [&](double lambda) {
    double total = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
      total += pointwise_loss(rows[i].label, select_from_chain(chains[i], loss.kind, lambda), loss, k);
    }
    return total;
  };

  // Scan downward; the total is non-decreasing in lambda so the first
  // feasible grid point is the answer.
  const long steps = static_cast<long>(std::floor(1.0 / grid_step));
  for (long i = steps + 1; i >= 0; --i) {
    const double lambda = std::min(1.0, static_cast<double>(i) * grid_step);
    if (total_loss_at(lambda) <= bound) return lambda;
  }
  throw InfeasibleError("infeasible: no feasible grid point at this alpha");
}

}  // namespace ordinal_crc::oracles
