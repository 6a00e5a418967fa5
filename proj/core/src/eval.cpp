#include "ordinal_crc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "ordinal_crc/calibration.hpp"
#include "ordinal_crc/losses.hpp"
#include "ordinal_crc/rng.hpp"
#include "ordinal_crc/sets.hpp"

namespace ordinal_crc::eval {
namespace {

struct RowCache {
  GreedyChain chain;
  SampleBreakpoints breakpoints;
};

struct TrialOutcome {
  double risk = 0.0;
  double lambda_hat = 0.0;
  double width_sum = 0.0;
  std::vector<size_t> size_histogram;
  std::vector<size_t> centroid_histogram;
  std::exception_ptr error;
};

std::vector<RowCache> build_caches(const std::vector<LabeledScore>& rows, const LossSpec& loss) {
  std::vector<RowCache> caches;
  caches.reserve(rows.size());
  for (const auto& row : rows) {
    RowCache cache;
    cache.chain = loss.kind == LossSpec::Kind::weighted ? weighted_chain(row.scores, loss.weights)
                                                        : divergence_chain(row.scores);
    cache.breakpoints = sample_breakpoints(row, loss);
    caches.push_back(std::move(cache));
  }
  return caches;
}

void run_one_trial(const std::vector<LabeledScore>& rows, const std::vector<RowCache>& caches, int k,
                   double alpha, const LossSpec& loss, size_t n_cal, uint64_t seed, int trial,
                   TrialOutcome& out) {
  std::vector<size_t> order(rows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed, static_cast<uint64_t>(trial));
  rng.shuffle(order);

  std::vector<SampleBreakpoints> cal_bps;
  cal_bps.reserve(n_cal);
  for (size_t i = 0; i < n_cal; ++i) cal_bps.push_back(caches[order[i]].breakpoints);
  const CalibrationResult calibration =
      calibrate_exact(std::span<const SampleBreakpoints>(cal_bps), alpha, loss);

  out.lambda_hat = calibration.lambda_hat;
  out.size_histogram.assign(static_cast<size_t>(k) + 1, 0);
  out.centroid_histogram.assign(static_cast<size_t>(2 * k - 1), 0);
  double loss_sum = 0.0;
  const size_t n_test = rows.size() - n_cal;
  for (size_t i = n_cal; i < rows.size(); ++i) {
    const size_t r = order[i];
    const PredictionSet set = select_from_chain(caches[r].chain, loss.kind, calibration.lambda_hat);
    loss_sum += pointwise_loss(rows[r].label, set, loss, k);
    out.width_sum += set.width();
    ++out.size_histogram[static_cast<size_t>(set.width())];
    ++out.centroid_histogram[static_cast<size_t>(set.lower + set.upper)];
  }
  out.risk = loss_sum / static_cast<double>(n_test);
}

}  // namespace

RiskReport run_trials(const std::vector<LabeledScore>& rows, double alpha, const LossSpec& loss, int trials,
                      double split, uint64_t seed, int threads) {
  const int k = validate_dataset(rows);
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  const size_t n_cal = static_cast<size_t>(std::llround(static_cast<double>(rows.size()) * split));
  if (n_cal < 1 || n_cal >= rows.size()) throw ConfigError("too few rows for the requested split");

  const std::vector<RowCache> caches = build_caches(rows, loss);
  std::vector<TrialOutcome> outcomes(static_cast<size_t>(trials));

  const int workers = std::max(1, std::min(threads, trials));
  auto worker_body = [&](int first, int stride) {
    for (int t = first; t < trials; t += stride) {
      auto& out = outcomes[static_cast<size_t>(t)];
      try {
        run_one_trial(rows, caches, k, alpha, loss, n_cal, seed, t, out);
      } catch (...) {
        out.error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker_body(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_body, w, workers);
    for (auto& th : pool) th.join();
  }

  RiskReport report;
  report.alpha = alpha;
  report.trials = trials;
  report.n_calibration = n_cal;
  report.n_test = rows.size() - n_cal;
  report.size_histogram.assign(static_cast<size_t>(k) + 1, 0);
  report.centroid_histogram.assign(static_cast<size_t>(2 * k - 1), 0);
  double risk_sum = 0.0;
  double width_sum = 0.0;
  for (const auto& out : outcomes) {
    if (out.error) std::rethrow_exception(out.error);
    report.risk_per_trial.push_back(out.risk);
    report.lambda_hat_per_trial.push_back(out.lambda_hat);
    risk_sum += out.risk;
    width_sum += out.width_sum;
    for (size_t w = 0; w < report.size_histogram.size(); ++w) report.size_histogram[w] += out.size_histogram[w];
    for (size_t b = 0; b < report.centroid_histogram.size(); ++b) {
      report.centroid_histogram[b] += out.centroid_histogram[b];
    }
  }
  report.mean_risk = risk_sum / static_cast<double>(trials);
  report.mean_set_size = width_sum / static_cast<double>(report.n_test * static_cast<size_t>(trials));
  return report;
}

std::vector<RiskReport> sweep_alpha(const std::vector<LabeledScore>& rows, const std::vector<double>& alphas,
                                    const LossSpec& loss, int trials, double split, uint64_t seed,
                                    int threads) {
  if (alphas.empty()) throw ConfigError("alpha sweep needs at least one alpha");
  std::vector<RiskReport> reports;
  reports.reserve(alphas.size());
  for (double alpha : alphas) {
    reports.push_back(run_trials(rows, alpha, loss, trials, split, seed, threads));
  }
  return reports;
}

std::optional<size_t> first_saturation_index(const std::vector<RiskReport>& sweep) {
  for (size_t i = 1; i < sweep.size(); ++i) {
    if (std::abs(sweep[i].mean_risk - sweep[i - 1].mean_risk) < 1e-4) return i;
  }
  return std::nullopt;
}

double alpha_for_target_size(const std::vector<LabeledScore>& rows, const LossSpec& loss, double target_size,
                             int trials, uint64_t seed, double tol, double split, int threads) {
  const int k = validate_dataset(rows);
  if (!(target_size >= 1.0 && target_size <= static_cast<double>(k))) {
    throw ConfigError("target size must lie in [1, K]");
  }
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  const size_t n_cal = static_cast<size_t>(std::llround(static_cast<double>(rows.size()) * split));
  double lo = 1.0 / static_cast<double>(n_cal + 1) + 1e-9;  // feasibility floor B/(n+1)
  double hi = 1.0 - 1e-9;

  auto size_at = [&](double alpha) {
    return run_trials(rows, alpha, loss, trials, split, seed, threads).mean_set_size;
  };

  // Mean size is non-increasing in alpha under shared trial seeds.
  const double size_lo = size_at(lo);
  if (size_lo + tol < target_size) throw ConfigError("target size unreachable: too large even at minimal alpha");
  if (std::abs(size_lo - target_size) <= tol) return lo;
  const double size_hi = size_at(hi);
  if (size_hi - tol > target_size) throw ConfigError("target size unreachable: too small even at alpha near 1");
  if (std::abs(size_hi - target_size) <= tol) return hi;

  double alpha = 0.5 * (lo + hi);
  for (int iter = 0; iter < 60 && hi - lo > 1e-9; ++iter) {
    alpha = 0.5 * (lo + hi);
    const double size = size_at(alpha);
    if (std::abs(size - target_size) <= tol) return alpha;
    if (size > target_size) {
      lo = alpha;
    } else {
      hi = alpha;
    }
  }
  return alpha;  // interval exhausted; closest alpha found
}

std::vector<size_t> centroid_distribution(const std::vector<LabeledScore>& rows, const LossSpec& loss,
                                          double lambda) {
  const int k = validate_dataset(rows);
  std::vector<size_t> histogram(static_cast<size_t>(2 * k - 1), 0);
  for (const auto& row : rows) {
    const PredictionSet set = build_set(row.scores, loss, lambda);
    ++histogram[static_cast<size_t>(set.lower + set.upper)];
  }
  return histogram;
}

}  // namespace ordinal_crc::eval
