#include <doctest.h>

#include <cmath>

#include "ordinal_crc/calibration.hpp"
#include "ordinal_crc/losses.hpp"
#include "ordinal_crc/oracles.hpp"
#include "ordinal_crc/sets.hpp"
#include "test_helpers.hpp"

using namespace ordinal_crc;

namespace {

const auto kEqual5 = WeightScheme::equal(5);
const auto kWeighted5 = LossSpec::weighted(kEqual5);

// Direct evaluation of one sample's loss at lambda through the set builders,
// bypassing the breakpoint representation entirely.
double direct_loss(const LabeledScore& row, const LossSpec& loss, double lambda) {
  return pointwise_loss(row.label, build_set(row.scores, loss, lambda), loss, row.scores.num_classes());
}

}  // namespace

TEST_SUITE("calibration") {
  TEST_CASE("sample breakpoints: one jump where the label leaves the chain") {
    const auto row = test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 1);
    const auto bp = sample_breakpoints(row, kWeighted5);
    REQUIRE(bp.thresholds.size() == 1);
    CHECK(bp.thresholds[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(bp.losses[0] == 1.0);
    CHECK(step_loss_at(bp, 0.39) == 0.0);
    CHECK(step_loss_at(bp, bp.thresholds[0]) == 1.0);  // at/above the threshold
    CHECK(step_loss_at(bp, 1.0) == 1.0);
    CHECK(step_loss_at(bp, 0.0) == 0.0);
  }

  TEST_CASE("sample breakpoints: label at the point prediction never loses") {
    const auto row = test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 2);
    const auto bp = sample_breakpoints(row, kWeighted5);
    CHECK(bp.thresholds.empty());
    CHECK(step_loss_at(bp, 0.7) == 0.0);
  }

  TEST_CASE("sample breakpoints: divergence losses step through the chain distances") {
    const auto row = test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 0);
    const auto bp = sample_breakpoints(row, LossSpec::divergence());
    // chain [2,2],[1,2],[1,3],[0,3],[0,4]; label 0 leaves at [1,3]/[1,2] (loss
    // 0.25) and at [2,2] (loss 0.5)
    REQUIRE(bp.thresholds.size() == 2);
    CHECK(bp.thresholds[0] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(bp.losses[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bp.thresholds[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(bp.losses[1] == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("breakpoint evaluation agrees with direct set construction everywhere") {
    Rng rng(41, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = 2 + static_cast<int>(rng.below(8));
      const auto rows = test_helpers::random_dataset(1, k, rng);
      for (const LossSpec& loss : {LossSpec::weighted(test_helpers::random_weights(k, rng)),
                                   LossSpec::divergence()}) {
        const auto bp = sample_breakpoints(rows[0], loss);
        for (int i = 0; i < 25; ++i) {
          const double lambda = rng.uniform01();
          CHECK(step_loss_at(bp, lambda) == direct_loss(rows[0], loss, lambda));
        }
        for (double t : bp.thresholds) {
          CHECK(step_loss_at(bp, t) == direct_loss(rows[0], loss, t));
          const double below = std::nextafter(t, 0.0);
          if (below >= 0.0) CHECK(step_loss_at(bp, below) == direct_loss(rows[0], loss, below));
        }
      }
    }
  }

  TEST_CASE("per-sample step functions start at zero and never decrease") {
    Rng rng(43, 0);
    for (int trial = 0; trial < 200; ++trial) {
      const int k = 2 + static_cast<int>(rng.below(8));
      const auto rows = test_helpers::random_dataset(1, k, rng);
      const LossSpec loss = trial % 2 == 0 ? LossSpec::weighted(test_helpers::random_weights(k, rng))
                                           : LossSpec::divergence();
      const auto bp = sample_breakpoints(rows[0], loss);
      CHECK(step_loss_at(bp, 0.0) == 0.0);
      for (size_t j = 0; j < bp.thresholds.size(); ++j) {
        CHECK(bp.losses[j] > (j == 0 ? 0.0 : bp.losses[j - 1]));
        if (j > 0) CHECK(bp.thresholds[j] > bp.thresholds[j - 1]);
        CHECK((bp.thresholds[j] >= 0.0 && bp.thresholds[j] <= 1.0));
      }
    }
  }

  TEST_CASE("exact calibration: all-zero losses give lambda_hat = 1") {
    // label equals the point prediction on every row
    std::vector<LabeledScore> rows(4, test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 2));
    const auto result = calibrate_exact(rows, 0.5, kWeighted5);
    CHECK(result.lambda_hat == 1.0);
    CHECK(result.empirical_sum == 0.0);
    CHECK(result.n == 4);
  }

  TEST_CASE("exact calibration: alpha below B/(n+1) is infeasible") {
    std::vector<LabeledScore> rows{test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 1)};
    CHECK_THROWS_AS(calibrate_exact(rows, 0.4, kWeighted5), InfeasibleError);
  }

  TEST_CASE("exact calibration lands immediately below the first infeasible jump") {
    // four identical rows whose loss jumps to 1 near lambda = 0.4
    std::vector<LabeledScore> rows(4, test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 1));
    const auto result = calibrate_exact(rows, 0.5, kWeighted5);
    const auto bp = sample_breakpoints(rows[0], kWeighted5);
    const double jump = bp.thresholds[0];
    CHECK(result.lambda_hat == std::nextafter(jump, 0.0));
    CHECK(result.empirical_sum == 0.0);  // feasible: sum 0 <= 5*0.5 - 1

    const double grid = oracles::calibrate_grid(rows, 0.5, kWeighted5, 1e-4);
    CHECK(std::abs(result.lambda_hat - grid) <= 1e-4);
  }

  TEST_CASE("binary calibration matches exact within delta and stays feasible") {
    std::vector<LabeledScore> rows(4, test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 1));
    const auto exact = calibrate_exact(rows, 0.5, kWeighted5);
    const auto binary = calibrate_binary(rows, 0.5, kWeighted5, 1e-4);
    CHECK(std::abs(exact.lambda_hat - binary.lambda_hat) <= 1e-4 + 1e-12);
    CHECK(binary.empirical_sum <= 5.0 * 0.5 - 1.0);

    // identically-zero losses drift to the top of the range
    std::vector<LabeledScore> covered(3, test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 2));
    const auto top = calibrate_binary(covered, 0.5, kWeighted5, 1e-4);
    CHECK(top.lambda_hat >= 1.0 - 1e-4);

    // a coarse delta still returns a feasible threshold
    const auto coarse = calibrate_binary(rows, 0.5, kWeighted5, 0.5);
    CHECK(total_step_loss(std::vector<SampleBreakpoints>{sample_breakpoints(rows[0], kWeighted5),
                                                         sample_breakpoints(rows[1], kWeighted5),
                                                         sample_breakpoints(rows[2], kWeighted5),
                                                         sample_breakpoints(rows[3], kWeighted5)},
                          coarse.lambda_hat) <= 5.0 * 0.5 - 1.0);
  }

  TEST_CASE("exact and binary agree within delta on random datasets") {
    Rng rng(47, 0);
    for (int trial = 0; trial < 60; ++trial) {
      const int k = 2 + static_cast<int>(rng.below(9));
      const int n = 5 + static_cast<int>(rng.below(196));
      const auto rows = test_helpers::random_dataset(n, k, rng);
      const LossSpec loss = trial % 2 == 0 ? LossSpec::weighted(test_helpers::random_weights(k, rng))
                                           : LossSpec::divergence();
      const double alpha = rng.uniform(1.5 / (n + 1.0), 0.9);
      const double delta = 1e-4;
      const auto exact = calibrate_exact(rows, alpha, loss);
      const auto binary = calibrate_binary(rows, alpha, loss, delta);
      CHECK(std::abs(exact.lambda_hat - binary.lambda_hat) <= delta + 1e-12);
    }
  }

  TEST_CASE("feasibility invariant holds under independent re-evaluation") {
    Rng rng(53, 0);
    for (int trial = 0; trial < 60; ++trial) {
      const int k = 2 + static_cast<int>(rng.below(9));
      const int n = 3 + static_cast<int>(rng.below(80));
      const auto rows = test_helpers::random_dataset(n, k, rng);
      const LossSpec loss = trial % 2 == 0 ? LossSpec::weighted(test_helpers::random_weights(k, rng))
                                           : LossSpec::divergence();
      const double alpha = rng.uniform(1.5 / (n + 1.0), 0.9);
      const auto result = calibrate_exact(rows, alpha, loss);
      CHECK((result.lambda_hat >= 0.0 && result.lambda_hat <= 1.0));
      double replay = 0.0;
      for (const auto& row : rows) replay += direct_loss(row, loss, result.lambda_hat);
      CHECK(replay <= static_cast<double>(n + 1) * alpha - 1.0);
      CHECK(result.empirical_sum == replay);
    }
  }

  TEST_CASE("jump diagnostics: single row, generic rows, identical rows") {
    const auto generic = test_helpers::row({0.1, 0.2, 0.4, 0.2, 0.1}, 1);
    const auto single = jump_diagnostics(std::vector<LabeledScore>{generic}, kWeighted5);
    CHECK(single.max_collision_m == 1);
    CHECK(single.max_empirical_jump == 1.0);  // one sample jumping 0 -> 1

    Rng rng(59, 0);
    const auto rows = test_helpers::random_dataset(40, 6, rng);
    const auto diag = jump_diagnostics(rows, LossSpec::weighted(WeightScheme::equal(6)));
    CHECK(diag.max_collision_m == 1);  // continuous scores: no collisions

    std::vector<LabeledScore> identical(7, generic);
    const auto collided = jump_diagnostics(identical, kWeighted5);
    CHECK(collided.max_collision_m == 7);
    CHECK(collided.max_empirical_jump == doctest::Approx(1.0).epsilon(1e-12));  // single-sample jump
  }

  TEST_CASE("empirical jumps respect the (M+1)B/n bound") {
    Rng rng(61, 0);
    for (int trial = 0; trial < 40; ++trial) {
      const int k = 2 + static_cast<int>(rng.below(8));
      const int n = 1 + static_cast<int>(rng.below(50));
      const auto rows = test_helpers::random_dataset(n, k, rng);
      const LossSpec loss = trial % 2 == 0 ? LossSpec::weighted(test_helpers::random_weights(k, rng))
                                           : LossSpec::divergence();
      const auto diag = jump_diagnostics(rows, loss);
      const double bound = static_cast<double>(diag.max_collision_m + 1) / static_cast<double>(n);
      CHECK(diag.max_empirical_jump <= bound + 1e-12);
    }
  }
}
