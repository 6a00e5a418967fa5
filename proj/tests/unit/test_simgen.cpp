#include <doctest.h>

#include <cmath>

#include "ordinal_crc/losses.hpp"
#include "ordinal_crc/sets.hpp"
#include "ordinal_crc/simgen.hpp"
#include "test_helpers.hpp"

using namespace ordinal_crc;
using namespace ordinal_crc::simgen;

TEST_SUITE("simgen") {
  TEST_CASE("default specs: means on the diagonal, positive-definite covariances") {
    const auto specs = make_default_specs(10, 7);
    REQUIRE(specs.size() == 10);
    for (int i = 0; i < 10; ++i) {
      CHECK(specs[static_cast<size_t>(i)].mean[0] == static_cast<double>(i));
      CHECK(specs[static_cast<size_t>(i)].mean[1] == static_cast<double>(i));
      const auto& c = specs[static_cast<size_t>(i)].covariance;
      CHECK(c[0][1] == c[1][0]);
      CHECK(c[0][0] > 0.0);
      CHECK(c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0.0);
    }

    const auto pair = make_default_specs(2, 12345);
    CHECK(pair.size() == 2);
    CHECK_THROWS_AS(make_default_specs(1, 7), ConfigError);
  }

  TEST_CASE("spec generation and sampling are deterministic per seed") {
    const auto a = make_default_specs(6, 99);
    const auto b = make_default_specs(6, 99);
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].covariance == b[i].covariance);
    }
    const auto xs = sample_dataset(a, 50, 4);
    const auto ys = sample_dataset(b, 50, 4);
    REQUIRE(xs.size() == ys.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      CHECK(xs[i].point == ys[i].point);  // bit-for-bit
      CHECK(xs[i].label == ys[i].label);
    }
    const auto zs = sample_dataset(a, 50, 5);
    CHECK(xs[0].point != zs[0].point);
  }

  TEST_CASE("sample counts and label layout") {
    const auto specs = make_default_specs(10, 7);
    const auto rows = sample_dataset(specs, 200, 1);
    CHECK(rows.size() == 2000);
    size_t per_class[10] = {};
    for (const auto& r : rows) ++per_class[r.label];
    for (size_t c = 0; c < 10; ++c) CHECK(per_class[c] == 200);

    CHECK(sample_dataset(make_default_specs(2, 3), 1, 9).size() == 2);
  }

  TEST_CASE("class-0 sample mean approaches its center") {
    const auto specs = make_default_specs(2, 21);
    const auto rows = sample_dataset(specs, 100000, 17);
    double mx = 0.0, my = 0.0;
    size_t n = 0;
    for (const auto& r : rows) {
      if (r.label != 0) continue;
      mx += r.point[0];
      my += r.point[1];
      ++n;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    CHECK(std::abs(mx) < 0.05);
    CHECK(std::abs(my) < 0.05);
  }

  TEST_CASE("posterior at the density midpoint of two symmetric classes is (0.5, 0.5)") {
    std::vector<GaussianClassSpec> specs(2);
    specs[0].mean = {0.0, 0.0};
    specs[1].mean = {2.0, 2.0};
    const auto posterior = bayes_posterior({1.0, 1.0}, specs);
    CHECK(posterior[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(posterior[1] == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("degenerate cases: single class, widely separated classes") {
    std::vector<GaussianClassSpec> one(1);
    CHECK(bayes_posterior({3.0, -1.0}, one).probs == std::vector<double>{1.0});

    std::vector<GaussianClassSpec> far(3);
    far[0].mean = {0.0, 0.0};
    far[1].mean = {50.0, 50.0};
    far[2].mean = {100.0, 100.0};
    const auto posterior = bayes_posterior({50.0, 50.0}, far);
    CHECK(posterior[1] > 0.9);
  }

  TEST_CASE("sampled posteriors satisfy the score-vector invariants") {
    const auto specs = make_default_specs(8, 5);
    const auto rows = simulate_scores(specs, 40, 11);
    CHECK(validate_dataset(rows) == 8);
    for (const auto& row : rows) {
      double sum = 0.0;
      for (double p : row.scores.probs) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("temperature scaling flattens the posterior but keeps it valid") {
    const auto specs = make_default_specs(5, 13);
    const Point2 x{2.2, 1.7};
    const auto exact = bayes_posterior(x, specs);
    const auto warm = scaled_posterior(x, specs, 4.0);
    double max_exact = 0.0, max_warm = 0.0, sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      max_exact = std::max(max_exact, exact[i]);
      max_warm = std::max(max_warm, warm[i]);
      sum += warm[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_warm < max_exact);
    CHECK_THROWS_AS(scaled_posterior(x, specs, 0.0), ConfigError);
  }

  TEST_CASE("oracle sets built from exact posteriors control the realized risk") {
    const auto specs = make_default_specs(6, 31);
    const auto points = sample_dataset(specs, 400, 23);
    const auto equal = WeightScheme::equal(6);
    const double alpha = 0.15;
    double weighted_sum = 0.0, divergence_sum = 0.0;
    for (const auto& sample : points) {
      const auto posterior = bayes_posterior(sample.point, specs);
      weighted_sum += weighted_loss(sample.label, oracle_weighted_set(posterior, equal, alpha), equal);
      divergence_sum += divergence_loss(sample.label, oracle_divergence_set(posterior, alpha), 6);
    }
    const double n = static_cast<double>(points.size());
    // Monte Carlo slack: 3 standard errors of a worst-case Bernoulli at alpha.
    const double slack = 3.0 * std::sqrt(alpha * (1.0 - alpha) / n);
    CHECK(weighted_sum / n <= alpha + slack);
    CHECK(divergence_sum / n <= alpha + slack);
  }
}
