#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "adaptune/rng.hpp"
#include "adaptune/stats.hpp"

using namespace adaptune;
using stats::Summary;

TEST_CASE("summarize computes mean, sample sigma and standard error") {
  const std::vector<double> constant = {1, 1, 1, 1, 1};
  const Summary c = stats::summarize(constant);
  CHECK(c.mean == 1.0);
  CHECK(c.delta == 0.0);

  const std::vector<double> ramp = {1, 2, 3, 4, 5};
  const Summary r = stats::summarize(ramp);
  CHECK(r.mean == doctest::Approx(3.0));
  CHECK(r.sigma == doctest::Approx(std::sqrt(2.5)));
  CHECK(r.delta == doctest::Approx(0.7071).epsilon(1e-4));

  const std::vector<double> single = {0.8};
  const Summary s = stats::summarize(single);
  CHECK(s.mean == 0.8);
  CHECK(s.delta == 0.0);

  CHECK_THROWS_AS(stats::summarize(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(stats::summarize(std::vector<double>{std::nan("")}),
                  std::invalid_argument);
}

TEST_CASE("ratio propagation reproduces published central values") {
  // x = 1.0 row: 0.9214(8) / 0.9195(7) printed as 1.002(1)
  const Summary top{0.9214, 0.0008, 0.0, 5};
  const Summary bottom{0.9195, 0.0007, 0.0, 5};
  const Summary r = stats::ratio_with_uncertainty(top, bottom);
  CHECK(r.mean == doctest::Approx(1.002).epsilon(5e-4));
  CHECK(std::round(r.delta * 1000.0) == 1.0);

  // x = 0.005 row: 0.6112(97) / 0.3267(249) has central value 1.871
  const Summary small_top{0.6112, 0.0097, 0.0, 5};
  const Summary small_bottom{0.3267, 0.0249, 0.0, 5};
  CHECK(stats::ratio_with_uncertainty(small_top, small_bottom).mean ==
        doctest::Approx(1.871).epsilon(5e-4));

  const Summary same{0.5, 0.0, 0.0, 5};
  const Summary unit = stats::ratio_with_uncertainty(same, same);
  CHECK(unit.mean == 1.0);
  CHECK(unit.delta == 0.0);

  CHECK_THROWS_AS(stats::ratio_with_uncertainty(top, Summary{0.0, 0.0, 0.0, 5}),
                  std::domain_error);
}

TEST_CASE("ratio is invariant under common rescaling") {
  const Summary a{0.82, 0.004, 0.0, 5};
  const Summary b{0.79, 0.006, 0.0, 5};
  const Summary base = stats::ratio_with_uncertainty(a, b);
  const Summary scaled = stats::ratio_with_uncertainty(
      Summary{a.mean * 3.0, a.delta * 3.0, 0.0, 5},
      Summary{b.mean * 3.0, b.delta * 3.0, 0.0, 5});
  CHECK(scaled.mean == doctest::Approx(base.mean).epsilon(1e-12));
  CHECK(scaled.delta == doctest::Approx(base.delta).epsilon(1e-12));
}

TEST_CASE("significance follows the one-standard-deviation rule") {
  // bold cell at x = 0.02: 0.8389(28) vs 0.8270(28)
  CHECK(stats::is_significant(Summary{0.8389, 0.0028, 0.0, 5},
                              Summary{0.8270, 0.0028, 0.0, 5}));
  // x = 0.2 row has no bold: 0.9063(4) vs 0.9066(2)
  CHECK_FALSE(stats::is_significant(Summary{0.9063, 0.0004, 0.0, 5},
                                    Summary{0.9066, 0.0002, 0.0, 5}));
  const Summary s{0.5, 0.01, 0.0, 5};
  CHECK_FALSE(stats::is_significant(s, s));
  // symmetry
  rng::Stream stream(5);
  for (int i = 0; i < 200; ++i) {
    const Summary a{stream.uniform(0.1, 1.0), stream.uniform(0.0, 0.05), 0.0, 5};
    const Summary b{stream.uniform(0.1, 1.0), stream.uniform(0.0, 0.05), 0.0, 5};
    CHECK(stats::is_significant(a, b) == stats::is_significant(b, a));
  }
}

TEST_CASE("convergence count is the number of strictly positive scores") {
  CHECK(stats::convergence_count(std::vector<double>{0, 0.5, 0.6, 0, 0.7}) == 3);
  CHECK(stats::convergence_count(std::vector<double>{0, 0, 0}) == 0);
  CHECK(stats::convergence_count(std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}) == 5);
}

TEST_CASE("convergence threshold finds the smallest fully converged x") {
  // counts mirror the published c = I column: the original approach misses
  // runs below x = 0.015
  const std::vector<double> xs = {0.005, 0.01,  0.015, 0.02, 0.05, 0.1,
                                  0.2,   0.4,   0.6,   0.8,  1.0};
  const std::vector<int> original = {0, 2, 5, 5, 5, 5, 5, 5, 5, 5, 5};
  const std::vector<int> stable(11, 5);
  const std::vector<int> adaptive(11, 5);
  const auto threshold =
      stats::convergence_threshold(xs, {original, stable, adaptive}, 5);
  REQUIRE(threshold.has_value());
  CHECK(*threshold == 0.015);

  const auto all_full = stats::convergence_threshold(xs, {stable, adaptive}, 5);
  REQUIRE(all_full.has_value());
  CHECK(*all_full == 0.005);

  std::vector<int> late_failure(11, 5);
  late_failure.back() = 4;
  CHECK_FALSE(stats::convergence_threshold(xs, {late_failure}, 5).has_value());
}

TEST_CASE("effort ratio reproduces the alpha column") {
  // CoNLL-2003 sizes: alpha = 1 + 3250/(2*14041) rounds to 1.12
  stats::EffortInputs inputs;
  inputs.n_train = 14041;
  inputs.n_val = 3250;
  inputs.n_epochs_adaptive = 11.2;
  inputs.n_epochs_fixed = {20.0};
  const auto r = stats::effort_ratio(inputs);
  CHECK(r.alpha == doctest::Approx(1.1157).epsilon(1e-4));
  CHECK(std::round(r.alpha * 100.0) / 100.0 == 1.12);
  CHECK(r.ratio == doctest::Approx(0.625).epsilon(1e-3));  // 0.56 * 1.1157

  // no validation -> no overhead; equal epochs -> R = 1
  stats::EffortInputs no_val = inputs;
  no_val.n_val = 0;
  no_val.n_epochs_adaptive = 20.0;
  const auto r2 = stats::effort_ratio(no_val);
  CHECK(r2.alpha == 1.0);
  CHECK(r2.ratio == 1.0);

  // several hyperparameter runs add up in the denominator
  stats::EffortInputs multi = inputs;
  multi.n_epochs_fixed = {5.0, 20.0};
  CHECK(stats::effort_ratio(multi).ratio ==
        doctest::Approx(11.2 / 25.0 * r.alpha).epsilon(1e-12));

  // backward pass at twice the forward cost puts a 3 in the denominator
  stats::EffortInputs heavy = inputs;
  heavy.backward_cost_factor = 2.0;
  CHECK(stats::effort_ratio(heavy).alpha ==
        doctest::Approx(1.0 + 3250.0 / (3.0 * 14041.0)).epsilon(1e-12));

  CHECK_THROWS_AS(stats::effort_ratio(stats::EffortInputs{}), std::invalid_argument);
}

TEST_CASE("average relative uncertainty matches the published stability row") {
  // published (mean, delta) pairs for c = I, x >= 0.015
  const std::vector<std::pair<double, std::pair<double, double>>> original = {
      {0.015, {0.0762, 0.0256}}, {0.02, {0.3377, 0.0295}},
      {0.05, {0.7846, 0.0116}},  {0.1, {0.8801, 0.0022}},
      {0.2, {0.9000, 0.0008}},   {0.4, {0.9096, 0.0007}},
      {0.6, {0.9136, 0.0009}},   {0.8, {0.9169, 0.0005}},
      {1.0, {0.9175, 0.0005}}};
  std::map<double, Summary> by_x;
  for (const auto& [x, ms] : original) {
    by_x[x] = Summary{ms.first, ms.second, 0.0, 5};
  }
  CHECK(std::fabs(stats::average_relative_uncertainty(by_x, 0.015) - 0.0494) <=
        2e-4);

  std::map<double, Summary> zero_delta;
  zero_delta[0.5] = Summary{0.9, 0.0, 0.0, 5};
  zero_delta[1.0] = Summary{0.95, 0.0, 0.0, 5};
  CHECK(stats::average_relative_uncertainty(zero_delta, 0.0) == 0.0);

  // scale invariance
  std::map<double, Summary> scaled;
  for (const auto& [x, s] : by_x) scaled[x] = Summary{s.mean * 2, s.delta * 2, 0, 5};
  CHECK(stats::average_relative_uncertainty(scaled, 0.015) ==
        doctest::Approx(stats::average_relative_uncertainty(by_x, 0.015))
            .epsilon(1e-12));
}

TEST_CASE("global average matches the published bottom row") {
  const std::vector<double> original = {0.0494, 0.0436, 0.0060, 0.0361, 0.0756};
  CHECK(std::fabs(stats::global_average_relative_uncertainty(original) - 0.0421) <=
        2e-4);
  const std::vector<double> stable = {0.0025, 0.0014, 0.0024, 0.0034, 0.0045};
  CHECK(std::fabs(stats::global_average_relative_uncertainty(stable) - 0.0028) <=
        2e-4);
  const std::vector<double> single = {0.37};
  CHECK(stats::global_average_relative_uncertainty(single) == 0.37);
}

TEST_CASE("gain weighs f1 differences by the scaling factor") {
  const std::map<double, double> at_p = {{0.5, 0.8}, {1.0, 0.9}};
  const std::map<double, double> at_p_minus_2 = {{0.5, 0.7}, {1.0, 0.9}};
  CHECK(stats::gain(at_p, at_p_minus_2) == doctest::Approx(0.05));
  CHECK(stats::gain(at_p, at_p) == 0.0);
  const std::map<double, double> worse = {{0.5, 0.6}, {1.0, 0.8}};
  CHECK(stats::gain(worse, at_p) < 0.0);
  const std::map<double, double> other_grid = {{0.25, 0.7}, {1.0, 0.9}};
  CHECK_THROWS_AS(stats::gain(at_p, other_grid), std::invalid_argument);
}

TEST_CASE("quadratic fit recovers planted coefficients") {
  const double a0 = 0.9, a1 = 0.05, a2 = 0.001;
  std::vector<stats::FitPoint> points;
  for (double z : {0.1, 0.3, 0.7, 1.2, 1.9, 2.6, 3.0}) {
    points.push_back({z, a0 - a1 * z - a2 * z * z, 0.002});
  }
  const auto fit = stats::fit_quadratic(points);
  CHECK(std::fabs(fit.coeff[0] - a0) < 1e-8);
  CHECK(std::fabs(fit.coeff[1] - a1) < 1e-8);
  CHECK(std::fabs(fit.coeff[2] - a2) < 1e-8);
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("constant data yields a constant fit") {
  std::vector<stats::FitPoint> points;
  for (double z : {0.2, 0.9, 1.7, 2.4}) points.push_back({z, 0.42, 0.01});
  const auto fit = stats::fit_quadratic(points);
  CHECK(fit.coeff[0] == doctest::Approx(0.42).epsilon(1e-10));
  CHECK(std::fabs(fit.coeff[1]) < 1e-9);
  CHECK(std::fabs(fit.coeff[2]) < 1e-9);
}

TEST_CASE("fit enforces non-negative coefficients by clipped refitting") {
  // increasing f1 in z would need a negative a1; the constrained fit drops it
  std::vector<stats::FitPoint> points = {
      {0.1, 0.70, 0.01}, {0.5, 0.74, 0.01}, {1.0, 0.79, 0.01}, {2.0, 0.87, 0.01}};
  const auto fit = stats::fit_quadratic(points);
  CHECK(fit.coeff[0] >= 0.0);
  CHECK(fit.coeff[1] >= 0.0);
  CHECK(fit.coeff[2] >= 0.0);
  // predictions stay monotone (non-decreasing in n*x means non-increasing in z)
  double prev = stats::fit_predict(fit, 0.0);
  for (double z = 0.1; z < 3.0; z += 0.1) {
    const double cur = stats::fit_predict(fit, z);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("underdetermined or degenerate fits are rejected") {
  std::vector<stats::FitPoint> two = {{0.1, 0.9, 0.01}, {0.9, 0.8, 0.01}};
  CHECK_THROWS_AS(stats::fit_quadratic(two), std::invalid_argument);
  std::vector<stats::FitPoint> duplicated = {
      {0.5, 0.9, 0.01}, {0.5, 0.9, 0.01}, {0.5, 0.9, 0.01}};
  CHECK_THROWS_AS(stats::fit_quadratic(duplicated), std::invalid_argument);
}

TEST_CASE("weighted fit favours low-uncertainty points") {
  // two exact-model points with tiny uncertainty plus one heavy outlier with
  // huge uncertainty: the fit should track the exact model closely
  const double a0 = 0.8, a1 = 0.1;
  std::vector<stats::FitPoint> points = {
      {0.2, a0 - a1 * 0.2, 1e-4},
      {1.0, a0 - a1 * 1.0, 1e-4},
      {2.0, a0 - a1 * 2.0, 1e-4},
      {3.0, 0.1, 0.5},
  };
  const auto fit = stats::fit_quadratic(points);
  CHECK(stats::fit_predict(fit, 0.2) == doctest::Approx(a0 - a1 * 0.2).epsilon(1e-3));
  CHECK(stats::fit_predict(fit, 1.0) == doctest::Approx(a0 - a1 * 1.0).epsilon(1e-3));
}

TEST_CASE("epoch threshold replacement is a plain minimum") {
  CHECK(stats::apply_epoch_threshold(25.0, 20.0) == 20.0);
  CHECK(stats::apply_epoch_threshold(10.0, 20.0) == 10.0);
  CHECK(stats::apply_epoch_threshold(20.0, 20.0) == 20.0);
  CHECK_THROWS_AS(stats::apply_epoch_threshold(-1.0, 5.0), std::invalid_argument);
}
