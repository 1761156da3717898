#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "belldist/estimator.hpp"
#include "test_util.hpp"

using namespace belldist;

namespace {
const BellDiagonalState kLossy{0.62, 0.15, 0.05, 0.18};
const CoincidenceProbabilities kLossyP{0.578732, 0.5578, 0.366866};

RunSummary summary_from_counts(std::uint64_t n, std::uint64_t cz, std::uint64_t cx,
                               std::uint64_t cxz, std::uint64_t seed = 0) {
  RunSummary s;
  s.n = n;
  s.count_z = cz;
  s.count_x = cx;
  s.count_xz = cxz;
  s.master_seed = seed;
  return s;
}
}  // namespace

TEST_CASE("hoeffding_delta reference values") {
  CHECK(std::abs(hoeffding_delta(10000, 0.01) - 2.0 * std::exp(-2.0)) < 1e-15);
  CHECK(std::abs(hoeffding_delta(10, 0.5) - 2.0 * std::exp(-5.0)) < 1e-15);
  const double tiny = hoeffding_delta(1000000, 0.05);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-18);
  CHECK(hoeffding_delta(1, 0.001) == 1.0);  // clamped at one
  CHECK_THROWS_AS(hoeffding_delta(0, 0.1), std::domain_error);
  CHECK_THROWS_AS(hoeffding_delta(10, 0.0), std::domain_error);
}

TEST_CASE("band_x1 shapes") {
  // Upper clamp at p = 1 kills the right side.
  ParamBand band = band_x1(1.0, 0.05, 1000);
  CHECK(band.eps_right == 0.0);
  CHECK(band.eps_left > 0.0);
  CHECK(band.eps == band.eps_left);
  CHECK(band.delta == hoeffding_delta(1000, 0.05));

  // Concave inversion: left side exceeds right side away from the clamp.
  band = band_x1(0.578732, 0.01, 1000);
  CHECK(band.eps_left > band.eps_right);
  CHECK(band.eps_right > 0.0);
  CHECK(band.eps == band.eps_left);

  // Lower clamp engages when eps crosses the 1/2 boundary.
  band = band_x1(0.51, 0.02, 1000);
  const double x_hat = invert_x1(0.51);
  CHECK(std::abs(band.eps_left - (x_hat - 0.5)) < 1e-15);

  CHECK_THROWS_AS(band_x1(0.5, 0.01, 1000), InversionDomainError);
  CHECK_THROWS_AS(band_x1(0.49, 0.01, 1000), InversionDomainError);
}

TEST_CASE("band_x2 shapes") {
  ParamBand band = band_x2(1.0, 0.05, 1000);
  CHECK(band.eps_right == 0.0);
  CHECK(band.eps_left > 0.0);

  band = band_x2(0.5578, 0.01, 1000);
  CHECK(band.eps_left > 0.0);
  CHECK(band.eps_right > 0.0);
  CHECK(band.eps == std::max(band.eps_left, band.eps_right));

  band = band_x2(0.505, 0.02, 1000);
  const double x_hat = invert_x2(0.505);
  CHECK(std::abs(band.eps_left - (x_hat - 0.5)) < 1e-15);

  CHECK_THROWS_AS(band_x2(0.5, 0.01, 1000), InversionDomainError);
}

TEST_CASE("band_x3 shapes") {
  const ErrorBudget tiny{1e-4, 1e-4, 1e-4, 10000};
  ParamBand band = band_x3(CoincidenceProbabilities{1.0, 1.0, 1.0}, tiny);
  CHECK(band.eps_right == 0.0);  // upper bound truncates at x3 = 1
  CHECK(band.eps_left > 0.0);
  CHECK(band.delta ==
        hoeffding_delta(10000, 1e-4) * 3);  // all three deltas identical here

  const ErrorBudget mid{0.005, 0.005, 0.005, 10000};
  band = band_x3(kLossyP, mid);
  const ParamBand b1 = band_x1(kLossyP.p_z, 0.005, 10000);
  const ParamBand b2 = band_x2(kLossyP.p_x, 0.005, 10000);
  CHECK(band.eps > b1.eps);
  CHECK(band.eps > b2.eps);
  CHECK(std::abs(band.delta - (3.0 * hoeffding_delta(10000, 0.005))) < 1e-15);

  // Pessimistic corner leaves the reals.
  const ErrorBudget big{0.05, 0.05, 0.05, 10000};
  CHECK_THROWS_AS(band_x3(CoincidenceProbabilities{0.52, 0.52, 0.26}, big),
                  InversionDomainError);
}

TEST_CASE("band_x3 delta is the sum of the three Hoeffding deltas") {
  const ErrorBudget budget{0.004, 0.007, 0.013, 5000};
  const ParamBand band = band_x3(kLossyP, budget);
  const double expected = hoeffding_delta(5000, 0.004) + hoeffding_delta(5000, 0.007) +
                          hoeffding_delta(5000, 0.013);
  CHECK(band.delta == expected);
}

TEST_CASE("estimate succeeds on all-coincidence counts") {
  const EstimateResult r = estimate(summary_from_counts(100, 100, 100, 100), 0.01, 0.01, 0.01);
  REQUIRE(succeeded(r));
  const EstimateReport& report = std::get<EstimateReport>(r);
  CHECK(report.q_hat.q1 == 1.0);
  CHECK(report.q_hat.q2 == 0.0);
  CHECK(report.q_hat.q3 == 0.0);
  CHECK(report.q_hat.q4 == 0.0);
  CHECK(report.eps_t > 0.0);
  for (const ParamBand& band : report.bands) CHECK(band.eps_right == 0.0);
}

TEST_CASE("estimate reproduces the exact inversion chain") {
  // Counts chosen so the empirical probabilities hit the reference values
  // exactly: 578732/10^6 etc.
  const EstimateResult r =
      estimate(summary_from_counts(1000000, 578732, 557800, 366866), 0.001, 0.001, 0.001);
  REQUIRE(succeeded(r));
  const EstimateReport& report = std::get<EstimateReport>(r);
  CHECK(std::abs(report.x_hat.x1 - 0.77) < 1e-12);
  CHECK(std::abs(report.x_hat.x2 - 0.67) < 1e-12);
  CHECK(std::abs(report.x_hat.x3 - 0.80) < 1e-12);
  CHECK(std::abs(report.q_hat.q1 - 0.62) < 1e-12);
  CHECK(std::abs(report.q_hat.q2 - 0.15) < 1e-12);
  CHECK(std::abs(report.q_hat.q3 - 0.05) < 1e-12);
  CHECK(std::abs(report.q_hat.q4 - 0.18) < 1e-12);
}

TEST_CASE("estimate fails on an inadmissible Z marginal") {
  const EstimateResult r = estimate(summary_from_counts(100, 49, 60, 30), 0.01, 0.01, 0.01);
  REQUIRE_FALSE(succeeded(r));
  const EstimationFailure& f = std::get<EstimationFailure>(r);
  CHECK(f.failed_x[0]);
  CHECK(f.eps_t == 1.0);
  CHECK(f.delta_t == 1.0);
  CHECK_FALSE(f.reason.empty());
}

TEST_CASE("estimate fails when x3 leaves the reals at the data") {
  // p_hat = (0.52, 0.52, 0.26): the x3 radicand is already negative at the
  // point estimate, so only the third parameter is flagged.
  const EstimateResult r =
      estimate(summary_from_counts(100, 52, 52, 26), 0.05, 0.05, 0.05);
  REQUIRE_FALSE(succeeded(r));
  const EstimationFailure& f = std::get<EstimationFailure>(r);
  CHECK_FALSE(f.failed_x[0]);
  CHECK_FALSE(f.failed_x[1]);
  CHECK(f.failed_x[2]);
}

TEST_CASE("estimate fails when only a band corner leaves the reals") {
  // Probabilities of x = (0.77, 0.67, 0.55): the point inversion succeeds,
  // but the lower x3 corner radicand 0.0054 - 8 eps goes negative at
  // eps = 0.005.
  const CoincidenceProbabilities p{0.578732, 0.5578, 0.319616};
  CHECK(std::abs(invert_x3(p) - 0.55) < 1e-12);
  const EstimateResult r =
      estimate(summary_from_counts(1000000, 578732, 557800, 319616), 0.005, 0.005, 0.005);
  REQUIRE_FALSE(succeeded(r));
  const EstimationFailure& f = std::get<EstimationFailure>(r);
  CHECK_FALSE(f.failed_x[0]);
  CHECK_FALSE(f.failed_x[1]);
  CHECK(f.failed_x[2]);
}

TEST_CASE("estimate validates inputs") {
  CHECK_THROWS_AS(estimate(summary_from_counts(0, 0, 0, 0), 0.01, 0.01, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate(summary_from_counts(100, 10, 10, 50), 0.01, 0.01, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate(summary_from_counts(100, 90, 90, 80), 0.0, 0.01, 0.01),
                  std::domain_error);
  CHECK_THROWS_AS(estimate(summary_from_counts(100, 90, 90, 80), 0.01, 1.0, 0.01),
                  std::domain_error);
}

TEST_CASE("report sums are exact and the vacuous flag fires") {
  const EstimateResult r =
      estimate(summary_from_counts(1000, 800, 800, 700), 0.001, 0.001, 0.001);
  REQUIRE(succeeded(r));
  const EstimateReport& report = std::get<EstimateReport>(r);
  CHECK(report.eps_t ==
        report.bands[0].eps + report.bands[1].eps + report.bands[2].eps);
  CHECK(report.delta_t_raw ==
        report.bands[0].delta + report.bands[1].delta + report.bands[2].delta);
  // 2 exp(-2*1000*1e-6) is nearly 2, so every delta clamps at 1; the sum is 5.
  CHECK(report.delta_t_raw == 5.0);
  CHECK(report.delta_t == 1.0);
  CHECK(report.vacuous);

  const EstimateResult tight =
      estimate(summary_from_counts(100000, 80000, 80000, 70000), 0.01, 0.01, 0.01);
  REQUIRE(succeeded(tight));
  const EstimateReport& treport = std::get<EstimateReport>(tight);
  CHECK_FALSE(treport.vacuous);
  CHECK(treport.delta_t == treport.delta_t_raw);
}

TEST_CASE("band correctness: probability coverage transfers to x coverage") {
  const XVector x_true = q_to_x(kLossy);
  const CoincidenceProbabilities p_true = coincidence_probabilities(x_true);
  const double eps = 0.01;
  RandomStream seeds(777);
  int covered_trials = 0;
  for (int t = 0; t < 300; ++t) {
    const RunSummary s = run(kLossy, 20000, seeds.next_u64());
    const CoincidenceProbabilities p_hat = s.empirical();
    const bool p_covered = std::abs(p_hat.p_z - p_true.p_z) <= eps &&
                           std::abs(p_hat.p_x - p_true.p_x) <= eps &&
                           std::abs(p_hat.p_xz - p_true.p_xz) <= eps;
    const EstimateResult r = estimate(s, eps, eps, eps);
    if (!p_covered || !succeeded(r)) continue;
    ++covered_trials;
    const EstimateReport& report = std::get<EstimateReport>(r);
    CHECK(std::abs(report.x_hat.x1 - x_true.x1) <= report.bands[0].eps + 1e-12);
    CHECK(std::abs(report.x_hat.x2 - x_true.x2) <= report.bands[1].eps + 1e-12);
    CHECK(std::abs(report.x_hat.x3 - x_true.x3) <= report.bands[2].eps + 1e-12);
  }
  CHECK(covered_trials > 250);  // the condition holds in almost every trial
}

TEST_CASE("bound soundness on seeded end-to-end trials") {
  // n large enough that delta_t is far from vacuous, making the check sharp.
  const double eps = 0.01;
  RandomStream seeds(4242);
  int miss = 0;
  const int trials = 300;
  double delta_t = 1.0;
  for (int t = 0; t < trials; ++t) {
    const RunSummary s = run(kLossy, 100000, seeds.next_u64(), 4);
    const EstimateResult r = estimate(s, eps, eps, eps);
    REQUIRE(succeeded(r));
    const EstimateReport& report = std::get<EstimateReport>(r);
    delta_t = report.delta_t;
    CHECK_FALSE(report.vacuous);
    if (trace_distance(report.q_hat, kLossy) >= report.eps_t) ++miss;
  }
  const double fraction = static_cast<double>(miss) / trials;
  const double slack = 3.0 * std::sqrt(delta_t * (1.0 - delta_t) / trials + 1e-12);
  CHECK(fraction <= delta_t + slack);
}

TEST_CASE("widening a probability error never narrows a parameter band") {
  RandomStream stream(31337);
  for (int i = 0; i < 200; ++i) {
    const XVector x = test::random_admissible_x(stream);
    const CoincidenceProbabilities p = coincidence_probabilities(x);
    const double ez = 0.001 + 0.01 * stream.next_unit();
    const double ex = 0.001 + 0.01 * stream.next_unit();
    const double exz = 0.001 + 0.01 * stream.next_unit();
    const std::uint64_t n = 10000;

    const auto widths = [&](double az, double ax, double axz) -> std::array<double, 3> {
      try {
        const ParamBand b1 = band_x1(p.p_z, az, n);
        const ParamBand b2 = band_x2(p.p_x, ax, n);
        const ParamBand b3 = band_x3(p, ErrorBudget{az, ax, axz, n});
        return {b1.eps, b2.eps, b3.eps};
      } catch (const InversionDomainError&) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, inf};
      }
    };
    const std::array<double, 3> base = widths(ez, ex, exz);
    if (std::isinf(base[0])) continue;
    for (int j = 0; j < 3; ++j) {
      const std::array<double, 3> grown =
          widths(ez * (j == 0 ? 1.5 : 1.0), ex * (j == 1 ? 1.5 : 1.0),
                 exz * (j == 2 ? 1.5 : 1.0));
      for (int k = 0; k < 3; ++k) {
        CHECK(grown[k] >= base[k] - 1e-14);
      }
    }
  }
}

TEST_CASE("distilled estimate reference cases") {
  EstimateReport report;
  report.q_hat = BellDiagonalState{1.0, 0.0, 0.0, 0.0};
  report.eps_t = 0.01;
  const auto d = distilled_estimate(report);
  REQUIRE(d.has_value());
  CHECK(d->q_d_hat.q1 == 1.0);
  CHECK(d->pi_hat == 1.0);
  CHECK(std::abs(d->eps_d - 0.02 / 0.98) < 1e-15);

  // pi - 2 eps_t <= 0: no certificate.
  EstimateReport weak;
  weak.q_hat = x_to_q(XVector{0.55, 0.55, 0.55});
  weak.eps_t = 0.2;
  CHECK(distilled_map(weak.q_hat).pi_xz < 0.4);
  CHECK_FALSE(distilled_estimate(weak).has_value());
}

TEST_CASE("distilled estimate on the reference noisy state") {
  const EstimateResult r =
      estimate(summary_from_counts(1000000, 578732, 557800, 366866), 0.002, 0.002, 0.002);
  REQUIRE(succeeded(r));
  const EstimateReport& report = std::get<EstimateReport>(r);
  const auto d = distilled_estimate(report);
  REQUIRE(d.has_value());
  CHECK(d->q_d_hat.q1 > 0.62);
  CHECK(std::abs(d->pi_hat - 0.366866) < 1e-9);
  CHECK(std::abs(d->eps_d - 2.0 * report.eps_t / (d->pi_hat - 2.0 * report.eps_t)) < 1e-15);
}

TEST_CASE("distilled certificate transfers from the undistilled one") {
  const DistillationResult truth = distilled_map(kLossy);
  RandomStream seeds(999);
  int applied = 0;
  for (int t = 0; t < 200; ++t) {
    const RunSummary s = run(kLossy, 20000, seeds.next_u64());
    const EstimateResult r = estimate(s, 0.01, 0.01, 0.01);
    REQUIRE(succeeded(r));
    const EstimateReport& report = std::get<EstimateReport>(r);
    if (trace_distance(report.q_hat, kLossy) >= report.eps_t) continue;
    const auto d = distilled_estimate(report);
    if (!d) continue;
    ++applied;
    CHECK(trace_distance(d->q_d_hat, truth.survivor_state) <= d->eps_d + 1e-12);
  }
  CHECK(applied > 150);
}
