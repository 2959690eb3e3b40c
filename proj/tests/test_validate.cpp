#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ccp/solver.hpp"
#include "ccp/validate.hpp"
#include "test_util.hpp"

using namespace ccp;

namespace {

const std::vector<std::string> kGenerators = {"normal", "pearson7(5)",
                                              "power_exponential(1)"};

Solution solved_example2(const EstimatorSet& est) {
  const ProblemSpec spec = testutil::example2_spec();
  return solve(build_program(spec, est));
}

}  // namespace

TEST_CASE("studentized mean is t distributed for every shipped generator") {
  const auto reports = invariance_test(kGenerators, 10, 2000, 20240901);
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) {
    CHECK(r.ks_statistic >= 0.0);
    CHECK(r.ks_statistic <= 1.0);
    CHECK_MESSAGE(r.pass, r.generator_id << " ks=" << r.ks_statistic);
  }
}

TEST_CASE("mis-scaled statistic is detected (negative control)") {
  const auto reports = invariance_test({"normal"}, 10, 2000, 20240901, true);
  REQUIRE(reports.size() == 1);
  CHECK_FALSE(reports[0].pass);
}

TEST_CASE("invariance test contracts") {
  const auto small = invariance_test({"normal"}, 3, 100, 5);
  CHECK(std::isfinite(small[0].ks_statistic));
  CHECK(small[0].ks_statistic >= 0.0);
  CHECK(small[0].ks_statistic <= 1.0);

  CHECK_THROWS_AS(invariance_test({"normal"}, 2, 100, 5), std::invalid_argument);
  CHECK_THROWS_AS(invariance_test({"normal"}, 10, 50, 5), std::invalid_argument);
  CHECK_THROWS_AS(invariance_test({"no_such_family"}, 10, 100, 5), std::invalid_argument);

  const auto a = invariance_test({"pearson7(5)"}, 10, 200, 7);
  const auto b = invariance_test({"pearson7(5)"}, 10, 200, 7);
  CHECK(a[0].ks_statistic == b[0].ks_statistic);
}

TEST_CASE("KS helper values") {
  CHECK(ks_critical_value(2000, 0.01) == doctest::Approx(0.036295).epsilon(1e-3));
  CHECK(ks_critical_value(100, 0.05) == doctest::Approx(0.13403).epsilon(1e-3));
  CHECK_THROWS_AS(ks_critical_value(100, 0.2), std::invalid_argument);

  // Perfectly placed sample has tiny KS distance; shifted one is large.
  std::vector<double> ideal;
  const TStudent dist{9};
  for (int i = 1; i <= 99; ++i) ideal.push_back(t_quantile(dist, i / 100.0));
  CHECK(ks_statistic_t(ideal, dist) < 0.02);
  for (double& v : ideal) v += 2.0;
  CHECK(ks_statistic_t(ideal, dist) > 0.3);
}

TEST_CASE("Wilson interval") {
  const auto [lo, hi] = wilson_interval(95, 100);
  // Independent recomputation of the score interval.
  const double z = 1.959963984540054, p = 0.95, m = 100;
  const double denom = 1 + z * z / m;
  const double center = (p + z * z / (2 * m)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / m + z * z / (4 * m * m)) / denom;
  CHECK(lo == doctest::Approx(center - half).epsilon(1e-12));
  CHECK(hi == doctest::Approx(center + half).epsilon(1e-12));
  CHECK(wilson_interval(100, 100).second == doctest::Approx(1.0));
  CHECK(wilson_interval(0, 100).first == doctest::Approx(0.0));
  CHECK_THROWS_AS(wilson_interval(1, 0), std::invalid_argument);
}

TEST_CASE("coverage at the solved point reaches the nominal rate") {
  const SampleMap samples = testutil::example_samples();
  const ProblemSpec spec = testutil::example2_spec();
  const EstimatorSet est = estimate_all(spec, samples);
  const Solution sol = solved_example2(est);
  REQUIRE(sol.status == SolveStatus::optimal);

  std::vector<CoverageReport> reports;
  for (const auto& gen : kGenerators) {
    const CoverageReport rep = coverage_test(spec, est, sol.x, gen, 5000, 31);
    REQUIRE(rep.constraints.size() == 3);
    for (const auto& cc : rep.constraints) {
      CHECK(cc.nominal == doctest::Approx(0.99));
      const double half = 0.5 * (cc.wilson_high - cc.wilson_low);
      CHECK_MESSAGE(cc.rate >= cc.nominal - half, gen << " rate=" << cc.rate);
      CHECK(cc.pass);
    }
    CHECK(rep.all_pass);
    reports.push_back(rep);
  }

  // Cross-generator stability: under 3 half-widths apart.
  for (std::size_t i = 0; i < 3; ++i) {
    const double half =
        0.5 * (reports[0].constraints[i].wilson_high - reports[0].constraints[i].wilson_low);
    for (std::size_t g = 1; g < reports.size(); ++g)
      CHECK(std::abs(reports[g].constraints[i].rate - reports[0].constraints[i].rate) <
            3.0 * half);
  }
}

TEST_CASE("median risk with slack keeps at least half coverage") {
  const SampleMap samples = testutil::example_samples();
  const ProblemSpec spec = testutil::example2_spec(0.5);
  const EstimatorSet est = estimate_all(spec, samples);
  // Interior point with slack in every row.
  const Eigen::Vector3d x(10.0, 10.0, 10.0);
  const CoverageReport rep = coverage_test(spec, est, x, "normal", 4000, 17);
  for (const auto& cc : rep.constraints) {
    CHECK(cc.nominal == doctest::Approx(0.5));
    CHECK(cc.rate >= 0.5);
  }
}

TEST_CASE("zero-variance data gives certain coverage at a feasible point") {
  SampleMap samples;
  for (int i = 0; i < 3; ++i)
    samples["a" + std::to_string(i + 1)] =
        SampleSet{"a" + std::to_string(i + 1), testutil::row_a(i).transpose().replicate(25, 1)};
  const ProblemSpec spec = testutil::example2_spec();
  const EstimatorSet est = estimate_all(spec, samples);
  const Eigen::Vector3d x(5.0, 5.0, 5.0);
  const CoverageReport rep = coverage_test(spec, est, x, "pearson7(5)", 500, 3);
  for (const auto& cc : rep.constraints) CHECK(cc.rate == doctest::Approx(1.0));
}

TEST_CASE("coverage works on limit-side and joint randomness too") {
  const SampleMap samples = testutil::example_samples();

  const ProblemSpec s3 = testutil::example3_spec();
  const EstimatorSet est3 = estimate_all(s3, samples);
  const Solution sol3 = solve(build_program(s3, est3));
  REQUIRE(sol3.status == SolveStatus::optimal);
  const CoverageReport rep3 = coverage_test(s3, est3, sol3.x, "normal", 5000, 23);
  for (const auto& cc : rep3.constraints) {
    const double half = 0.5 * (cc.wilson_high - cc.wilson_low);
    CHECK(cc.rate >= 0.99 - half);
  }

  const ProblemSpec s4 = testutil::example4_spec(0.5);
  const EstimatorSet est4 = estimate_all(s4, samples);
  const Solution sol4 = solve(build_program(s4, est4));
  REQUIRE(sol4.status == SolveStatus::optimal);
  const CoverageReport rep4 = coverage_test(s4, est4, sol4.x, "pearson7(5)", 5000, 23);
  for (const auto& cc : rep4.constraints) {
    const double half = 0.5 * (cc.wilson_high - cc.wilson_low);
    CHECK(cc.rate >= 0.99 - half);
  }
}

TEST_CASE("coverage reports are deterministic and validated") {
  const SampleMap samples = testutil::example_samples();
  const ProblemSpec spec = testutil::example2_spec();
  const EstimatorSet est = estimate_all(spec, samples);
  const Eigen::Vector3d x(10.0, 10.0, 10.0);
  const CoverageReport a = coverage_test(spec, est, x, "normal", 1000, 77);
  const CoverageReport b = coverage_test(spec, est, x, "normal", 1000, 77);
  for (std::size_t i = 0; i < a.constraints.size(); ++i)
    CHECK(a.constraints[i].rate == b.constraints[i].rate);

  CHECK_THROWS_AS(coverage_test(spec, est, Eigen::Vector2d(1, 1), "normal", 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(coverage_test(spec, est, x, "mystery", 100, 1), std::invalid_argument);
}
