#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ccp/solver.hpp"
#include "ccp/transform.hpp"
#include "test_util.hpp"

using namespace ccp;

namespace {

const double kEta = 2.4921594731575762;  // upper 99% t quantile at 24 dof

EstimatorSet estimators_for(const ProblemSpec& spec) {
  return estimate_all(spec, testutil::example_samples());
}

}  // namespace

TEST_CASE("case detection") {
  CHECK(detect_case(testutil::example1_spec(0.5)) == CaseTag::I);
  CHECK(detect_case(testutil::example2_spec()) == CaseTag::II);
  CHECK(detect_case(testutil::example3_spec()) == CaseTag::III);
  CHECK(detect_case(testutil::example4_spec(0.5)) == CaseTag::IV);
  CHECK(to_string(CaseTag::IV) == "IV");

  // Random c plus random b but fixed rows is not one of the four shapes.
  ProblemSpec mixed = testutil::example3_spec();
  mixed.objective = RandomRef{"c"};
  CHECK_THROWS_WITH_AS(detect_case(mixed),
                       doctest::Contains("UNSUPPORTED_MIX"), std::invalid_argument);

  ProblemSpec mixed2 = testutil::example2_spec();
  mixed2.constraints[2].rhs = JointRandomRef{"g3"};
  CHECK_THROWS_AS(detect_case(mixed2), std::invalid_argument);
}

TEST_CASE("cov_root reproduces the quadratic form") {
  Eigen::Matrix3d m;
  m << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Eigen::MatrixXd l = cov_root(m);
  const Eigen::Vector3d x(0.3, -1.2, 2.0);
  CHECK((l * x).squaredNorm() == doctest::Approx(x.dot(m * x)));

  Eigen::Matrix2d indef;
  indef << 1, 0, 0, -1;
  CHECK_THROWS_AS(cov_root(indef), std::runtime_error);

  Eigen::Matrix2d tiny_neg = Eigen::Matrix2d::Identity();
  tiny_neg(1, 1) = -1e-14;  // within clamping tolerance
  const Eigen::MatrixXd lr = cov_root(tiny_neg);
  CHECK((lr.transpose() * lr)(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("random-objective program carries the dispersion penalty") {
  const ProblemSpec spec = testutil::example1_spec(0.5);
  const DeterministicProgram prog = build_case1(spec, *estimators_for(spec).objective);

  CHECK(prog.sense == Sense::maximize);
  CHECK((prog.linear_objective - 0.5 * testutil::profits_c()).norm() < 1e-9);
  REQUIRE(prog.cone_objective.has_value());
  CHECK(prog.cone_objective->kappa == doctest::Approx(-0.5));
  const Eigen::Vector3d x(1.0, 2.0, 3.0);
  const double var_form = (450 * 1.0 + 2600 * 4.0 + 850 * 9.0) / 12.0;
  CHECK((prog.cone_objective->root * x).squaredNorm() == doctest::Approx(var_form).epsilon(1e-9));
  // Full objective value against the closed form.
  const double expected = 0.5 * testutil::profits_c().dot(x) - 0.5 * std::sqrt(var_form);
  CHECK(prog.objective_value(x) == doctest::Approx(expected).epsilon(1e-9));

  CHECK(static_cast<int>(prog.constraints.size()) == 3);
  CHECK_FALSE(prog.constraints[0].cone.has_value());
  CHECK(prog.constraints[0].linear.isApprox(testutil::row_a(0)));
  CHECK(prog.constraints[0].offset == doctest::Approx(-1000.0));
}

TEST_CASE("weight collapse drops the objective cone") {
  const ProblemSpec spec = testutil::example1_spec(1.0);
  const DeterministicProgram prog = build_case1(spec, *estimators_for(spec).objective);
  CHECK_FALSE(prog.cone_objective.has_value());
  CHECK((prog.linear_objective - testutil::profits_c()).norm() < 1e-9);
}

TEST_CASE("zero objective dispersion collapses to the weighted mean") {
  ProblemSpec spec = testutil::example1_spec(0.5);
  SampleMap samples = testutil::example_samples();
  samples["c"].data.rowwise() = testutil::profits_c().transpose();
  const EstimatorSet est = estimate_all(spec, samples);
  const DeterministicProgram prog = build_case1(spec, *est.objective);
  CHECK_FALSE(prog.cone_objective.has_value());
}

TEST_CASE("random-row constraints get the t-quantile cone") {
  const ProblemSpec spec = testutil::example2_spec();
  const DeterministicProgram prog = build_case2(spec, estimators_for(spec).rows);

  REQUIRE(static_cast<int>(prog.constraints.size()) == 3);
  const auto& c0 = prog.constraints[0];
  CHECK((c0.linear - testutil::row_a(0)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(c0.offset == doctest::Approx(-1000.0));
  REQUIRE(c0.cone.has_value());
  CHECK(c0.cone->kappa == doctest::Approx(kEta / 5.0).epsilon(1e-10));
  CHECK_FALSE(c0.cone->uses_augmented);
  const Eigen::Vector3d x(1.0, 1.0, 1.0);
  CHECK((c0.cone->root * x).squaredNorm() == doctest::Approx(30.0 + 10.0 + 12.0).epsilon(1e-9));
  // Whole constraint against the printed closed form.
  const double expected =
      testutil::row_a(0).dot(x) + kEta * std::sqrt((30.0 + 10.0 + 12.0) / 25.0) - 1000.0;
  CHECK(prog.constraint_value(0, x) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("median risk level removes the row cone") {
  const ProblemSpec spec = testutil::example2_spec(0.5);
  const DeterministicProgram prog = build_case2(spec, estimators_for(spec).rows);
  for (const auto& c : prog.constraints) CHECK_FALSE(c.cone.has_value());
}

TEST_CASE("risk above one half is rejected as nonconvex") {
  const ProblemSpec spec = testutil::example2_spec(0.7);
  CHECK_THROWS_AS(build_case2(spec, estimators_for(spec).rows), std::invalid_argument);
  const ProblemSpec spec4 = testutil::example4_spec(0.5, 0.7);
  const EstimatorSet est4 = estimators_for(spec4);
  CHECK_THROWS_AS(build_case4(spec4, *est4.objective, est4.joint), std::invalid_argument);
}

TEST_CASE("random-limit case is a pure LP with tightened offsets") {
  const ProblemSpec spec = testutil::example3_spec();
  const DeterministicProgram prog = build_case3(spec, *estimators_for(spec).rhs);
  CHECK_FALSE(prog.has_cones());
  // offset = -b_bar - (delta/sqrt(N)) s*, delta = -eta.
  const double expected0 = -1000.0 - (-kEta / 5.0) * std::sqrt(5000.0);
  const double expected1 = -1500.0 - (-kEta / 5.0) * std::sqrt(4000.0);
  const double expected2 = -750.0 - (-kEta / 5.0) * std::sqrt(500.0);
  CHECK(prog.constraints[0].offset == doctest::Approx(expected0).epsilon(1e-9));
  CHECK(prog.constraints[1].offset == doctest::Approx(expected1).epsilon(1e-9));
  CHECK(prog.constraints[2].offset == doctest::Approx(expected2).epsilon(1e-9));
  CHECK(prog.constraints[0].linear.isApprox(testutil::row_a(0)));
}

TEST_CASE("zero limit variance reduces to the nominal constraint") {
  ProblemSpec spec = testutil::example3_spec();
  SampleMap samples = testutil::example_samples();
  samples["b"].data.rowwise() = testutil::limits_b().transpose();
  const EstimatorSet est = estimate_all(spec, samples);
  const DeterministicProgram prog = build_case3(spec, *est.rhs);
  CHECK(prog.constraints[0].offset == doctest::Approx(-1000.0));
}

TEST_CASE("joint case augments the cone with the limit variance") {
  const ProblemSpec spec = testutil::example4_spec(0.5);
  const EstimatorSet est = estimators_for(spec);
  const DeterministicProgram prog = build_case4(spec, *est.objective, est.joint);

  REQUIRE(prog.cone_objective.has_value());  // same objective as the random-c case
  const auto& c0 = prog.constraints[0];
  CHECK((c0.linear - testutil::row_a(0)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(c0.offset == doctest::Approx(-1000.0).epsilon(1e-10));
  REQUIRE(c0.cone.has_value());
  CHECK(c0.cone->uses_augmented);
  CHECK(c0.cone->kappa == doctest::Approx(kEta / 5.0).epsilon(1e-10));
  const Eigen::Vector3d x(1.0, 1.0, 1.0);
  // Constraint value matches the closed form with the +5000 limit-variance term.
  const double expected = testutil::row_a(0).dot(x) - 1000.0 +
                          kEta * std::sqrt((30.0 + 10.0 + 12.0 + 5000.0) / 25.0);
  CHECK(prog.constraint_value(0, x) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("joint case with degenerate limit column matches the random-row build") {
  // Joint samples whose last column is constant and uncorrelated: the built
  // constraints must agree with the random-row transform on the same rows.
  SampleMap samples;
  ProblemSpec spec2 = testutil::example2_spec();
  ProblemSpec spec4 = testutil::example4_spec(1.0);
  for (int i = 0; i < 3; ++i) {
    const std::string aid = "a" + std::to_string(i + 1);
    samples[aid] = testutil::make_sample(aid, testutil::row_a(i), testutil::var_a(i), 25,
                                         700 + i);
    SampleSet g;
    g.id = "g" + std::to_string(i + 1);
    g.data.resize(25, 4);
    g.data.leftCols(3) = samples[aid].data;
    g.data.col(3).setConstant(testutil::limits_b()(i));
    samples[g.id] = g;
  }
  samples["c"] = testutil::make_sample("c", testutil::profits_c(), testutil::var_c(), 12, 9);

  const EstimatorSet est2 = estimate_all(spec2, samples);
  const EstimatorSet est4 = estimate_all(spec4, samples);
  const DeterministicProgram p2 = build_case2(spec2, est2.rows);
  const DeterministicProgram p4 = build_case4(spec4, *est4.objective, est4.joint);

  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Vector3d x;
    for (int j = 0; j < 3; ++j) x(j) = rng.uniform() * 50.0;
    for (int i = 0; i < 3; ++i)
      CHECK(p4.constraint_value(i, x) ==
            doctest::Approx(p2.constraint_value(i, x)).epsilon(1e-8));
  }
}

TEST_CASE("all variances zero collapses every case to the same LP") {
  SampleMap samples;
  samples["c"] = SampleSet{"c", testutil::profits_c().transpose().replicate(12, 1)};
  samples["b"] = SampleSet{"b", testutil::limits_b().transpose().replicate(25, 1)};
  for (int i = 0; i < 3; ++i) {
    samples["a" + std::to_string(i + 1)] =
        SampleSet{"a" + std::to_string(i + 1), testutil::row_a(i).transpose().replicate(25, 1)};
    Eigen::RowVector4d g;
    g << testutil::row_a(i).transpose(), testutil::limits_b()(i);
    samples["g" + std::to_string(i + 1)] =
        SampleSet{"g" + std::to_string(i + 1), g.replicate(25, 1)};
  }

  const ProblemSpec s1 = testutil::example1_spec(1.0);
  const ProblemSpec s2 = testutil::example2_spec();
  const ProblemSpec s3 = testutil::example3_spec();
  const ProblemSpec s4 = testutil::example4_spec(1.0);
  const DeterministicProgram lp1 = build_program(s1, estimate_all(s1, samples));
  const DeterministicProgram lp2 = build_program(s2, estimate_all(s2, samples));
  const DeterministicProgram lp3 = build_program(s3, estimate_all(s3, samples));
  const DeterministicProgram lp4 = build_program(s4, estimate_all(s4, samples));

  for (const DeterministicProgram* p : {&lp1, &lp2, &lp3, &lp4}) {
    CHECK_FALSE(p->has_cones());
    CHECK((p->linear_objective - testutil::profits_c()).cwiseAbs().maxCoeff() < 1e-9);
    for (int i = 0; i < 3; ++i) {
      CHECK((p->constraints[i].linear - testutil::row_a(i)).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(p->constraints[i].offset == doctest::Approx(-testutil::limits_b()(i)));
    }
  }
}

TEST_CASE("scaling row samples scales the built constraint linearly") {
  ProblemSpec spec = testutil::example2_spec();
  SampleMap samples = testutil::example_samples();
  const EstimatorSet base = estimate_all(spec, samples);
  const DeterministicProgram p1 = build_case2(spec, base.rows);

  const double s = 3.5;
  samples["a1"].data *= s;
  const EstimatorSet scaled = estimate_all(spec, samples);
  const DeterministicProgram p2 = build_case2(spec, scaled.rows);

  const Eigen::Vector3d x(2.0, 1.0, 4.0);
  const double margin1 = p1.constraint_value(0, x) - p1.constraints[0].offset;
  const double margin2 = p2.constraint_value(0, x) - p2.constraints[0].offset;
  CHECK(margin2 == doctest::Approx(s * margin1).epsilon(1e-9));
  CHECK((p2.constraints[0].linear - s * p1.constraints[0].linear).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("tightening alpha never improves the optimum") {
  double prev = 1e300;
  for (double alpha : {0.10, 0.05, 0.01}) {
    const ProblemSpec spec = testutil::example2_spec(alpha);
    const Solution sol = solve(build_case2(spec, estimators_for(spec).rows));
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.Z_value <= prev + 1e-6);
    prev = sol.Z_value;
  }
}

TEST_CASE("safety margin is strictly positive below the median risk") {
  const ProblemSpec spec = testutil::example2_spec();
  const DeterministicProgram prog = build_case2(spec, estimators_for(spec).rows);
  const Eigen::Vector3d x(5.0, 3.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    const auto& c = prog.constraints[i];
    const double nominal = c.linear.dot(x) + c.offset;
    CHECK(prog.constraint_value(i, x) > nominal);
  }
}

TEST_CASE("joint sample sets must share one sample size") {
  ProblemSpec spec = testutil::example4_spec(0.5);
  SampleMap samples = testutil::example_samples();
  samples["g2"].data.conservativeResize(20, 4);
  const EstimatorSet est = estimate_all(spec, samples);
  CHECK_THROWS_AS(build_case4(spec, *est.objective, est.joint), std::invalid_argument);
}

TEST_CASE("weight sweep endpoints and validation") {
  const ProblemSpec spec = testutil::example1_spec(0.5);
  const EstimatorSet est = estimators_for(spec);

  CHECK(pareto_sweep(spec, est, {}, {}).empty());

  const auto single = pareto_sweep(spec, est, {1.0}, {});
  REQUIRE(single.size() == 1);
  CHECK(single[0].second.status == SolveStatus::optimal);
  CHECK(std::abs(single[0].second.z_value - 14237.2881) < 1e-2);

  CHECK_THROWS_AS(pareto_sweep(spec, est, {1.2}, {}), std::invalid_argument);
  const ProblemSpec s2 = testutil::example2_spec();
  CHECK_THROWS_AS(pareto_sweep(s2, estimators_for(s2), {0.5}, {}), std::invalid_argument);
}

TEST_CASE("unresolved references fail at estimation time") {
  const ProblemSpec spec = testutil::example2_spec();
  SampleMap samples = testutil::example_samples();
  samples.erase("a3");
  CHECK_THROWS_AS(estimate_all(spec, samples), std::invalid_argument);
}
