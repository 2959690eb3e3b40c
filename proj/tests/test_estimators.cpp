#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ccp/elliptical.hpp"
#include "ccp/estimators.hpp"
#include "test_util.hpp"

using namespace ccp;

namespace {

SampleSet from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  SampleSet s;
  s.id = "inline";
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.begin()->size());
  s.data.resize(n, d);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) s.data(i, j++) = v;
    ++i;
  }
  return s;
}

SampleSet random_sample(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  SampleSet s;
  s.id = "rand";
  s.data.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) s.data(i, j) = 3.0 * rng.normal() + j;
  return s;
}

}  // namespace

TEST_CASE("sample mean basics") {
  CHECK(sample_mean(from_rows({{1, 3}, {3, 5}})).isApprox(Eigen::Vector2d(2, 4)));
  CHECK(sample_mean(from_rows({{7, 5, 12}})).isApprox(Eigen::Vector3d(7, 5, 12)));
  SampleSet empty;
  empty.data.resize(0, 2);
  CHECK_THROWS_AS(sample_mean(empty), std::invalid_argument);
}

TEST_CASE("fixture mean matches its target exactly") {
  const SampleMap samples = testutil::example_samples();
  CHECK(sample_mean(samples.at("c")).isApprox(testutil::profits_c(), 1e-12));
}

TEST_CASE("scatter matrix basics") {
  const Eigen::MatrixXd s = scatter_matrix(from_rows({{1, 0}, {-1, 0}}));
  CHECK(s(0, 0) == doctest::Approx(2.0));
  CHECK(s(0, 1) == doctest::Approx(0.0));
  CHECK(s(1, 1) == doctest::Approx(0.0));

  CHECK(scatter_matrix(from_rows({{2, 5}, {2, 5}, {2, 5}})).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(scatter_matrix(from_rows({{1, 2}})), std::invalid_argument);
}

TEST_CASE("outer-product sum equals centering-matrix form") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const SampleSet s = random_sample(17, 4, seed);
    const Eigen::MatrixXd fast = scatter_matrix(s);
    // Independent oracle 1: explicit sum of outer products.
    const Eigen::VectorXd mean = s.data.colwise().mean();
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < s.count(); ++i) {
      const Eigen::VectorXd dlt = s.data.row(i).transpose() - mean;
      outer += dlt * dlt.transpose();
    }
    // Independent oracle 2: X'(I - 11'/p)X.
    const int p = s.count();
    const Eigen::MatrixXd center =
        Eigen::MatrixXd::Identity(p, p) - Eigen::MatrixXd::Constant(p, p, 1.0 / p);
    const Eigen::MatrixXd centered_form = s.data.transpose() * center * s.data;
    CHECK((fast - outer).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fast - centered_form).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("scatter is symmetric PSD and permutation invariant") {
  SampleSet s = random_sample(9, 3, 77);
  const Eigen::MatrixXd a = scatter_matrix(s);
  CHECK((a - a.transpose()).norm() == doctest::Approx(0.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);

  SampleSet shuffled = s;
  shuffled.data.row(0).swap(shuffled.data.row(5));
  shuffled.data.row(2).swap(shuffled.data.row(8));
  CHECK((scatter_matrix(shuffled) - a).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("affine equivariance of mean and scatter") {
  const SampleSet s = random_sample(14, 3, 5);
  Eigen::Matrix3d m;
  m << 2, 1, 0, 0, 3, -1, 1, 0, 2;
  const Eigen::Vector3d v(4, -2, 1);
  SampleSet t = s;
  t.data = s.data * m.transpose();
  t.data.rowwise() += v.transpose();
  CHECK((sample_mean(t) - (m * sample_mean(s) + v)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((scatter_matrix(t) - m * scatter_matrix(s) * m.transpose()).cwiseAbs().maxCoeff() <
        1e-8);
}

TEST_CASE("unbiased covariance") {
  const Eigen::MatrixXd c = unbiased_cov(from_rows({{0}, {2}}));
  CHECK(c(0, 0) == doctest::Approx(2.0));

  const SampleMap samples = testutil::example_samples();
  const Eigen::MatrixXd a1 = unbiased_cov(samples.at("a1"));
  CHECK((a1 - Eigen::Vector3d(30, 10, 12).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("unbiased covariance converges for the normal sampler") {
  const Eigen::Vector3d mean(1.0, -2.0, 0.5);
  Eigen::Matrix3d sigma;
  sigma << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Eigen::Matrix3d root = Eigen::LLT<Eigen::Matrix3d>(sigma).matrixL();
  const DensityGenerator gen = registry_get("normal");
  const double err_small =
      (unbiased_cov(sample_elliptical(mean, root, gen, 100, 42)) - sigma).norm();
  const double err_large =
      (unbiased_cov(sample_elliptical(mean, root, gen, 10000, 42)) - sigma).norm();
  CHECK(err_large < err_small);
  CHECK(err_large < 0.5);
}

TEST_CASE("normal-kernel MLE is S/N") {
  const DensityGenerator gen = registry_get("normal");
  for (std::uint64_t seed : {3u, 4u}) {
    const SampleSet s = random_sample(12, 3, seed);
    const Eigen::MatrixXd expected = scatter_matrix(s) / s.count();
    const Eigen::MatrixXd got = mle_cov(s, gen);
    CHECK((got - expected).norm() <= 1e-8 * expected.norm());
  }
}

TEST_CASE("zero scatter gives zero MLE") {
  const DensityGenerator gen = registry_get("normal");
  CHECK(mle_cov(from_rows({{1, 1}, {1, 1}}), gen).norm() == doctest::Approx(0.0));
}

TEST_CASE("MLE multiplier matches a dense grid search for pearson7") {
  const DensityGenerator gen = registry_get("pearson7(4)");
  const SampleSet s = from_rows({{1.0, 0.2}, {0.4, -1.1}, {-0.3, 0.8}, {1.6, 0.1}, {0.2, 0.5}});
  const double lambda = mle_multiplier(s.count(), s.dim(), gen);

  // Independent oracle: dense grid over (0, 10] with step 1e-6.
  const double nd = s.count() * s.dim();
  double best_lambda = 1e-6, best_val = -1e300;
  for (double l = 1e-6; l <= 10.0; l += 1e-6) {
    const double val = -0.5 * nd * std::log(l) + gen.log_kernel(s.dim() / l, s.count() * s.dim());
    if (val > best_val) {
      best_val = val;
      best_lambda = l;
    }
  }
  CHECK(std::abs(lambda - best_lambda) < 2e-6);
  const Eigen::MatrixXd got = mle_cov(s, gen);
  CHECK((got - best_lambda * scatter_matrix(s)).norm() < 1e-4 * got.norm());
}

TEST_CASE("MLE without an interior maximizer is reported") {
  DensityGenerator flat;
  flat.id = "flat";
  flat.phi_prime_0 = -0.5;
  flat.log_kernel = [](double, int) { return 0.0; };  // f(lambda) decreasing
  CHECK_THROWS_AS(mle_multiplier(5, 2, flat), std::runtime_error);
}

TEST_CASE("MLE requires N >= d") {
  const DensityGenerator gen = registry_get("normal");
  CHECK_THROWS_AS(mle_cov(from_rows({{1, 2, 3}, {2, 1, 0}}), gen), std::invalid_argument);
}

TEST_CASE("elliptical unbiased estimator") {
  const SampleSet s = random_sample(10, 2, 21);
  const Eigen::MatrixXd scatter = scatter_matrix(s);

  SUBCASE("normal kernel equals the classical unbiased estimator") {
    const Eigen::MatrixXd a = unbiased_cov_elliptical(s, registry_get("normal"));
    CHECK((a - unbiased_cov(s)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("phi'(0) = -1 halves it") {
    DensityGenerator g;
    g.id = "custom";
    g.phi_prime_0 = -1.0;
    const Eigen::MatrixXd a = unbiased_cov_elliptical(s, g);
    CHECK((a - scatter / (2.0 * (s.count() - 1.0))).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("pearson7(5) rescales by (nu-2)/nu") {
    const Eigen::MatrixXd a = unbiased_cov_elliptical(s, registry_get("pearson7(5)"));
    const Eigen::MatrixXd expected = scatter * (5.0 - 2.0) / (5.0 * (s.count() - 1.0));
    CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("nonnegative phi'(0) rejected") {
    DensityGenerator g;
    g.id = "bad";
    g.phi_prime_0 = 0.0;
    CHECK_THROWS_AS(unbiased_cov_elliptical(s, g), std::invalid_argument);
  }
}

TEST_CASE("bundle invariants") {
  const SampleSet s = random_sample(8, 3, 31);
  const DensityGenerator gen = registry_get("normal");
  const EstimatorBundle plain = make_bundle(s);
  CHECK_FALSE(plain.mle_cov.has_value());
  CHECK_FALSE(plain.generator_id.has_value());
  CHECK((plain.unbiased_cov * (s.count() - 1.0) - plain.scatter).norm() == doctest::Approx(0.0));
  CHECK(plain.count == 8);

  const EstimatorBundle with_gen = make_bundle(s, &gen);
  REQUIRE(with_gen.mle_cov.has_value());
  CHECK(*with_gen.generator_id == "normal");
  CHECK((*with_gen.mle_cov - plain.scatter / 8.0).norm() < 1e-8 * plain.scatter.norm());
}
