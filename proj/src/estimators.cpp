#include "ccp/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace ccp {

Eigen::VectorXd sample_mean(const SampleSet& samples) {
  if (samples.count() < 1) throw std::invalid_argument("sample_mean: empty sample set");
  return samples.data.colwise().mean().transpose();
}

Eigen::MatrixXd scatter_matrix(const SampleSet& samples) {
  if (samples.count() < 2) throw std::invalid_argument("scatter_matrix: N >= 2 required");
  const Eigen::MatrixXd centered =
      samples.data.rowwise() - samples.data.colwise().mean();
  Eigen::MatrixXd s = centered.transpose() * centered;
  return 0.5 * (s + s.transpose());  // enforce exact symmetry
}

Eigen::MatrixXd unbiased_cov(const SampleSet& samples) {
  return scatter_matrix(samples) / (samples.count() - 1.0);
}

double mle_multiplier(int count, int dim, const DensityGenerator& gen) {
  const double nd = static_cast<double>(count) * dim;
  const int total_dim = count * dim;
  const auto log_f = [&](double log_lambda) {
    const double lambda = std::exp(log_lambda);
    return -0.5 * nd * log_lambda + gen.log_kernel(dim / lambda, total_dim);
  };
  // Golden-section maximization over the default bracket (1e-8, 1e8) in log.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(1e-8), b = std::log(1e8);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = log_f(c), fd = log_f(d);
  while (b - a > 1e-13) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = log_f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = log_f(d);
    }
  }
  const double log_lambda = 0.5 * (a + b);
  if (log_lambda < std::log(1e-8) + 1e-6 || log_lambda > std::log(1e8) - 1e-6)
    throw std::runtime_error("mle_cov: no interior maximizer in the search bracket");
  return std::exp(log_lambda);
}

Eigen::MatrixXd mle_cov(const SampleSet& samples, const DensityGenerator& gen) {
  const int n = samples.count();
  const int d = samples.dim();
  if (n < d) throw std::invalid_argument("mle_cov: N >= d required");
  const Eigen::MatrixXd s = scatter_matrix(samples);
  if (s.norm() == 0.0) return Eigen::MatrixXd::Zero(d, d);
  return mle_multiplier(n, d, gen) * s;
}

Eigen::MatrixXd unbiased_cov_elliptical(const SampleSet& samples, const DensityGenerator& gen) {
  if (gen.phi_prime_0 >= 0.0)
    throw std::invalid_argument("unbiased_cov_elliptical: phi'(0) must be negative");
  const int n = samples.count();
  return scatter_matrix(samples) / (2.0 * (1.0 - n) * gen.phi_prime_0);
}

EstimatorBundle make_bundle(const SampleSet& samples, const DensityGenerator* gen) {
  EstimatorBundle b;
  b.mean = sample_mean(samples);
  b.scatter = scatter_matrix(samples);
  b.unbiased_cov = b.scatter / (samples.count() - 1.0);
  b.count = samples.count();
  if (gen != nullptr) {
    b.generator_id = gen->id;
    if (samples.count() >= samples.dim()) b.mle_cov = mle_cov(samples, *gen);
  }
  return b;
}

}  // namespace ccp
