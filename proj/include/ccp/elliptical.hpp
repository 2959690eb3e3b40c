#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Core>

#include "ccp/model.hpp"

namespace ccp {

/// Deterministic seedable RNG. All distributions are generated from the raw
/// 64-bit stream of a Mersenne twister (a twisted GFSR), so sequences are
/// bit-identical across platforms and standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Uniform on (0, 1), never returns 0 or 1.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Gamma(shape, 1), Marsaglia-Tsang.
  double gamma(double shape);
  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }
  /// Uniform direction on the unit sphere in R^d.
  Eigen::VectorXd sphere(int d);

 private:
  std::mt19937_64 state_;
};

/// One member of the elliptical family: normalized density generator g,
/// characteristic-generator derivative phi'(0), and the radius of the
/// stochastic representation x = mu + R * A * u.
///
/// Convention: the sampler is normalized so that Cov(x) = -2 phi'(0) * A A'
/// in every dimension. For pearson7 this means A A' is the classical t scale
/// matrix, not the covariance.
struct DensityGenerator {
  std::string id;
  double phi_prime_0 = 0.0;
  /// log of the d-dimensional normalized density generator g(v).
  std::function<double(double v, int dim)> log_g;
  /// Unnormalized log kernel, shape as a function of the total vec dimension
  /// (used by the profile likelihood of the covariance multiplier).
  std::function<double(double v, int dim)> log_kernel;
  /// Radius R for a d-dimensional draw; E[R^2] = -2 phi'(0) * d.
  std::function<double(int dim, Rng&)> radial;

  double g(double v, int dim) const { return std::exp(log_g(v, dim)); }
};

/// Looks up "normal", "pearson7(nu)" or "power_exponential(beta)".
/// Throws std::invalid_argument for unknown ids or invalid shape parameters
/// (pearson7 requires nu > 2 so the covariance exists).
DensityGenerator registry_get(const std::string& id);

/// N i.i.d. draws of mu + R * cov_root * u. Deterministic given seed.
SampleSet sample_elliptical(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov_root,
                            const DensityGenerator& gen, int count, std::uint64_t seed,
                            const std::string& id = "sample");

/// One jointly elliptical univariate sample of size N: the N-vector
/// mu*1 + R*sigma_scale*u with a single shared radius. This is the row model
/// under which the studentized mean is exactly t distributed.
Eigen::VectorXd sample_joint_univariate(double mu, double sigma_scale, int count,
                                        const DensityGenerator& gen, Rng& rng);

struct TStudent {
  int df;  // degrees of freedom, >= 1
};

/// t CDF by regularized incomplete beta (continued fractions).
double t_cdf(const TStudent& dist, double t);
/// Quantile by bracketed root finding on t_cdf; p in (0,1) strictly.
double t_quantile(const TStudent& dist, double p);
/// sqrt(N) * sqrt(N-1) * (x_bar - mu) / sqrt(s2), s2 the scatter (biased form).
double t_statistic(double x_bar, double mu, double s2, int n);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace ccp
