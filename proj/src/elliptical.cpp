#include "ccp/elliptical.hpp"

#include <cmath>
#include <stdexcept>

namespace ccp {

double Rng::uniform() {
  // 53 random bits; shifted into (0,1) by the half-ulp offset.
  return (static_cast<double>(state_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape) {
  if (shape <= 0.0) throw std::invalid_argument("gamma shape must be positive");
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Eigen::VectorXd Rng::sphere(int d) {
  Eigen::VectorXd z(d);
  for (;;) {
    for (int i = 0; i < d; ++i) z(i) = normal();
    const double norm = z.norm();
    if (norm > 0.0) return z / norm;
  }
}

namespace {

double parse_shape(const std::string& id, const std::string& name) {
  const auto open = id.find('(');
  const auto close = id.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("malformed generator id: " + id);
  const std::string inner = id.substr(open + 1, close - open - 1);
  std::size_t used = 0;
  const double value = std::stod(inner, &used);
  if (used != inner.size())
    throw std::invalid_argument("bad " + name + " parameter in generator id: " + id);
  return value;
}

DensityGenerator make_normal() {
  DensityGenerator gen;
  gen.id = "normal";
  gen.phi_prime_0 = -0.5;
  gen.log_g = [](double v, int d) { return -0.5 * d * std::log(2.0 * M_PI) - 0.5 * v; };
  gen.log_kernel = [](double v, int) { return -0.5 * v; };
  gen.radial = [](int d, Rng& rng) { return std::sqrt(rng.chi_square(d)); };
  return gen;
}

DensityGenerator make_pearson7(double nu) {
  if (nu <= 2.0)
    throw std::invalid_argument("pearson7 requires nu > 2 (covariance must exist)");
  DensityGenerator gen;
  gen.id = "pearson7(" + std::to_string(nu) + ")";
  gen.phi_prime_0 = -nu / (2.0 * (nu - 2.0));
  gen.log_g = [nu](double v, int d) {
    return std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
           0.5 * d * std::log(nu * M_PI) - 0.5 * (nu + d) * std::log1p(v / nu);
  };
  gen.log_kernel = [nu](double v, int dim) {
    return -0.5 * (nu + dim) * std::log1p(v / nu);
  };
  // Classical multivariate-t representation: R^2 = d * F(d, nu) scaled so the
  // scale matrix is cov_root * cov_root'.
  gen.radial = [nu](int d, Rng& rng) {
    const double num = rng.chi_square(d);
    const double den = rng.chi_square(nu);
    return std::sqrt(num * nu / den);
  };
  return gen;
}

DensityGenerator make_power_exponential(double beta) {
  if (beta <= 0.0)
    throw std::invalid_argument("power_exponential requires beta > 0");
  DensityGenerator gen;
  gen.id = "power_exponential(" + std::to_string(beta) + ")";
  // Univariate second moment of the kernel exp(-v^beta / 2).
  gen.phi_prime_0 =
      -std::exp((1.0 / beta - 1.0) * std::log(2.0) + std::lgamma(1.5 / beta) -
                std::lgamma(0.5 / beta));
  gen.log_g = [beta](double v, int d) {
    const double log_norm = std::lgamma(0.5 * d) + std::log(beta) -
                            0.5 * d * std::log(M_PI) -
                            (0.5 * d / beta) * std::log(2.0) -
                            std::lgamma(0.5 * d / beta);
    return log_norm - 0.5 * std::pow(v, beta);
  };
  gen.log_kernel = [beta](double v, int) { return -0.5 * std::pow(v, beta); };
  const double phi0 = gen.phi_prime_0;
  // Gamma-based radius, rescaled per dimension so Cov = -2 phi'(0) * scale.
  gen.radial = [beta, phi0](int d, Rng& rng) {
    const double w = rng.gamma(0.5 * d / beta);
    const double r = std::pow(2.0 * w, 0.5 / beta);
    const double mean_r2 = std::exp((1.0 / beta) * std::log(2.0) +
                                    std::lgamma(0.5 * (d + 2.0) / beta) -
                                    std::lgamma(0.5 * d / beta));
    return r * std::sqrt(-2.0 * phi0 * d / mean_r2);
  };
  return gen;
}

}  // namespace

DensityGenerator registry_get(const std::string& id) {
  if (id == "normal") return make_normal();
  if (id.rfind("pearson7", 0) == 0) return make_pearson7(parse_shape(id, "nu"));
  if (id.rfind("power_exponential", 0) == 0)
    return make_power_exponential(parse_shape(id, "beta"));
  throw std::invalid_argument("unknown density generator: " + id);
}

SampleSet sample_elliptical(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov_root,
                            const DensityGenerator& gen, int count, std::uint64_t seed,
                            const std::string& id) {
  const int d = static_cast<int>(mean.size());
  if (cov_root.rows() != d || cov_root.cols() != d)
    throw std::invalid_argument("cov_root must be d x d");
  Rng rng(seed);
  SampleSet out;
  out.id = id;
  out.data.resize(count, d);
  for (int k = 0; k < count; ++k) {
    const double r = gen.radial(d, rng);
    out.data.row(k) = (mean + r * (cov_root * rng.sphere(d))).transpose();
  }
  return out;
}

Eigen::VectorXd sample_joint_univariate(double mu, double sigma_scale, int count,
                                        const DensityGenerator& gen, Rng& rng) {
  if (sigma_scale == 0.0) return Eigen::VectorXd::Constant(count, mu);
  const double r = gen.radial(count, rng);
  return Eigen::VectorXd::Constant(count, mu) + r * sigma_scale * rng.sphere(count);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  // Switch at the symmetry point for convergence.
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
}

double t_cdf(const TStudent& dist, double t) {
  if (dist.df < 1) throw std::invalid_argument("t distribution requires df >= 1");
  if (t == 0.0) return 0.5;
  const double df = dist.df;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double t_quantile(const TStudent& dist, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("t quantile requires p in (0,1)");
  if (p == 0.5) return 0.0;
  // Expand a bracket, then bisect on the CDF.
  double lo = -1.0, hi = 1.0;
  while (t_cdf(dist, lo) > p) lo *= 2.0;
  while (t_cdf(dist, hi) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (t_cdf(dist, mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

double t_statistic(double x_bar, double mu, double s2, int n) {
  if (s2 <= 0.0) throw std::invalid_argument("t_statistic requires s2 > 0");
  if (n < 2) throw std::invalid_argument("t_statistic requires N >= 2");
  return std::sqrt(static_cast<double>(n)) * std::sqrt(n - 1.0) * (x_bar - mu) /
         std::sqrt(s2);
}

}  // namespace ccp
