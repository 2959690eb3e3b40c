#include "ccp/validate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccp {

namespace {

std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  return seed ^ ((index + 1) * 0x9e3779b97f4a7c15ULL);
}

// N rows, each mean + R * A * z_j, with ONE radius shared by the whole
// N*d-dimensional draw: the rows are jointly elliptical, which is the model
// under which the studentized projected mean is exactly t_{N-1}.
Eigen::MatrixXd sample_joint_rows(const Eigen::VectorXd& mean, const Eigen::MatrixXd& a,
                                  int count, const DensityGenerator& gen, Rng& rng) {
  const int d = static_cast<int>(mean.size());
  Eigen::MatrixXd out(count, d);
  if (a.norm() == 0.0) {
    out.rowwise() = mean.transpose();
    return out;
  }
  const double r = gen.radial(count * d, rng);
  const Eigen::VectorXd u = rng.sphere(count * d);
  for (int j = 0; j < count; ++j)
    out.row(j) = (mean + r * (a * u.segment(j * d, d))).transpose();
  return out;
}

struct UniStats {
  double mean = 0.0;
  double sdev = 0.0;  // sqrt of the unbiased variance
};

UniStats projected_stats(const Eigen::MatrixXd& rows, const Eigen::VectorXd& w,
                         double shift) {
  const Eigen::VectorXd p = rows * w + Eigen::VectorXd::Constant(rows.rows(), shift);
  UniStats s;
  s.mean = p.mean();
  const double ss = (p.array() - s.mean).square().sum();
  s.sdev = std::sqrt(std::max(0.0, ss / (p.size() - 1.0)));
  return s;
}

bool satisfied(double lhs, double rhs) { return lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs)); }

}  // namespace

double ks_statistic_t(std::vector<double> values, const TStudent& dist) {
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = t_cdf(dist, values[i]);
    d = std::max(d, std::max(f - i / m, (i + 1) / m - f));
  }
  return d;
}

double ks_critical_value(int m, double alpha) {
  // Stephens' approximation: D_crit = c(alpha) / (sqrt(M) + 0.12 + 0.11/sqrt(M)).
  double c;
  if (alpha == 0.01)
    c = 1.6276;
  else if (alpha == 0.05)
    c = 1.3581;
  else
    throw std::invalid_argument("ks_critical_value: alpha must be 0.05 or 0.01");
  const double sm = std::sqrt(static_cast<double>(m));
  return c / (sm + 0.12 + 0.11 / sm);
}

std::pair<double, double> wilson_interval(int successes, int m) {
  if (m <= 0) throw std::invalid_argument("wilson_interval: m must be positive");
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double p = static_cast<double>(successes) / m;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / m;
  const double center = (p + z2 / (2.0 * m)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / m + z2 / (4.0 * m * m)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<InvarianceReport> invariance_test(const std::vector<std::string>& generator_ids,
                                              int n, int m, std::uint64_t seed,
                                              bool drop_bessel_factor) {
  if (n < 3) throw std::invalid_argument("invariance_test: N >= 3 required");
  if (m < 100) throw std::invalid_argument("invariance_test: M >= 100 required");
  const TStudent dist{n - 1};
  const double crit = ks_critical_value(m, 0.01);
  std::vector<InvarianceReport> reports;
  for (std::size_t k = 0; k < generator_ids.size(); ++k) {
    const DensityGenerator gen = registry_get(generator_ids[k]);
    Rng rng(substream(seed, k));
    std::vector<double> ts(m);
    for (int rep = 0; rep < m; ++rep) {
      const Eigen::VectorXd x = sample_joint_univariate(0.0, 1.0, n, gen, rng);
      const double x_bar = x.mean();
      const double s2 = (x.array() - x_bar).square().sum();
      double t = t_statistic(x_bar, 0.0, s2, n);
      if (drop_bessel_factor) t /= std::sqrt(n - 1.0);
      ts[rep] = t;
    }
    InvarianceReport rep;
    rep.generator_id = generator_ids[k];
    rep.ks_statistic = ks_statistic_t(std::move(ts), dist);
    rep.critical_value = crit;
    rep.pass = rep.ks_statistic <= crit;
    reports.push_back(std::move(rep));
  }
  return reports;
}

CoverageReport coverage_test(const ProblemSpec& spec, const EstimatorSet& est,
                             const Eigen::VectorXd& x, const std::string& generator_id,
                             int m, std::uint64_t seed) {
  if (x.size() != spec.n_vars)
    throw std::invalid_argument("coverage_test: x dimension does not match the spec");
  const DensityGenerator gen = registry_get(generator_id);
  const double scale_div = -2.0 * gen.phi_prime_0;
  const CaseTag tag = detect_case(spec);
  const int nc = static_cast<int>(spec.constraints.size());

  // Per-constraint precomputation.
  struct Plan {
    enum Kind { fixed, row_random, rhs_random, joint_random } kind = fixed;
    // fixed parts
    double lhs_fixed = 0.0, rhs_fixed = 0.0;
    // random parts
    Eigen::VectorXd mean;          // d (row/joint) or 1 (rhs)
    Eigen::MatrixXd a;             // scale root A with A A' = S*/( -2 phi'(0) )
    Eigen::VectorXd proj;          // projection weights applied to fresh rows
    double proj_shift = 0.0;       // constant added to each projected value
    double sigma_fit = 0.0;        // fitted deviation sqrt(w' S* w)
    double quantile = 0.0;         // eta / delta / tau
    double sqrt_n = 0.0;
    int count = 0;
    double bound = 0.0;  // b_i for Case II, a'x for Case III, 0 for Case IV
    bool upper_tail = true;
  };
  std::vector<Plan> plans(nc);

  Eigen::VectorXd y(spec.n_vars + 1);
  y.head(spec.n_vars) = x;
  y(spec.n_vars) = -1.0;

  for (int i = 0; i < nc; ++i) {
    const auto& c = spec.constraints[i];
    Plan& p = plans[i];
    const bool row_rand = tag == CaseTag::II && est.rows[i].has_value();
    const bool joint_rand = tag == CaseTag::IV && est.joint[i].has_value();
    const auto* rhs_ref = std::get_if<RandomScalarRef>(&c.rhs);
    if (row_rand) {
      const EstimatorBundle& b = *est.rows[i];
      p.kind = Plan::row_random;
      p.mean = b.mean;
      p.a = cov_root(b.unbiased_cov / scale_div).transpose();
      p.proj = x;
      p.sigma_fit = std::sqrt(std::max(0.0, x.dot(b.unbiased_cov * x)));
      p.count = b.count;
      p.sqrt_n = std::sqrt(static_cast<double>(b.count));
      p.quantile = t_quantile(TStudent{b.count - 1}, 1.0 - spec.alphas[i]);
      p.bound = std::get<FixedScalar>(c.rhs).value;
    } else if (tag == CaseTag::III && rhs_ref != nullptr) {
      const EstimatorBundle& b = *est.rhs;
      const int col = rhs_ref->column;
      p.kind = Plan::rhs_random;
      p.mean = Eigen::VectorXd::Constant(1, b.mean(col));
      const double var = std::max(0.0, b.unbiased_cov(col, col));
      p.a = Eigen::MatrixXd::Constant(1, 1, std::sqrt(var / scale_div));
      p.proj = Eigen::VectorXd::Ones(1);
      p.sigma_fit = std::sqrt(var);
      p.count = b.count;
      p.sqrt_n = std::sqrt(static_cast<double>(b.count));
      p.quantile = t_quantile(TStudent{b.count - 1}, spec.alphas[i]);
      p.bound = std::get<FixedVector>(c.row).values.dot(x);
      p.upper_tail = false;
    } else if (joint_rand) {
      const EstimatorBundle& b = *est.joint[i];
      p.kind = Plan::joint_random;
      p.mean = b.mean;
      p.a = cov_root(b.unbiased_cov / scale_div).transpose();
      p.proj = y;
      p.sigma_fit = std::sqrt(std::max(0.0, y.dot(b.unbiased_cov * y)));
      p.count = b.count;
      p.sqrt_n = std::sqrt(static_cast<double>(b.count));
      p.quantile = t_quantile(TStudent{b.count - 1}, 1.0 - spec.alphas[i]);
      p.bound = 0.0;
    } else {
      p.kind = Plan::fixed;
      p.lhs_fixed = std::get<FixedVector>(c.row).values.dot(x);
      p.rhs_fixed = std::get<FixedScalar>(c.rhs).value;
    }
  }

  std::vector<int> hits(nc, 0);
  Rng rng(substream(seed, 0));
  for (int rep = 0; rep < m; ++rep) {
    for (int i = 0; i < nc; ++i) {
      const Plan& p = plans[i];
      if (p.kind == Plan::fixed) {
        if (satisfied(p.lhs_fixed, p.rhs_fixed)) ++hits[i];
        continue;
      }
      const Eigen::MatrixXd rows = sample_joint_rows(p.mean, p.a, p.count, gen, rng);
      const UniStats st = projected_stats(rows, p.proj, 0.0);
      const double slack_term = (p.quantile / p.sqrt_n) * (st.sdev - p.sigma_fit);
      bool ok;
      if (p.kind == Plan::rhs_random) {
        // b-side randomness: fresh mean must clear a'x with the fresh
        // deviation substituted in the (negative-quantile) margin.
        ok = satisfied(p.bound, st.mean + (p.quantile / p.sqrt_n) * (p.sigma_fit - st.sdev));
      } else {
        ok = satisfied(st.mean, p.bound + slack_term);
      }
      if (ok) ++hits[i];
    }
  }

  CoverageReport report;
  report.generator_id = generator_id;
  report.all_pass = true;
  for (int i = 0; i < nc; ++i) {
    ConstraintCoverage cc;
    cc.index = i;
    cc.rate = static_cast<double>(hits[i]) / m;
    cc.nominal = 1.0 - spec.alphas[i];
    std::tie(cc.wilson_low, cc.wilson_high) = wilson_interval(hits[i], m);
    cc.pass = cc.rate >= cc.nominal || cc.wilson_high >= cc.nominal;
    report.all_pass = report.all_pass && cc.pass;
    report.constraints.push_back(cc);
  }
  return report;
}

}  // namespace ccp
