#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccp/elliptical.hpp"
#include "ccp/transform.hpp"

namespace ccp {

struct InvarianceReport {
  std::string generator_id;
  double ks_statistic = 0.0;
  double critical_value = 0.0;
  bool pass = false;
};

/// Per-generator Monte Carlo check that the studentized mean of a jointly
/// elliptical size-N sample follows t_{N-1}: M replications, two-sided
/// Kolmogorov-Smirnov distance against the t CDF, pass at the 1% level.
/// Deterministic given seed. drop_bessel_factor deliberately mis-scales the
/// statistic (negative control).
std::vector<InvarianceReport> invariance_test(const std::vector<std::string>& generator_ids,
                                              int n, int m, std::uint64_t seed,
                                              bool drop_bessel_factor = false);

struct ConstraintCoverage {
  int index = 0;
  double rate = 0.0;
  double nominal = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  bool pass = false;  // rate >= nominal or wilson_high >= nominal
};

struct CoverageReport {
  std::string generator_id;
  std::vector<ConstraintCoverage> constraints;
  bool all_pass = false;
};

/// Resamples fresh size-N sample means M times from the chosen generator
/// (estimator means/covariances as the true parameters) and reports the
/// empirical per-constraint satisfaction rate at fixed x.
///
/// The simulated event is the studentized one the t-quantile certifies: the
/// fresh sample mean is compared against the bound with the fresh sample
/// deviation in place of the fitted one. Under any elliptical generator this
/// pivot is exactly t distributed, so an active constraint attains its
/// nominal rate for every family; a slack constraint exceeds it.
CoverageReport coverage_test(const ProblemSpec& spec, const EstimatorSet& est,
                             const Eigen::VectorXd& x, const std::string& generator_id,
                             int m, std::uint64_t seed);

/// Two-sided KS distance of a sample against the t_{df} CDF.
double ks_statistic_t(std::vector<double> values, const TStudent& dist);

/// Asymptotic two-sided KS critical value at significance alpha in {0.05, 0.01}.
double ks_critical_value(int m, double alpha);

/// 95% Wilson score interval for a rate of successes/m.
std::pair<double, double> wilson_interval(int successes, int m);

}  // namespace ccp
