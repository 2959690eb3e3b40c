#pragma once

#include <optional>

#include "ccp/elliptical.hpp"
#include "ccp/model.hpp"

namespace ccp {

struct EstimatorBundle {
  Eigen::VectorXd mean;
  Eigen::MatrixXd scatter;       // S
  Eigen::MatrixXd unbiased_cov;  // S* = S / (N - 1)
  std::optional<Eigen::MatrixXd> mle_cov;
  int count = 0;
  std::optional<std::string> generator_id;
};

Eigen::VectorXd sample_mean(const SampleSet& samples);

/// Sum of centered outer products, symmetric PSD. Requires N >= 2.
Eigen::MatrixXd scatter_matrix(const SampleSet& samples);

Eigen::MatrixXd unbiased_cov(const SampleSet& samples);

/// Elliptical MLE: lambda* . S where lambda* maximizes the profile likelihood
/// f(lambda) = lambda^(-Nd/2) g(d / lambda), g the joint kernel of the whole
/// sample. Requires N >= d. Reduces to S/N for the normal kernel.
Eigen::MatrixXd mle_cov(const SampleSet& samples, const DensityGenerator& gen);

/// S / (2 (1 - N) phi'(0)); equals S/(N-1) under the normal kernel.
Eigen::MatrixXd unbiased_cov_elliptical(const SampleSet& samples, const DensityGenerator& gen);

/// Convenience: mean, scatter and S* in one pass; MLE added when a generator
/// is supplied and N >= d.
EstimatorBundle make_bundle(const SampleSet& samples, const DensityGenerator* gen = nullptr);

/// Profile-likelihood multiplier itself (exposed for the grid-search oracle).
double mle_multiplier(int count, int dim, const DensityGenerator& gen);

}  // namespace ccp
