#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "jeffreys/error.hpp"
#include "jeffreys/mle.hpp"
#include "jeffreys/normal.hpp"

namespace jeffreys {

struct WaldSummary {
  VectorXd estimates;
  VectorXd std_errors;
  VectorXd lower;
  VectorXd upper;
  double level = 0.95;
  double gen_variance = 0.0;  ///< det(vcov)
};

/// det(vcov) = exp(-log|X^T W X|) at the fitted coefficients.
inline double generalized_variance(const FitResult& fit) {
  if (!fit.converged) throw InferenceError("generalized variance requires a converged fit");
  return std::exp(-fit.logdet);
}

/// Wald intervals estimate +/- z_{1 - (1 - level)/2} * sqrt(diag vcov).
inline WaldSummary wald(const FitResult& fit, double level = 0.95) {
  if (!(level > 0.0 && level < 1.0)) throw InferenceError("confidence level must lie in (0, 1)");
  if (fit.diverged) {
    throw InferenceError(
        "maximum likelihood estimates are infinite (data separation); Wald intervals would be "
        "meaningless");
  }
  if (!fit.converged) throw InferenceError("Wald intervals require a converged fit");
  if (fit.vcov.rows() != fit.beta.size()) throw InferenceError("fit carries no covariance matrix");

  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  WaldSummary out;
  out.level = level;
  out.estimates = fit.beta;
  out.std_errors = fit.vcov.diagonal().array().sqrt().matrix();
  out.lower = out.estimates - z * out.std_errors;
  out.upper = out.estimates + z * out.std_errors;
  out.gen_variance = generalized_variance(fit);
  return out;
}

}  // namespace jeffreys
