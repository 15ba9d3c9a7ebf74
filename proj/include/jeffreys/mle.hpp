#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jeffreys/dataset.hpp"
#include "jeffreys/error.hpp"
#include "jeffreys/glm.hpp"
#include "jeffreys/link.hpp"

namespace jeffreys {

/// How step P2 of the repeated-fits iteration updates beta.
enum class InnerPolicy {
  full_inner_ml,    ///< maximize the adjusted-data likelihood to inner_grad_tol
  single_irls_step  ///< take one IRLS step on the adjusted data
};

struct FitConfig {
  int max_iter = 100;
  double grad_tol = 1e-8;   ///< on the max-abs (adjusted) score
  double beta_tol = 1e-10;  ///< on the max-abs change in beta
  double divergence_norm = 1e4;
  InnerPolicy inner = InnerPolicy::single_irls_step;
  double inner_grad_tol = 1e-6;
  int max_halvings = 10;
  /// Consecutive iterations with a fitted probability within
  /// `boundary_eps` of 0 or 1 after which ML is declared divergent.
  int boundary_patience = 5;
  double boundary_eps = 10.0 * std::numeric_limits<double>::epsilon();
  bool keep_trace = false;
};

struct TraceRecord {
  VectorXd beta;
  double objective = 0.0;
  double grad_norm = 0.0;
  /// Adjusted responses and totals used for the update that followed
  /// (penalized fits only).
  VectorXd ytilde;
  VectorXd mtilde;
};

struct FitResult {
  VectorXd beta;
  MatrixXd vcov;  ///< (X^T W X)^{-1} at beta; empty if it could not be formed
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  double final_grad_norm = std::numeric_limits<double>::quiet_NaN();
  double loglik = std::numeric_limits<double>::quiet_NaN();
  double logdet = std::numeric_limits<double>::quiet_NaN();
  double penalized_loglik = std::numeric_limits<double>::quiet_NaN();
  double a = 0.0;
  std::string message;
  std::vector<TraceRecord> trace;
};

/// (R^T R)^{-1} for the upper-triangular factor held by the state.
inline MatrixXd vcov(const ModelState& state) {
  const auto p = state.R.cols();
  const MatrixXd r_inv =
      state.R.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
  return r_inv * r_inv.transpose();
}

/// Fisher-scoring (IRLS) step for the binomial likelihood of `data` at beta:
/// (X^T W X)^{-1} X^T diag(w/d) (y - m pi), solved as R^T R step = X^T u with
/// R from the QR of W^{1/2} X. Forming X^T u directly avoids the working
/// residual (y - m pi) / (d sqrt(w)), which overflows for rows of negligible
/// weight and contaminates the other rows under Householder reflections.
inline VectorXd irls_step(const Dataset& data, Link link, const VectorXd& beta) {
  const VectorXd eta = data.X() * beta;
  VectorXd w(data.n()), u(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const LinkEval e = link.evaluate(eta[i]);
    w[i] = data.m()[i] * e.omega;
    u[i] = (data.y()[i] - data.m()[i] * e.pi) * e.omega_over_g;
  }
  const auto qr = detail::weighted_qr(data.X(), w);
  const auto p = data.p();
  const auto R = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  VectorXd step = data.X().transpose() * u;
  R.transpose().solveInPlace(step);
  R.solveInPlace(step);
  return step;
}

/// Starting value for maximum likelihood: zero when X has an intercept
/// column, otherwise weighted least squares of G^{-1}((y + 0.5)/(m + 1))
/// on X with weights m_i omega_bar(p_i).
inline VectorXd ml_default_start(const Dataset& data, Link link) {
  if (data.has_intercept()) return VectorXd::Zero(data.p());
  VectorXd z(data.n()), sw(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double prop = (data.y()[i] + 0.5) / (data.m()[i] + 1.0);
    z[i] = link.inverse(prop);
    sw[i] = std::sqrt(data.m()[i] * link.omega_bar(prop));
  }
  const MatrixXd A = sw.asDiagonal() * data.X();
  return A.householderQr().solve((sw.array() * z.array()).matrix());
}

namespace detail {

/// IRLS step from `beta`, halved until the log-likelihood of `data` does
/// not decrease beyond rounding (at most `max_halvings` times). Returns the new iterate.
inline VectorXd ascent_step(const Dataset& data, Link link, const VectorXd& beta,
                            double current_loglik, int max_halvings) {
  VectorXd step = irls_step(data, link, beta);
  VectorXd candidate = beta + step;
  double ll = loglik(data, link, candidate);
  // Rounding slack: near the optimum the true change is below the noise.
  const double floor = current_loglik - 1e-12 * (1.0 + std::abs(current_loglik));
  for (int k = 0; k < max_halvings && !(ll >= floor); ++k) {
    step *= 0.5;
    candidate = beta + step;
    ll = loglik(data, link, candidate);
  }
  return candidate;
}

inline void finish_result(FitResult& out, const ModelState& state, const Dataset& data) {
  out.beta = state.beta;
  out.loglik = state.loglik;
  out.logdet = state.logdet;
  out.a = state.a;
  out.penalized_loglik = penalized_loglik(state);
  out.final_grad_norm = adjusted_score(state, data).cwiseAbs().maxCoeff();
  out.vcov = vcov(state);
}

inline bool at_boundary(const ModelState& state, double eps) {
  return (state.pi.array() < eps).any() || (state.one_minus_pi.array() < eps).any();
}

}  // namespace detail

/// Maximum likelihood by IRLS with step halving.
///
/// Converged means max|score| < grad_tol and the last step was below
/// beta_tol with no fitted probability at 0 or 1. Divergence (infinite estimates, i.e. separated data) is
/// declared when max|beta| exceeds divergence_norm or when fitted
/// probabilities have sat numerically at 0 or 1 for `boundary_patience`
/// consecutive iterations; the last iterate is returned either way.
inline FitResult fit_ml(const Dataset& data, Link link, const FitConfig& config = {},
                        const std::optional<VectorXd>& start = std::nullopt) {
  VectorXd beta = start ? *start : ml_default_start(data, link);
  if (beta.size() != data.p()) throw ValidationError("starting value has the wrong length");

  FitResult out;
  ModelState state = build_state(data, link, beta, 0.0);
  double last_step = std::numeric_limits<double>::infinity();
  int pinned = 0;
  int it = 0;
  for (;; ++it) {
    const double grad = adjusted_score(state, data).cwiseAbs().maxCoeff();
    if (config.keep_trace) out.trace.push_back({state.beta, state.loglik, grad, {}, {}});
    const bool boundary = detail::at_boundary(state, config.boundary_eps);
    if (grad < config.grad_tol && last_step < config.beta_tol) {
      // A stationary point with probabilities at 0 or 1 is the limit of a
      // divergent sequence, not a finite maximum.
      out.converged = !boundary;
      out.diverged = boundary;
      if (boundary) out.message = "fitted probabilities numerically 0 or 1";
      break;
    }
    if (state.beta.cwiseAbs().maxCoeff() > config.divergence_norm) {
      out.diverged = true;
      out.message = "coefficient norm exceeded " + std::to_string(config.divergence_norm);
      break;
    }
    pinned = boundary ? pinned + 1 : 0;
    if (pinned >= config.boundary_patience) {
      out.diverged = true;
      out.message = "fitted probabilities numerically 0 or 1";
      break;
    }
    if (it >= config.max_iter) {
      out.message = "iteration limit reached";
      break;
    }

    VectorXd candidate;
    try {
      candidate = detail::ascent_step(data, link, state.beta, state.loglik, config.max_halvings);
    } catch (const SingularInformationError& e) {
      throw SingularInformationError(std::string(e.what()) + " at IRLS iteration " +
                                     std::to_string(it + 1));
    }
    last_step = (candidate - state.beta).cwiseAbs().maxCoeff();
    if (!candidate.allFinite()) {
      out.diverged = true;
      out.message = "non-finite iterate";
      break;
    }
    state = build_state(data, link, candidate, 0.0);
  }
  out.iterations = it;
  detail::finish_result(out, state, data);
  return out;
}

}  // namespace jeffreys
