#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "jeffreys/dataset.hpp"
#include "jeffreys/error.hpp"
#include "jeffreys/glm.hpp"
#include "jeffreys/link.hpp"
#include "jeffreys/mle.hpp"

namespace jeffreys {

/// Adjusted binomial responses and totals whose ML score equals the
/// penalized score at the current beta.
struct PseudoData {
  VectorXd ytilde;
  VectorXd mtilde;
  VectorXd c;
  /// mtilde - ytilde evaluated without cancellation. Positive even when the
  /// gap is below the spacing of doubles near ytilde.
  VectorXd failures;
};

/// Process-wide tallies of the bound checks made on every adjusted dataset
/// built by `fit_mpl`. Read by the test suites; never reset by the library.
struct PseudoDataCounters {
  std::atomic<std::uint64_t> checked{0};
  std::atomic<std::uint64_t> violations{0};  ///< 0 <= ytilde <= mtilde failed
  std::atomic<std::uint64_t> checked_strict{0};
  std::atomic<std::uint64_t> strict_violations{0};  ///< ytilde > 0 and mtilde - ytilde > 0 failed, intercept present
};

inline PseudoDataCounters& pseudo_data_counters() {
  static PseudoDataCounters counters;
  return counters;
}

/// Adjusted responses ytilde = y + 2ah(q - 1/2 + pi c) and totals
/// mtilde = m + 2ahc with c = 1 + (q - 1/2){pi - I(q <= 1/2)}/{pi(1 - pi)}.
///
/// Substituting c, the adjustments reduce branch-wise to sums of
/// non-negative terms:
///   q <= 1/2:  ytilde = y + 2ah pi,                       mtilde - ytilde = m - y + 2ah(c - pi)
///   q >  1/2:  ytilde = y + 2ah{pi + (q - 1/2)/(1 - pi)}, mtilde - ytilde = m - y + 2ah(1 - pi)
/// which is how they are evaluated, so 0 <= ytilde <= mtilde holds in
/// floating point and not only in exact arithmetic.
inline PseudoData pseudo_data(const ModelState& state, const Dataset& data) {
  const auto n = data.n();
  PseudoData out{VectorXd(n), VectorXd(n), VectorXd(n), VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = data.y()[i];
    const double m = data.m()[i];
    const double pi = state.pi[i];
    const double one_minus_pi = state.one_minus_pi[i];
    const double q = state.q[i];
    const double k = 2.0 * state.a * state.h[i];
    if (q <= 0.5) {
      const double c = 1.0 + (0.5 - q) / pi;
      out.c[i] = c;
      out.ytilde[i] = y + k * pi;
      out.failures[i] = (m - y) + k * ((0.5 - q) / pi + one_minus_pi);
      out.mtilde[i] = out.ytilde[i] + out.failures[i];
    } else {
      const double r = (q - 0.5) / one_minus_pi;
      out.c[i] = 1.0 + r;
      out.ytilde[i] = y + k * (pi + r);
      out.failures[i] = (m - y) + k * one_minus_pi;
      out.mtilde[i] = out.ytilde[i] + out.failures[i];
    }
  }
  return out;
}

namespace detail {

inline void record_pseudo_data(const PseudoData& pd, bool strict) {
  auto& counters = pseudo_data_counters();
  for (Eigen::Index i = 0; i < pd.ytilde.size(); ++i) {
    const double y = pd.ytilde[i];
    const double m = pd.mtilde[i];
    const double f = pd.failures[i];
    counters.checked.fetch_add(1, std::memory_order_relaxed);
    if (!(y >= 0.0 && y <= m && f >= 0.0)) {
      counters.violations.fetch_add(1, std::memory_order_relaxed);
    }
    if (strict) {
      counters.checked_strict.fetch_add(1, std::memory_order_relaxed);
      if (!(y > 0.0 && f > 0.0)) counters.strict_violations.fetch_add(1, std::memory_order_relaxed);
    }
  }
}

}  // namespace detail

/// Starting value for the penalized fit: the ML estimate after adding 0.01
/// to every response and 0.02 to every total.
inline VectorXd mpl_default_start(const Dataset& data, Link link, const FitConfig& config = {}) {
  const Dataset shifted = data.with_responses((data.y().array() + 0.01).matrix(),
                                              (data.m().array() + 0.02).matrix());
  FitConfig ml = config;
  ml.grad_tol = config.inner_grad_tol;
  ml.beta_tol = std::numeric_limits<double>::infinity();
  return fit_ml(shifted, link, ml).beta;
}

/// Maximizes l(beta) + a log|X^T W(beta) X| by repeated maximum likelihood
/// fits to adjusted responses and totals.
///
/// Each outer iteration (P1) forms the adjusted data at the current beta
/// and (P2) either takes one IRLS step on it (halved until the adjusted
/// log-likelihood does not decrease) or refits it by ML, per
/// `config.inner`. A step that lowers the penalized objective is halved
/// toward the current iterate. Converged means max|adjusted score| < grad_tol with the
/// last step below beta_tol. When the penalized objective falls on two
/// consecutive iterations the current and previous iterates are averaged,
/// and a step that reverses the previous one without shrinking is halved.
inline FitResult fit_mpl(const Dataset& data, Link link, double a, const FitConfig& config = {},
                         const std::optional<VectorXd>& start = std::nullopt) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ValidationError("penalty exponent a must be positive and finite");
  }
  VectorXd beta = start ? *start : mpl_default_start(data, link, config);
  if (beta.size() != data.p()) throw ValidationError("starting value has the wrong length");
  const bool strict = data.has_intercept();

  FitResult out;
  VectorXd previous = beta;
  double previous_objective = -std::numeric_limits<double>::infinity();
  double last_step = std::numeric_limits<double>::infinity();
  int decreases = 0;
  VectorXd previous_step;
  ModelState state = build_state(data, link, beta, a);
  int it = 0;
  for (;; ++it) {
    const double grad = adjusted_score(state, data).cwiseAbs().maxCoeff();
    const double objective = penalized_loglik(state);
    if (grad < config.grad_tol && last_step < config.beta_tol) {
      if (config.keep_trace) out.trace.push_back({state.beta, objective, grad, {}, {}});
      out.converged = true;
      break;
    }
    if (it >= config.max_iter) {
      if (config.keep_trace) out.trace.push_back({state.beta, objective, grad, {}, {}});
      out.message = "iteration limit reached";
      break;
    }

    decreases = objective < previous_objective ? decreases + 1 : 0;
    if (decreases >= 2) {
      if (config.keep_trace) out.trace.push_back({state.beta, objective, grad, {}, {}});
      const VectorXd averaged = 0.5 * (state.beta + previous);
      last_step = (averaged - state.beta).cwiseAbs().maxCoeff();
      decreases = 0;
      previous_objective = -std::numeric_limits<double>::infinity();
      previous_step.resize(0);
      state = build_state(data, link, averaged, a);
      continue;
    }

    const PseudoData pd = pseudo_data(state, data);
    detail::record_pseudo_data(pd, strict);
    if (config.keep_trace) out.trace.push_back({state.beta, objective, grad, pd.ytilde, pd.mtilde});
    const Dataset adjusted = data.with_responses(pd.ytilde, pd.mtilde);

    VectorXd next;
    if (config.inner == InnerPolicy::single_irls_step) {
      next = detail::ascent_step(adjusted, link, state.beta, loglik(adjusted, link, state.beta),
                                 config.max_halvings);
    } else {
      FitConfig inner = config;
      inner.grad_tol = config.inner_grad_tol;
      inner.beta_tol = std::numeric_limits<double>::infinity();
      inner.keep_trace = false;
      next = fit_ml(adjusted, link, inner, state.beta).beta;
    }
    if (!next.allFinite()) {
      out.message = "non-finite iterate";
      break;
    }
    // Halve toward the current iterate while the penalized objective falls.
    ModelState candidate = build_state(data, link, next, a);
    const double slack = 1e-12 * (1.0 + std::abs(objective));
    for (int h = 0; h < config.max_halvings && !(penalized_loglik(candidate) >= objective - slack);
         ++h) {
      next = 0.5 * (next + state.beta);
      candidate = build_state(data, link, next, a);
    }
    // A step that reverses the previous one without shrinking overshoots a
    // fixed point the objective is too flat to reveal: take the midpoint.
    VectorXd step = next - state.beta;
    if (previous_step.size() == step.size() && step.dot(previous_step) < 0.0 &&
        step.norm() >= previous_step.norm()) {
      step *= 0.5;
      next = state.beta + step;
      candidate = build_state(data, link, next, a);
    }
    previous_step = step;
    last_step = (next - state.beta).cwiseAbs().maxCoeff();
    previous = state.beta;
    previous_objective = objective;
    state = std::move(candidate);
  }
  out.iterations = it;
  detail::finish_result(out, state, data);
  return out;
}

}  // namespace jeffreys
