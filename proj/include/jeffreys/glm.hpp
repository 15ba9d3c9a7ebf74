#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "jeffreys/dataset.hpp"
#include "jeffreys/error.hpp"
#include "jeffreys/link.hpp"

namespace jeffreys {

/// Per-observation model quantities at one coefficient vector.
///
/// h and logdet both come from a single QR decomposition of W^{1/2} X:
/// h_i is the squared norm of row i of the thin Q factor and
/// logdet = log|X^T W X| = 2 sum_t log|R_tt|. R is kept for the
/// variance-covariance matrix (R^T R)^{-1}.
struct ModelState {
  VectorXd beta;
  VectorXd eta;
  VectorXd pi;
  VectorXd one_minus_pi;
  VectorXd w;       ///< m_i omega(eta_i)
  VectorXd d;       ///< m_i g(eta_i)
  VectorXd dprime;  ///< m_i g'(eta_i)
  VectorXd q;       ///< d'_i / w_i + pi_i
  VectorXd h;       ///< diagonal of X (X^T W X)^{-1} X^T W
  VectorXd w_over_d;
  MatrixXd R;       ///< p x p upper triangular factor of W^{1/2} X
  double loglik = 0.0;
  double logdet = 0.0;
  double a = 0.0;
};

namespace detail {

inline double binomial_loglik_terms(double y, double m, const LinkEval& e) {
  double out = 0.0;
  if (y > 0.0) out += y * e.log_pi;
  if (m - y > 0.0) out += (m - y) * e.log_one_minus_pi;
  return out;
}

/// Thin QR of sqrt(w) .* X. Throws when a diagonal entry of R is zero or non-finite.
inline Eigen::HouseholderQR<MatrixXd> weighted_qr(const MatrixXd& X, const VectorXd& w) {
  MatrixXd A = w.array().sqrt().matrix().asDiagonal() * X;
  Eigen::HouseholderQR<MatrixXd> qr(A);
  const auto diag = qr.matrixQR().diagonal();
  for (Eigen::Index t = 0; t < diag.size(); ++t) {
    if (!(std::abs(diag[t]) > 0.0) || !std::isfinite(diag[t])) {
      throw SingularInformationError("expected information X^T W X is singular (column " +
                                     std::to_string(t + 1) + ")");
    }
  }
  return qr;
}

inline double logdet_from_r(const MatrixXd& qr_matrix, Eigen::Index p) {
  double out = 0.0;
  for (Eigen::Index t = 0; t < p; ++t) out += std::log(std::abs(qr_matrix(t, t)));
  return 2.0 * out;
}

}  // namespace detail

/// Binomial log-likelihood sum{y log pi + (m - y) log(1 - pi)}, binomial
/// coefficients omitted.
inline double loglik(const Dataset& data, Link link, const VectorXd& beta) {
  const VectorXd eta = data.X() * beta;
  double out = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out += detail::binomial_loglik_terms(data.y()[i], data.m()[i], link.evaluate(eta[i]));
  }
  return out;
}

inline ModelState build_state(const Dataset& data, Link link, const VectorXd& beta, double a) {
  if (beta.size() != data.p()) throw ValidationError("coefficient vector has the wrong length");
  if (!beta.allFinite()) throw ValidationError("coefficient vector is not finite");
  if (!(a >= 0.0)) throw ValidationError("penalty exponent must be non-negative");

  const auto n = data.n();
  const auto p = data.p();
  ModelState s;
  s.beta = beta;
  s.a = a;
  s.eta = data.X() * beta;
  s.pi.resize(n);
  s.one_minus_pi.resize(n);
  s.w.resize(n);
  s.d.resize(n);
  s.dprime.resize(n);
  s.q.resize(n);
  s.w_over_d.resize(n);
  s.loglik = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const LinkEval e = link.evaluate(s.eta[i]);
    const double m = data.m()[i];
    s.pi[i] = e.pi;
    s.one_minus_pi[i] = e.one_minus_pi;
    s.w[i] = m * e.omega;
    s.d[i] = m * e.g;
    s.dprime[i] = m * e.gprime;
    s.q[i] = e.gprime_over_omega + e.pi;
    s.w_over_d[i] = e.omega_over_g;
    s.loglik += detail::binomial_loglik_terms(data.y()[i], m, e);
  }

  const auto qr = detail::weighted_qr(data.X(), s.w);
  s.R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  // Thin Q as W^{1/2} X R^{-1}: row-wise relative accuracy, whereas the
  // Householder product loses rows of negligible weight to cancellation.
  MatrixXd thin_q = s.w.array().sqrt().matrix().asDiagonal() * data.X();
  s.R.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(thin_q);
  s.h = thin_q.rowwise().squaredNorm();
  s.logdet = detail::logdet_from_r(qr.matrixQR(), p);
  return s;
}

/// l(beta) + a log|X^T W(beta) X|.
inline double penalized_loglik(const ModelState& state) {
  return state.a == 0.0 ? state.loglik : state.loglik + state.a * state.logdet;
}

/// Gradient of the penalized log-likelihood:
/// sum_i (w_i/d_i) [y_i + 2 a h_i (q_i - 1/2) - m_i pi_i] x_i.
inline VectorXd adjusted_score(const ModelState& state, const Dataset& data) {
  const VectorXd u =
      (state.w_over_d.array() *
       (data.y().array() + 2.0 * state.a * state.h.array() * (state.q.array() - 0.5) -
        data.m().array() * state.pi.array()))
          .matrix();
  return data.X().transpose() * u;
}

/// log|X^T W X| at beta, without the rest of the state.
inline double information_logdet(const Dataset& data, Link link, const VectorXd& beta) {
  const VectorXd eta = data.X() * beta;
  VectorXd w(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) w[i] = data.m()[i] * link.evaluate(eta[i]).omega;
  return detail::logdet_from_r(detail::weighted_qr(data.X(), w).matrixQR(), data.p());
}

/// log|X^T Wbar(pi) X| with Wbar = diag{m_i omega_bar(pi_i)}, i.e. the
/// information written as a function of the fitted probabilities. For the
/// logit link omega_bar(z) = z (1 - z). Returns -infinity when some weight
/// vanishes and the matrix is singular.
inline double information_logdet_bar(const MatrixXd& X, const VectorXd& m, Link link,
                                     const VectorXd& pi) {
  VectorXd w(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double z = pi[i];
    w[i] = (z > 0.0 && z < 1.0) ? m[i] * link.omega_bar(z) : 0.0;
  }
  MatrixXd A = w.array().sqrt().matrix().asDiagonal() * X;
  Eigen::HouseholderQR<MatrixXd> qr(A);
  double out = 0.0;
  for (Eigen::Index t = 0; t < X.cols(); ++t) {
    const double r = std::abs(qr.matrixQR()(t, t));
    if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
    out += std::log(r);
  }
  return 2.0 * out;
}

}  // namespace jeffreys
