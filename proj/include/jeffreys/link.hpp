#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "jeffreys/error.hpp"
#include "jeffreys/normal.hpp"

namespace jeffreys {

enum class LinkKind { logit, probit, cloglog, loglog, cauchit };

inline constexpr std::array<LinkKind, 5> all_link_kinds = {
    LinkKind::logit, LinkKind::probit, LinkKind::cloglog, LinkKind::loglog, LinkKind::cauchit};

/// Everything the model needs from the link at one linear predictor value.
///
/// `pi` and `one_minus_pi` are computed separately so that neither loses
/// precision in its own tail. The two ratios are formed in log space because
/// their numerators and denominators underflow together for large |eta|.
struct LinkEval {
  double pi = 0.5;
  double one_minus_pi = 0.5;
  double log_pi = 0.0;
  double log_one_minus_pi = 0.0;
  double g = 0.0;       ///< dG/deta
  double gprime = 0.0;  ///< d^2G/deta^2
  double omega = 0.0;   ///< g^2 / {G (1 - G)}, the unit working weight
  double omega_over_g = 0.0;       ///< g / {G (1 - G)} = w_i / d_i
  double gprime_over_omega = 0.0;  ///< g' / omega = d'_i / w_i
};

/// One of the five supported inverse-link functions G: R -> (0, 1).
///
/// Evaluation clamps eta to a per-link interval on which pi, 1 - pi and
/// omega all stay above ~1e-300, so every derived quantity is a normal,
/// strictly positive double. Inside that interval the formulas are exact.
class Link {
 public:
  constexpr explicit Link(LinkKind kind = LinkKind::logit) noexcept : kind_(kind) {}

  static Link from_name(std::string_view name) {
    if (name == "logit") return Link(LinkKind::logit);
    if (name == "probit") return Link(LinkKind::probit);
    if (name == "cloglog") return Link(LinkKind::cloglog);
    if (name == "loglog") return Link(LinkKind::loglog);
    if (name == "cauchit") return Link(LinkKind::cauchit);
    throw ValidationError("unknown link '" + std::string(name) +
                          "' (expected logit, probit, cloglog, loglog or cauchit)");
  }

  constexpr LinkKind kind() const noexcept { return kind_; }

  constexpr std::string_view name() const noexcept {
    switch (kind_) {
      case LinkKind::logit: return "logit";
      case LinkKind::probit: return "probit";
      case LinkKind::cloglog: return "cloglog";
      case LinkKind::loglog: return "loglog";
      case LinkKind::cauchit: return "cauchit";
    }
    return "";
  }

  /// True when G(-eta) = 1 - G(eta).
  constexpr bool symmetric() const noexcept {
    return kind_ == LinkKind::logit || kind_ == LinkKind::probit || kind_ == LinkKind::cauchit;
  }

  /// Interval to which eta is clamped before evaluation.
  constexpr std::pair<double, double> eta_range() const noexcept {
    constexpr double log690 = 6.536691597591305;  // log(690)
    switch (kind_) {
      case LinkKind::logit: return {-690.0, 690.0};
      case LinkKind::probit: return {-37.0, 37.0};
      case LinkKind::cloglog: return {-690.0, log690};
      case LinkKind::loglog: return {-log690, 690.0};
      case LinkKind::cauchit: return {-1e99, 1e99};
    }
    return {0.0, 0.0};
  }

  constexpr double clamp(double eta) const noexcept {
    const auto [lo, hi] = eta_range();
    return std::clamp(eta, lo, hi);
  }

  LinkEval evaluate(double eta) const noexcept {
    eta = clamp(eta);
    double log_pi = 0.0, log_q = 0.0, log_g = 0.0, gprime_over_g = 0.0;
    double pi = 0.0, q = 0.0;
    switch (kind_) {
      case LinkKind::logit:
        log_pi = -log1pexp(-eta);
        log_q = -log1pexp(eta);
        pi = std::exp(log_pi);
        q = std::exp(log_q);
        log_g = log_pi + log_q;
        gprime_over_g = q - pi;
        break;
      case LinkKind::probit:
        log_pi = log_normal_cdf(eta);
        log_q = log_normal_cdf(-eta);
        pi = normal_cdf(eta);
        q = normal_cdf(-eta);
        log_g = -0.5 * eta * eta - 0.5 * std::log(2.0 * std::numbers::pi);
        gprime_over_g = -eta;
        break;
      case LinkKind::cloglog: {
        const double e = std::exp(eta);
        pi = -std::expm1(-e);
        q = std::exp(-e);
        log_pi = std::log(pi);
        log_q = -e;
        log_g = eta - e;
        gprime_over_g = 1.0 - e;
        break;
      }
      case LinkKind::loglog: {
        const double e = std::exp(-eta);
        pi = std::exp(-e);
        q = -std::expm1(-e);
        log_pi = -e;
        log_q = std::log(q);
        log_g = -eta - e;
        gprime_over_g = e - 1.0;
        break;
      }
      case LinkKind::cauchit:
        pi = std::atan2(1.0, -eta) / std::numbers::pi;
        q = std::atan2(1.0, eta) / std::numbers::pi;
        log_pi = std::log(pi);
        log_q = std::log(q);
        log_g = -std::log(std::numbers::pi) - std::log1p(eta * eta);
        gprime_over_g = -2.0 * eta / (1.0 + eta * eta);
        break;
    }
    LinkEval out;
    out.pi = pi;
    out.one_minus_pi = q;
    out.log_pi = log_pi;
    out.log_one_minus_pi = log_q;
    out.g = std::exp(log_g);
    out.gprime = out.g * gprime_over_g;
    out.omega = std::exp(2.0 * log_g - log_pi - log_q);
    out.omega_over_g = std::exp(log_g - log_pi - log_q);
    out.gprime_over_omega = gprime_over_g * std::exp(log_pi + log_q - log_g);
    return out;
  }

  /// G(eta), unclamped except where the closed form saturates anyway.
  double cdf(double eta) const noexcept {
    switch (kind_) {
      case LinkKind::logit: return 1.0 / (1.0 + std::exp(-eta));
      case LinkKind::probit: return normal_cdf(eta);
      case LinkKind::cloglog: return -std::expm1(-std::exp(eta));
      case LinkKind::loglog: return std::exp(-std::exp(-eta));
      case LinkKind::cauchit: return std::atan2(1.0, -eta) / std::numbers::pi;
    }
    return 0.0;
  }

  /// G^{-1}(z) for z in (0, 1).
  double inverse(double z) const {
    if (!(z > 0.0 && z < 1.0)) throw std::domain_error("link inverse: argument must lie in (0, 1)");
    switch (kind_) {
      case LinkKind::logit: return std::log(z) - std::log1p(-z);
      case LinkKind::probit: return normal_quantile(z);
      case LinkKind::cloglog: return std::log(-std::log1p(-z));
      case LinkKind::loglog: return -std::log(-std::log(z));
      case LinkKind::cauchit:
        // Cotangent form keeps relative accuracy in both tails.
        return z < 0.5 ? -1.0 / std::tan(std::numbers::pi * z)
                       : 1.0 / std::tan(std::numbers::pi * (1.0 - z));
    }
    return 0.0;
  }

  /// {g(G^{-1}(z))}^2 / {z (1 - z)}: the unit working weight on the probability scale.
  double omega_bar(double z) const {
    const double eta = inverse(z);
    const double g = evaluate(eta).g;
    return g * g / (z * (1.0 - z));
  }

  /// d/dz log omega_bar(z) = 2 g'/g^2 - (1 - 2z)/{z (1 - z)}, evaluated at eta = G^{-1}(z).
  double log_omega_bar_slope(double z) const {
    const double eta = inverse(z);
    const LinkEval e = evaluate(eta);
    return 2.0 * e.gprime / (e.g * e.g) - (1.0 - 2.0 * z) / (z * (1.0 - z));
  }

  friend constexpr bool operator==(Link, Link) = default;

 private:
  // log(1 + e^x) without overflow.
  static double log1pexp(double x) noexcept {
    if (x > 35.0) return x + std::exp(-x);
    if (x < -35.0) return std::exp(x);
    return std::log1p(std::exp(x));
  }

  LinkKind kind_;
};

inline LinkEval evaluate(Link link, double eta) noexcept { return link.evaluate(eta); }
inline double inverse(Link link, double z) { return link.inverse(z); }
inline double omega_bar(Link link, double z) { return link.omega_bar(z); }

/// Maximizer z0 of omega_bar on (0, 1).
///
/// A 1024-point scan brackets the global maximum, golden-section search
/// narrows the bracket, and bisection on the sign of d log(omega_bar)/dz
/// finishes the job; the last step is needed because function values alone
/// cannot resolve a flat maximum much below sqrt(machine epsilon).
inline double find_z0(Link link) {
  constexpr int grid = 1024;
  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i < grid; ++i) {
    const double z = (i + 0.5) / grid;
    const double v = link.omega_bar(z);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double lo = std::max(best - 1, 0) + 0.5;
  double hi = std::min(best + 1, grid - 1) + 0.5;
  lo /= grid;
  hi /= grid;
  if (best == 0) lo = 0.25 / grid;
  if (best == grid - 1) hi = 1.0 - 0.25 / grid;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = link.omega_bar(x1);
  double f2 = link.omega_bar(x2);
  while (hi - lo > 1e-7) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = link.omega_bar(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = link.omega_bar(x1);
    }
  }

  // Widen slightly so the bracket certainly straddles the stationary point.
  lo = std::max(lo - 1e-7, 1e-12);
  hi = std::min(hi + 1e-7, 1.0 - 1e-12);
  if (!(link.log_omega_bar_slope(lo) > 0.0 && link.log_omega_bar_slope(hi) < 0.0)) {
    return 0.5 * (lo + hi);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = link.log_omega_bar_slope(mid);
    if (s == 0.0) return mid;
    (s > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace jeffreys
