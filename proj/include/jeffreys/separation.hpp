#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jeffreys/dataset.hpp"
#include "jeffreys/error.hpp"
#include "jeffreys/simplex.hpp"

namespace jeffreys {

enum class SeparationStatus { complete, quasi_complete, overlap };

constexpr std::string_view to_string(SeparationStatus s) noexcept {
  switch (s) {
    case SeparationStatus::complete: return "complete";
    case SeparationStatus::quasi_complete: return "quasi_complete";
    case SeparationStatus::overlap: return "overlap";
  }
  return "";
}

struct SeparationReport {
  SeparationStatus status = SeparationStatus::overlap;
  /// Certificate direction, scaled to max|gamma_t| = 1; absent under overlap.
  std::optional<VectorXd> gamma;
  /// Observations (0-based) that gamma separates strictly; their ML fitted
  /// probabilities go to 0 or 1.
  std::vector<Eigen::Index> separated_observations;
  double lp_objective = 0.0;
};

/// Classifies the sample points as completely separated, quasi-completely
/// separated, or overlapping.
///
/// Every observation with y > 0 is a success point (sign +1) and every
/// observation with y < m a failure point (sign -1); an observation with
/// 0 < y < m is both. The linear program
///
///   maximize sum_k s_k  s.t.  s_k <= sign_k gamma^T x_k,  0 <= s_k <= 1,  gamma free
///
/// has optimal value equal to the size of the largest set of points that
/// one direction separates strictly (scaling gamma up saturates every
/// strictly positive margin). Value 0 means overlap, value equal to the
/// number of points means complete separation, anything in between means
/// quasi-complete separation. The certificate is re-verified with the
/// strictness threshold 1e-9 |gamma| |x_i|.
inline SeparationReport detect_separation(const Dataset& data) {
  const auto n = data.n();
  const auto p = data.p();
  const MatrixXd& X = data.X();

  std::vector<Eigen::Index> obs;
  std::vector<double> sign;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.y()[i] > 0.0) {
      obs.push_back(i);
      sign.push_back(1.0);
    }
    if (data.y()[i] < data.m()[i]) {
      obs.push_back(i);
      sign.push_back(-1.0);
    }
  }
  const auto k = static_cast<Eigen::Index>(obs.size());

  // Variables [gamma+ (p), gamma- (p), s (k)]; rows s_k - sign_k x_k^T (gamma+ - gamma-) <= 0.
  MatrixXd A = MatrixXd::Zero(k, 2 * p + k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const auto sr = static_cast<std::size_t>(r);
    const auto x = X.row(obs[sr]);
    A.block(r, 0, 1, p) = -sign[sr] * x;
    A.block(r, p, 1, p) = sign[sr] * x;
    A(r, 2 * p + r) = 1.0;
  }
  VectorXd c = VectorXd::Zero(2 * p + k);
  c.tail(k).setOnes();
  VectorXd upper(2 * p + k);
  upper.head(2 * p).setConstant(std::numeric_limits<double>::infinity());
  upper.tail(k).setOnes();

  const auto lp = BoundedSimplex::maximize(A, VectorXd::Zero(k), c, upper);
  const VectorXd gamma = lp.x.head(p) - lp.x.segment(p, p);

  SeparationReport report;
  report.lp_objective = lp.objective;
  const double gnorm = gamma.norm();
  if (lp.objective < 0.5 || gnorm == 0.0) return report;

  int strict = 0;
  std::vector<bool> separated(static_cast<std::size_t>(n), false);
  for (Eigen::Index r = 0; r < k; ++r) {
    const auto sr = static_cast<std::size_t>(r);
    const auto i = obs[sr];
    const double margin = sign[sr] * X.row(i).dot(gamma);
    const double threshold = 1e-9 * gnorm * X.row(i).norm();
    if (margin < -threshold) {
      throw LpError("separation certificate violates a weak inequality at observation " +
                    std::to_string(i + 1));
    }
    if (margin > threshold) {
      ++strict;
      separated[static_cast<std::size_t>(i)] = true;
    }
  }
  if (strict == 0) {
    throw LpError("separation linear program reported a positive objective without a certificate");
  }
  report.status = strict == k ? SeparationStatus::complete : SeparationStatus::quasi_complete;
  report.gamma = gamma / gamma.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (separated[static_cast<std::size_t>(i)]) report.separated_observations.push_back(i);
  }
  return report;
}

}  // namespace jeffreys
