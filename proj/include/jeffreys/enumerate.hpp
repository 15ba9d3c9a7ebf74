#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "jeffreys/dataset.hpp"
#include "jeffreys/error.hpp"
#include "jeffreys/glm.hpp"
#include "jeffreys/link.hpp"
#include "jeffreys/mle.hpp"
#include "jeffreys/mpl.hpp"

namespace jeffreys {

/// Where a saturated ML fitted probability sits. At `zero`/`one` the
/// corresponding linear predictor is -infinity/+infinity.
enum class MlBoundary { interior, zero, one };

struct EnumerationCell {
  int y1 = 0;
  int y2 = 0;
  std::array<double, 2> pi_ml{};
  std::array<MlBoundary, 2> ml_boundary{MlBoundary::interior, MlBoundary::interior};
  std::array<double, 2> pi_mpl{};
  /// log|X^T Wbar(pi) X| at the ML probabilities; absent at boundary cells.
  std::optional<double> logdet_ml;
  double logdet_mpl = 0.0;
  bool mpl_converged = false;

  bool interior() const noexcept {
    return ml_boundary[0] == MlBoundary::interior && ml_boundary[1] == MlBoundary::interior;
  }
};

/// log|X^T Wbar(pi) X| on a square grid over (0,1)^2 with a half-cell inset:
/// axis[k] = (k + 1/2)/points, values(r, c) at (pi1, pi2) = (axis[r], axis[c]).
struct ContourGrid {
  std::vector<double> axis;
  MatrixXd values;
};

struct EnumerationTable {
  Link link;
  int m1 = 0;
  int m2 = 0;
  double a = 0.0;
  double x1 = -1.0;
  double x2 = 1.0;
  std::vector<EnumerationCell> cells;  ///< ordered by y1, then y2
  ContourGrid contour;
};

/// Every outcome of the two-observation saturated model
/// pi_i = G(b1 + b2 x_i), with ML and penalized fitted probabilities.
inline EnumerationTable enumerate_saturated(Link link, int m1, int m2, double a, double x1 = -1.0,
                                            double x2 = 1.0, int contour_points = 201,
                                            const FitConfig& config = {}) {
  if (m1 < 1 || m2 < 1) throw ValidationError("binomial totals must be at least 1");
  if (!(a > 0.0)) throw ValidationError("penalty exponent a must be positive");
  if (!(x1 != x2) || !std::isfinite(x1) || !std::isfinite(x2)) {
    throw ValidationError("covariate values must be finite and distinct");
  }
  if (contour_points < 0) throw ValidationError("contour grid size must be non-negative");

  EnumerationTable table;
  table.link = link;
  table.m1 = m1;
  table.m2 = m2;
  table.a = a;
  table.x1 = x1;
  table.x2 = x2;

  MatrixXd X(2, 2);
  X << 1.0, x1, 1.0, x2;
  const VectorXd m = (VectorXd(2) << m1, m2).finished();
  const Dataset base(VectorXd::Zero(2), m, X, {"(Intercept)", "x"});

  auto classify = [](int y, int total) {
    if (y == 0) return MlBoundary::zero;
    if (y == total) return MlBoundary::one;
    return MlBoundary::interior;
  };

  table.cells.reserve(static_cast<std::size_t>((m1 + 1) * (m2 + 1)));
  for (int y1 = 0; y1 <= m1; ++y1) {
    for (int y2 = 0; y2 <= m2; ++y2) {
      EnumerationCell cell;
      cell.y1 = y1;
      cell.y2 = y2;
      cell.pi_ml = {static_cast<double>(y1) / m1, static_cast<double>(y2) / m2};
      cell.ml_boundary = {classify(y1, m1), classify(y2, m2)};
      if (cell.interior()) {
        cell.logdet_ml = information_logdet_bar(
            X, m, link, (VectorXd(2) << cell.pi_ml[0], cell.pi_ml[1]).finished());
      }
      const Dataset data = base.with_responses((VectorXd(2) << y1, y2).finished(), m);
      const FitResult fit = fit_mpl(data, link, a, config);
      const VectorXd eta = X * fit.beta;
      cell.pi_mpl = {link.evaluate(eta[0]).pi, link.evaluate(eta[1]).pi};
      cell.logdet_mpl = information_logdet_bar(
          X, m, link, (VectorXd(2) << cell.pi_mpl[0], cell.pi_mpl[1]).finished());
      cell.mpl_converged = fit.converged;
      table.cells.push_back(cell);
    }
  }

  table.contour.axis.resize(static_cast<std::size_t>(contour_points));
  for (int k = 0; k < contour_points; ++k) {
    table.contour.axis[static_cast<std::size_t>(k)] = (k + 0.5) / contour_points;
  }
  table.contour.values.resize(contour_points, contour_points);
  for (int r = 0; r < contour_points; ++r) {
    for (int c = 0; c < contour_points; ++c) {
      const VectorXd pi = (VectorXd(2) << table.contour.axis[static_cast<std::size_t>(r)],
                           table.contour.axis[static_cast<std::size_t>(c)])
                              .finished();
      table.contour.values(r, c) = information_logdet_bar(X, m, link, pi);
    }
  }
  return table;
}

}  // namespace jeffreys
