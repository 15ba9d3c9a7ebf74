#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jeffreys/error.hpp"

namespace jeffreys {

/// Dense bounded-variable primal simplex for
///
///   maximize c^T x  subject to  A x <= b,  0 <= x <= upper,
///
/// with b >= 0 so that x = 0 is a feasible starting vertex and no phase one
/// is needed. Upper bounds may be infinite and are handled implicitly
/// (nonbasic variables sit at either bound; bound flips need no pivot).
/// Bland's rule is used throughout, which rules out cycling on the highly
/// degenerate problems this is used for. Intended for a few thousand rows.
class BoundedSimplex {
 public:
  struct Result {
    Eigen::VectorXd x;
    double objective = 0.0;
    int pivots = 0;
  };

  static Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& c, const Eigen::VectorXd& upper,
                         double tol = 1e-9) {
    const auto rows = A.rows();
    const auto nv = A.cols();
    const auto cols = nv + rows;
    if (b.size() != rows || c.size() != nv || upper.size() != nv) {
      throw LpError("simplex: inconsistent problem dimensions");
    }
    if ((b.array() < 0.0).any()) throw LpError("simplex: right-hand side must be non-negative");

    // Tableau [A | I] expressed in the current basis; slacks start basic.
    Eigen::MatrixXd T(rows, cols);
    T.leftCols(nv) = A;
    T.rightCols(rows).setIdentity();
    Eigen::VectorXd ub(cols);
    ub.head(nv) = upper;
    ub.tail(rows).setConstant(std::numeric_limits<double>::infinity());
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
    cost.head(nv) = c;

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
    std::vector<bool> is_basic(static_cast<std::size_t>(cols), false);
    std::vector<bool> at_upper(static_cast<std::size_t>(cols), false);
    for (Eigen::Index i = 0; i < rows; ++i) {
      basis[static_cast<std::size_t>(i)] = nv + i;
      is_basic[static_cast<std::size_t>(nv + i)] = true;
    }
    Eigen::VectorXd xb = b;           // values of the basic variables
    Eigen::VectorXd reduced = cost;   // c_j - c_B^T B^{-1} A_j (slack costs are zero)

    const long max_pivots = 50L * static_cast<long>(rows + cols) + 1000L;
    Result result;
    for (long iter = 0;; ++iter) {
      if (iter > max_pivots) throw LpError("simplex: iteration limit exceeded");

      Eigen::Index enter = -1;
      double direction = 0.0;
      for (Eigen::Index j = 0; j < cols; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (is_basic[sj]) continue;
        if (!at_upper[sj] && reduced[j] > tol) {
          enter = j;
          direction = 1.0;
          break;
        }
        if (at_upper[sj] && reduced[j] < -tol) {
          enter = j;
          direction = -1.0;
          break;
        }
      }
      if (enter < 0) break;

      // Ratio test: basic variables move by -direction * theta * T(:, enter).
      double theta = ub[enter];
      Eigen::Index leave_row = -1;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double alpha = direction * T(i, enter);
        const auto bi = basis[static_cast<std::size_t>(i)];
        double limit = std::numeric_limits<double>::infinity();
        bool to_upper = false;
        if (alpha > tol) {
          limit = std::max(xb[i], 0.0) / alpha;
        } else if (alpha < -tol && std::isfinite(ub[bi])) {
          limit = std::max(ub[bi] - xb[i], 0.0) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        const double tie = tol * 1e-3;
        const bool take =
            limit < theta - tie ||
            (leave_row >= 0 && std::abs(limit - theta) <= tie &&
             bi < basis[static_cast<std::size_t>(leave_row)]);
        if (take) {
          theta = limit;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) throw LpError("simplex: objective is unbounded");

      xb -= direction * theta * T.col(enter);
      if (leave_row < 0) {
        // Bound flip of the entering variable.
        at_upper[static_cast<std::size_t>(enter)] = direction > 0.0;
        continue;
      }

      const auto leaving = basis[static_cast<std::size_t>(leave_row)];
      const double entering_value = direction > 0.0 ? theta : ub[enter] - theta;
      const double pivot = T(leave_row, enter);
      T.row(leave_row) /= pivot;
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (i == leave_row) continue;
        const double f = T(i, enter);
        if (f != 0.0) T.row(i) -= f * T.row(leave_row);
      }
      const double rf = reduced[enter];
      reduced -= rf * T.row(leave_row).transpose();

      is_basic[static_cast<std::size_t>(leaving)] = false;
      at_upper[static_cast<std::size_t>(leaving)] = leave_to_upper;
      is_basic[static_cast<std::size_t>(enter)] = true;
      at_upper[static_cast<std::size_t>(enter)] = false;
      basis[static_cast<std::size_t>(leave_row)] = enter;
      xb[leave_row] = entering_value;
      ++result.pivots;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (at_upper[static_cast<std::size_t>(j)]) x[j] = ub[j];
    }
    for (Eigen::Index i = 0; i < rows; ++i) x[basis[static_cast<std::size_t>(i)]] = xb[i];
    result.x = x.head(nv);
    result.objective = c.dot(result.x);

    // Post-hoc feasibility check guards against accumulated round-off.
    const double scale = 1.0 + A.cwiseAbs().maxCoeff() * (1.0 + result.x.cwiseAbs().maxCoeff());
    const double feas_tol = 1e-7 * scale;
    if (((A * result.x - b).array() > feas_tol).any() || (result.x.array() < -feas_tol).any() ||
        ((result.x - upper).array() > feas_tol).any()) {
      throw LpError("simplex: solution fails the feasibility check");
    }
    return result;
  }
};

}  // namespace jeffreys
