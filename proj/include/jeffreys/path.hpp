#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "jeffreys/dataset.hpp"
#include "jeffreys/error.hpp"
#include "jeffreys/link.hpp"
#include "jeffreys/mle.hpp"
#include "jeffreys/mpl.hpp"

namespace jeffreys {

struct PathResult {
  std::vector<double> grid;
  std::vector<VectorXd> betas;
  std::vector<double> logdets;
  std::vector<bool> converged;
  std::vector<int> iterations;
};

/// k points spaced evenly on the log scale from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int k) {
  if (!(lo > 0.0 && hi >= lo) || k < 1) {
    throw ValidationError("log grid needs 0 < lo <= hi and at least one point");
  }
  std::vector<double> out(static_cast<std::size_t>(k));
  if (k == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (std::log(hi) - std::log(lo)) / (k - 1);
  for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = std::exp(std::log(lo) + j * step);
  out.back() = hi;
  return out;
}

/// 50 log-spaced penalty exponents in [0.01, 5].
inline std::vector<double> default_path_grid() { return log_grid(0.01, 5.0, 50); }

/// Penalized fits along an ascending grid of penalty exponents.
///
/// The first point starts from the default start; every later point starts
/// at the most recent converged solution. A point that fails to converge
/// (or throws) is flagged and the walk continues.
inline PathResult fit_path(const Dataset& data, Link link, const std::vector<double>& grid,
                           const FitConfig& config = {}) {
  if (grid.empty()) throw ValidationError("penalty grid is empty");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] > 0.0) || !std::isfinite(grid[j])) {
      throw ValidationError("penalty grid values must be positive and finite");
    }
    if (j > 0 && !(grid[j] > grid[j - 1])) {
      throw ValidationError("penalty grid must be strictly ascending");
    }
  }

  PathResult out;
  out.grid = grid;
  std::optional<VectorXd> warm;
  for (const double a : grid) {
    try {
      const FitResult fit = fit_mpl(data, link, a, config, warm);
      out.betas.push_back(fit.beta);
      out.logdets.push_back(fit.logdet);
      out.converged.push_back(fit.converged);
      out.iterations.push_back(fit.iterations);
      if (fit.converged) warm = fit.beta;
    } catch (const Error&) {
      out.betas.push_back(VectorXd::Constant(data.p(), std::numeric_limits<double>::quiet_NaN()));
      out.logdets.push_back(std::numeric_limits<double>::quiet_NaN());
      out.converged.push_back(false);
      out.iterations.push_back(0);
    }
  }
  return out;
}

}  // namespace jeffreys
