#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <jeffreys/jeffreys.hpp>

namespace jeffreys::testing {

inline std::string data_path(const std::string& name) {
  return std::string(JEFFREYS_DATA_DIR) + "/" + name;
}

/// n x p design with a leading column of ones and N(0, 1) covariates.
inline MatrixXd random_design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p,
                              bool intercept = true) {
  std::normal_distribution<double> normal;
  MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < p; ++t) X(i, t) = normal(rng);
  }
  if (intercept) X.col(0).setOnes();
  return X;
}

/// Binomial responses drawn at beta under `link`; totals uniform on 1..max_total.
inline Dataset random_dataset(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, Link link,
                              const VectorXd& beta, int max_total = 5, bool intercept = true) {
  for (;;) {
    MatrixXd X = random_design(rng, n, p, intercept);
    if (rank_check(X) < p) continue;
    std::uniform_int_distribution<int> total(1, max_total);
    VectorXd y(n), m(n);
    const VectorXd eta = X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      m[i] = total(rng);
      std::binomial_distribution<int> draw(static_cast<int>(m[i]), link.cdf(eta[i]));
      y[i] = draw(rng);
    }
    return Dataset(y, m, X);
  }
}

/// Random dataset on which ML has a finite solution.
inline Dataset random_overlapped(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, Link link,
                                 int max_total = 5) {
  std::normal_distribution<double> normal(0.0, 0.5);
  for (;;) {
    VectorXd beta(p);
    for (auto& b : beta) b = normal(rng);
    Dataset d = random_dataset(rng, n, p, link, beta, max_total);
    if (detect_separation(d).status == SeparationStatus::overlap) return d;
  }
}

/// Central finite-difference gradient.
inline VectorXd numeric_gradient(const std::function<double(const VectorXd&)>& f,
                                 const VectorXd& x, double h = 1e-5) {
  VectorXd g(x.size());
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    VectorXd xp = x, xm = x;
    xp[t] += h;
    xm[t] -= h;
    g[t] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Dataset make_dataset(std::initializer_list<double> y, std::initializer_list<double> m,
                            const MatrixXd& X) {
  VectorXd yy(static_cast<Eigen::Index>(y.size())), mm(static_cast<Eigen::Index>(m.size()));
  Eigen::Index i = 0;
  for (double v : y) yy[i++] = v;
  i = 0;
  for (double v : m) mm[i++] = v;
  return Dataset(yy, mm, X);
}

inline Dataset intercept_only(double y, double m) {
  return make_dataset({y}, {m}, MatrixXd::Ones(1, 1));
}

}  // namespace jeffreys::testing
