// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracle/nelder_mead.hpp"

namespace {

using namespace jeffreys;
using jeffreys::testing::data_path;

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; 0 for none
  std::function<Verdict()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const Link logit(LinkKind::logit);

Dataset tournament8() { return bt_design(load_contests(data_path("tournament8.csv")), "Anchors"); }

Verdict closed_form_oracle() {
  int checked = 0;
  double worst = 0.0;
  for (double m : {5.0, 10.0, 15.0, 20.0, 25.0}) {
    for (double y : {0.0, 1.0, 2.0, 3.0, 5.0}) {
      for (double a : {0.1, 1.0 / 6.0, 0.5, 1.0}) {
        const auto fit = fit_mpl(testing::intercept_only(y, m), logit, a);
        if (!fit.converged) return {false, "no convergence at y=" + std::to_string(y)};
        const double expected = (y + a) / (m + 2 * a);
        worst = std::max(worst, std::abs(logit.cdf(fit.beta[0]) - expected));
        ++checked;
      }
    }
  }
  const double b = fit_mpl(testing::intercept_only(0, 10), logit, 0.5).beta[0];
  const bool ok = worst <= 1e-10 && std::abs(b - std::log(1.0 / 21.0)) <= 1e-10;
  return {ok, std::to_string(checked) + " fits, max |pi - (y+a)/(m+2a)| = " + fmt("%.2e", worst) +
                  ", beta(0,10,0.5) = " + fmt("%.10f", b)};
}

Verdict gradient_correctness() {
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> normal(0.0, 0.7);
  double worst = 0.0;
  int count = 0;
  for (auto kind : all_link_kinds) {
    const Link link(kind);
    for (int rep = 0; rep < 50; ++rep) {
      const Eigen::Index p = 1 + rep % 3;
      VectorXd beta(p);
      for (auto& b : beta) b = normal(rng);
      const Dataset d = testing::random_dataset(rng, 5 + rep % 15, p, link, beta);
      for (double a : {0.1, 0.5, 1.0}) {
        auto f = [&](const VectorXd& b) { return penalized_loglik(build_state(d, link, b, a)); };
        const VectorXd g = adjusted_score(build_state(d, link, beta, a), d);
        const VectorXd fd = testing::numeric_gradient(f, beta);
        worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
        ++count;
      }
    }
  }
  return {worst <= 1e-5, std::to_string(count) + " gradients, max relative error " +
                             fmt("%.2e", worst)};
}

Verdict brute_force_equivalence() {
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> size(6, 20);
  double worst = 0.0;
  int count = 0;
  int most_iterations = 0;
  std::string failures;
  // Flat cauchit objectives contract slowly; the cap bounds work, not accuracy.
  FitConfig config;
  config.max_iter = 1000;
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::Index p = 1 + rep % 3;
    const Eigen::Index n = std::max<Eigen::Index>(size(rng), p + 2);
    for (auto kind : all_link_kinds) {
      const Link link(kind);
      const Dataset d = testing::random_dataset(rng, n, p, link, VectorXd::Zero(p), 4);
      const double a = rep % 2 == 0 ? 0.5 : 1.0;
      const auto fit = fit_mpl(d, link, a, config);
      most_iterations = std::max(most_iterations, fit.iterations);
      if (!fit.converged) {
        failures += " nonconv(" + std::to_string(rep) + "," + std::string(link.name()) + ")";
        continue;
      }
      auto objective = [&](const VectorXd& b) {
        try {
          return -penalized_loglik(build_state(d, link, b, a));
        } catch (const Error&) {
          return std::numeric_limits<double>::infinity();
        }
      };
      auto best = oracle::nelder_mead(objective, VectorXd::Zero(p));
      if (kind == LinkKind::cauchit) {
        for (double s : {-3.0, -1.0, 1.0, 3.0}) {
          auto alt = oracle::nelder_mead(objective, VectorXd::Constant(p, s));
          if (alt.value < best.value) best = alt;
        }
      }
      const double diff = (fit.beta - best.x).cwiseAbs().maxCoeff();
      worst = std::max(worst, diff);
      if (diff > 1e-5) {
        failures += " (" + std::to_string(rep) + "," + std::string(link.name()) + ")";
      }
      ++count;
    }
  }
  return {worst <= 1e-5 && failures.empty(),
          std::to_string(count) + " fits, max |beta - oracle| = " + fmt("%.2e", worst) +
              ", most outer iterations " + std::to_string(most_iterations) + failures};
}

// Separated designs: complete ones from a random hyperplane, quasi-complete
// ones with a block of observations of both outcomes placed on it.
Dataset separated_dataset(std::mt19937_64& rng, bool quasi) {
  std::normal_distribution<double> normal;
  for (;;) {
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng() % 2);
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng() % 8);
    MatrixXd X = testing::random_design(rng, n, p);
    VectorXd y(n), m(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m[i] = 1 + static_cast<double>(rng() % 3);
      if (quasi && i < 2) {
        X(i, 1) = 0.0;  // on the hyperplane x1 = 0
        y[i] = 1;
        m[i] = 2;
        continue;
      }
      y[i] = X(i, 1) > 0 ? m[i] : 0.0;
    }
    if (rank_check(X) < p) continue;
    if (y.sum() == 0 || y.sum() == m.sum()) continue;
    return Dataset(y, m, X);
  }
}

Verdict finiteness_under_separation() {
  std::mt19937_64 rng(1005);
  int fits = 0;
  double largest = 0.0;
  std::string failures;
  FitConfig ml_config;
  ml_config.max_iter = 200;
  for (int k = 0; k < 30; ++k) {
    const bool quasi = k % 2 == 1;
    const Dataset d = separated_dataset(rng, quasi);
    for (auto kind : all_link_kinds) {
      const Link link(kind);
      const auto ml = fit_ml(d, link, ml_config);
      const auto mpl = fit_mpl(d, link, 0.5);
      const double size = mpl.beta.cwiseAbs().maxCoeff();
      largest = std::max(largest, size);
      if (!ml.diverged || !mpl.converged || !(size < 1e3)) {
        failures += " (" + std::to_string(k) + "," + std::string(link.name()) + ")";
      }
      ++fits;
    }
  }
  // Synthetic season with a winless team.
  const auto contests = load_contests(data_path("nba_synthetic.csv"));
  const Dataset bt = bt_design(contests, "San Antonio Spurs");
  const auto fit = fit_mpl(bt, logit, 0.5);
  bool bt_ok = fit.converged && bt.p() == 29 && fit.beta.allFinite();
  Eigen::Index lowest = 0;
  fit.beta.minCoeff(&lowest);
  bt_ok = bt_ok && bt.coef_names()[static_cast<std::size_t>(lowest)] == "Philadelphia 76ers";
  if (bt_ok) {
    const auto w = wald(fit);
    bt_ok = w.std_errors.allFinite() && (w.std_errors.array() > 0).all();
  }
  if (!bt_ok) failures += " bt-season";
  return {failures.empty(), std::to_string(fits) + " separated (dataset, link) pairs, max|beta| = " +
                                fmt("%.3f", largest) +
                                "; season fixture: 29 finite contrasts, winless team lowest = " +
                                (bt_ok ? "yes" : "no") + failures};
}

Verdict logdet_maximal_at_zero() {
  std::mt19937_64 rng(1006);
  std::normal_distribution<double> normal(0.0, 1.0);
  int violations = 0, checks = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index p = 1 + rep % 4;
    const Dataset d = testing::random_dataset(rng, 6 + rep, p, logit, VectorXd::Zero(p));
    const double at_zero = information_logdet(d, logit, VectorXd::Zero(p));
    for (int k = 0; k < 500; ++k) {
      VectorXd beta(p);
      for (auto& b : beta) b = normal(rng);
      if (!(information_logdet(d, logit, beta) < at_zero)) ++violations;
      ++checks;
    }
  }
  return {violations == 0,
          std::to_string(checks) + " random beta, " + std::to_string(violations) + " violations"};
}

Verdict logdet_vanishes_along_rays() {
  std::mt19937_64 rng(1007);
  std::normal_distribution<double> normal;
  double smallest_drop = INFINITY;
  int checks = 0;
  for (auto kind : all_link_kinds) {
    const Link link(kind);
    for (int rep = 0; rep < 100; ++rep) {
      const Eigen::Index p = 1 + rep % 3;
      const Dataset d = testing::random_dataset(rng, 5 + rep % 10, p, link, VectorXd::Zero(p));
      VectorXd gamma(p);
      for (auto& g : gamma) g = normal(rng);
      gamma.normalize();
      const double drop =
          information_logdet(d, link, gamma) - information_logdet(d, link, 1000.0 * gamma);
      smallest_drop = std::min(smallest_drop, drop);
      ++checks;
    }
  }
  return {smallest_drop >= 10.0, std::to_string(checks) +
                                     " rays, smallest logdet drop from r=1 to r=1000 = " +
                                     fmt("%.2f", smallest_drop)};
}

Verdict shrinkage_ordering() {
  std::mt19937_64 rng(1008);
  int violations = 0, checks = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = testing::random_overlapped(rng, 12 + rep % 8, 2 + rep % 2, logit);
    const auto ml = fit_ml(d, logit);
    const auto f01 = fit_mpl(d, logit, 0.1);
    const auto f05 = fit_mpl(d, logit, 0.5);
    const auto f1 = fit_mpl(d, logit, 1.0);
    if (!(ml.converged && f01.converged && f05.converged && f1.converged)) {
      ++violations;
      continue;
    }
    violations += f1.logdet >= f05.logdet ? 0 : 1;
    violations += f05.logdet >= f01.logdet ? 0 : 1;
    violations += f05.logdet >= ml.logdet ? 0 : 1;
    violations += generalized_variance(f05) <= generalized_variance(ml) ? 0 : 1;
    checks += 4;
  }
  return {violations == 0,
          std::to_string(checks) + " orderings on 20 datasets, " + std::to_string(violations) +
              " violations"};
}

Verdict enumeration_reproduction() {
  int interior = 0, uphill_violations = 0, unconverged = 0;
  double invariance = 0.0;
  for (auto kind : {LinkKind::logit, LinkKind::probit, LinkKind::cloglog, LinkKind::cauchit}) {
    const Link link(kind);
    const auto t = enumerate_saturated(link, 9, 9, 0.5);
    const auto shifted = enumerate_saturated(link, 9, 9, 0.5, 0.0, 5.0, 0);
    for (std::size_t k = 0; k < t.cells.size(); ++k) {
      const auto& c = t.cells[k];
      if (!c.mpl_converged || !shifted.cells[k].mpl_converged) ++unconverged;
      for (int j = 0; j < 2; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        invariance = std::max(invariance, std::abs(c.pi_mpl[ju] - shifted.cells[k].pi_mpl[ju]));
      }
      if (!c.interior()) continue;
      ++interior;
      if (!(c.logdet_mpl >= *c.logdet_ml)) ++uphill_violations;
    }
  }
  const auto corner = enumerate_saturated(logit, 9, 9, 0.5, -1, 1, 0).cells.front();
  const double corner_err =
      std::max(std::abs(corner.pi_mpl[0] - 0.05), std::abs(corner.pi_mpl[1] - 0.05));
  const bool ok = uphill_violations == 0 && unconverged == 0 && invariance <= 1e-8 &&
                  corner_err <= 1e-10;
  return {ok, std::to_string(interior) + " interior cells, " + std::to_string(uphill_violations) +
                  " downhill; logit (0,0) -> (" + fmt("%.12f", corner.pi_mpl[0]) + ", " +
                  fmt("%.12f", corner.pi_mpl[1]) + "); max x-invariance gap " +
                  fmt("%.2e", invariance)};
}

Verdict path_reproduction() {
  const Dataset d = tournament8();
  std::vector<double> grid;
  for (int j = 1; j <= 20; ++j) grid.push_back(0.25 * j);
  const auto path = fit_path(d, logit, grid);
  double worst = 0.0;
  bool finite = true, monotone = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    finite = finite && path.converged[k] && path.betas[k].allFinite();
    if (k > 0 && !(path.logdets[k] >= path.logdets[k - 1])) monotone = false;
    const auto cold = fit_mpl(d, logit, grid[k]);
    worst = std::max(worst, (cold.beta - path.betas[k]).cwiseAbs().maxCoeff());
  }
  const auto& names = d.coef_names();
  const auto h = std::find(names.begin(), names.end(), "Hatters") - names.begin();
  return {finite && monotone && worst <= 1e-6,
          "20 grid points, all finite = " + std::string(finite ? "yes" : "no") +
              ", logdet monotone = " + (monotone ? "yes" : "no") + ", warm/cold gap " +
              fmt("%.2e", worst) + ", winless contrast " + fmt("%.3f", path.betas.front()[h]) +
              " -> " + fmt("%.3f", path.betas.back()[h])};
}

Verdict detector_agreement() {
  FitConfig config;
  config.max_iter = 200;
  int disagreements = 0, total = 0, separated = 0;
  auto check = [&](const Dataset& d) {
    const bool sep = detect_separation(d).status != SeparationStatus::overlap;
    const bool div = fit_ml(d, logit, config).diverged;
    separated += sep ? 1 : 0;
    disagreements += sep == div ? 0 : 1;
    ++total;
  };
  for (const char* name : {"separated.csv", "quasi_separated.csv", "overlap.csv",
                           "dose_response.csv", "intercept_only.csv"}) {
    check(load_csv(data_path(name)));
  }
  check(tournament8());
  check(bt_design(load_contests(data_path("nba_synthetic.csv")), "San Antonio Spurs"));
  std::mt19937_64 rng(1011);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index p = 1 + rep % 3;
    const Eigen::Index n = p + 2 + rep % 8;
    VectorXd beta(p);
    for (auto& b : beta) b = normal(rng);
    check(testing::random_dataset(rng, n, p, logit, beta, 1));
  }
  return {disagreements == 0, std::to_string(total) + " datasets (" + std::to_string(separated) +
                                  " separated), " + std::to_string(disagreements) +
                                  " disagreements"};
}

Verdict inner_policy_fixed_point() {
  std::mt19937_64 rng(1012);
  double worst = 0.0;
  int failures = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const Link link(all_link_kinds[static_cast<std::size_t>(rep) % all_link_kinds.size()]);
    const Eigen::Index p = 1 + rep % 3;
    const Dataset d = testing::random_dataset(rng, 10 + rep, p, link, VectorXd::Zero(p), 3);
    FitConfig full;
    full.inner = InnerPolicy::full_inner_ml;
    const auto a = fit_mpl(d, link, 0.5, full);
    const auto b = fit_mpl(d, link, 0.5);
    if (!a.converged || !b.converged) ++failures;
    worst = std::max(worst, (a.beta - b.beta).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6 && failures == 0,
          "20 datasets, max |full - step| = " + fmt("%.2e", worst)};
}

Verdict pseudo_data_bounds() {
  // A dedicated sweep on top of every fit made by the other criteria.
  std::mt19937_64 rng(1004);
  for (auto kind : all_link_kinds) {
    const Link link(kind);
    for (int rep = 0; rep < 6; ++rep) {
      const Eigen::Index p = 1 + rep % 3;
      const Dataset d = testing::random_dataset(rng, 8 + rep, p, link, VectorXd::Zero(p), 1 + rep);
      for (double a : {0.1, 1.0 / 6.0, 0.5, 1.0, 5.0}) {
        fit_mpl(d, link, a);
        FitConfig full;
        full.inner = InnerPolicy::full_inner_ml;
        fit_mpl(d, link, a, full);
      }
    }
  }
  const auto& c = pseudo_data_counters();
  const auto v = c.violations.load(), sv = c.strict_violations.load();
  return {v == 0 && sv == 0, std::to_string(c.checked.load()) + " adjusted observations, " +
                                 std::to_string(v) + " outside [0, mtilde]; " +
                                 std::to_string(c.checked_strict.load()) +
                                 " with an intercept, " + std::to_string(sv) +
                                 " not strictly inside"};
}

}  // namespace

int main() {
  // The bounds criterion reads counters accumulated by every other criterion, so it runs last.
  const std::vector<Criterion> criteria{
      {1, "closed-form intercept-only oracle", 1.0, closed_form_oracle},
      {2, "adjusted score matches finite differences", 10.0, gradient_correctness},
      {3, "agreement with derivative-free maximization", 120.0, brute_force_equivalence},
      {5, "finite penalized estimates under separation", 0.0, finiteness_under_separation},
      {6, "logit information maximal at beta = 0", 0.0, logdet_maximal_at_zero},
      {7, "information vanishes along rays", 0.0, logdet_vanishes_along_rays},
      {8, "shrinkage ordering in a", 0.0, shrinkage_ordering},
      {9, "saturated-model enumeration", 0.0, enumeration_reproduction},
      {10, "tournament ability paths", 5.0, path_reproduction},
      {11, "separation detector agrees with ML", 0.0, detector_agreement},
      {12, "inner policies share the fixed point", 0.0, inner_policy_fixed_point},
      {4, "adjusted responses within [0, totals]", 0.0, pseudo_data_bounds},
  };

  std::vector<std::string> lines(13);
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      v.pass = false;
      v.detail += "; over the " + fmt("%.0f", c.time_limit) + " s limit";
    }
    all = all && v.pass;
    std::ostringstream line;
    line << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " -- "
         << v.detail << " [" << fmt("%.2f", secs) << " s]";
    lines[static_cast<std::size_t>(c.id)] = line.str();
    std::fprintf(stderr, "%s\n", line.str().c_str());
  }
  std::printf("\n");
  for (std::size_t k = 1; k < lines.size(); ++k) std::printf("%s\n", lines[k].c_str());
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
