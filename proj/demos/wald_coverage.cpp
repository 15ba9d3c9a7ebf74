// Coverage of 95% Wald intervals from the a = 1/2 fit, intercept-only logit
// with m = 50, as the true intercept moves into the tail. Once the true
// probability is far below 1/(2m) the penalized estimate cannot get there
// and coverage falls towards zero whatever the nominal level.
//
// usage: wald_coverage [replicates] [seed]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "jeffreys/jeffreys.hpp"

int main(int argc, char** argv) {
  using namespace jeffreys;
  const int replicates = argc > 1 ? std::atoi(argv[1]) : 2000;
  const auto seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2024ULL;
  const int m = 50;
  const Link logit(LinkKind::logit);

  std::mt19937_64 rng(seed);
  std::printf("%8s %12s %10s %12s\n", "beta", "pi", "coverage", "mean_est");
  for (double beta : {0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0, -10.0}) {
    const double pi = 1.0 / (1.0 + std::exp(-beta));
    std::binomial_distribution<int> draw(m, pi);
    int covered = 0;
    double total = 0.0;
    for (int r = 0; r < replicates; ++r) {
      MatrixXd X = MatrixXd::Ones(1, 1);
      const Dataset d((VectorXd(1) << draw(rng)).finished(), VectorXd::Constant(1, m), X);
      const auto w = wald(fit_mpl(d, logit, 0.5), 0.95);
      if (w.lower[0] <= beta && beta <= w.upper[0]) ++covered;
      total += w.estimates[0];
    }
    std::printf("%8.1f %12.3e %10.4f %12.4f\n", beta, pi,
                static_cast<double>(covered) / replicates, total / replicates);
  }
  return 0;
}
