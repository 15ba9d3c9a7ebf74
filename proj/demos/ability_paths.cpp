// Ability contrasts along a grid of penalty exponents for a round robin in
// which one team never wins. Plain ML diverges; every penalized fit is
// finite and the winless team's contrast rises towards zero as a grows.
//
// usage: ability_paths [contests.csv] [reference]

#include <cstdio>
#include <string>

#include "jeffreys/jeffreys.hpp"

int main(int argc, char** argv) {
  using namespace jeffreys;
  const std::string file = argc > 1 ? argv[1] : JEFFREYS_DATA_DIR "/tournament8.csv";
  const std::string reference = argc > 2 ? argv[2] : "Anchors";
  const Link logit(LinkKind::logit);

  const Dataset d = bt_design(load_contests(file), reference);
  const auto report = detect_separation(d);
  const auto ml = fit_ml(d, logit);
  std::printf("separation: %s, ML diverged: %s\n", std::string(to_string(report.status)).c_str(),
              ml.diverged ? "yes" : "no");

  const auto path = fit_path(d, logit, log_grid(0.05, 5.0, 20));
  std::printf("%8s %10s", "a", "logdet");
  for (const auto& name : d.coef_names()) std::printf(" %9.9s", name.c_str());
  std::printf("\n");
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    std::printf("%8.4f %10.4f", path.grid[k], path.logdets[k]);
    for (Eigen::Index t = 0; t < d.p(); ++t) std::printf(" %9.4f", path.betas[k][t]);
    std::printf("%s\n", path.converged[k] ? "" : "  (not converged)");
  }
  return 0;
}
