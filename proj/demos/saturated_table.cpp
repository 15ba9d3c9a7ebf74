// Two-group saturated model with m1 = m2 = 9: ML and penalized fitted
// probabilities for every outcome pair, and the log information of each.
//
// usage: saturated_table [link] [a]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "jeffreys/jeffreys.hpp"

int main(int argc, char** argv) {
  using namespace jeffreys;
  const Link link = Link::from_name(argc > 1 ? argv[1] : "logit");
  const double a = argc > 2 ? std::atof(argv[2]) : 0.5;

  const auto t = enumerate_saturated(link, 9, 9, a);
  std::printf("link %s, a = %g, z0 = %.6f\n", std::string(link.name()).c_str(), a, find_z0(link));
  std::printf("%3s %3s %9s %9s %9s %9s %10s %10s\n", "y1", "y2", "ml1", "ml2", "mpl1", "mpl2",
              "logdet_ml", "logdet_mpl");
  for (const auto& c : t.cells) {
    std::printf("%3d %3d %9.4f %9.4f %9.4f %9.4f ", c.y1, c.y2, c.pi_ml[0], c.pi_ml[1],
                c.pi_mpl[0], c.pi_mpl[1]);
    if (c.logdet_ml) {
      std::printf("%10.4f", *c.logdet_ml);
    } else {
      std::printf("%10s", "-inf");
    }
    std::printf(" %10.4f\n", c.logdet_mpl);
  }
  return 0;
}
