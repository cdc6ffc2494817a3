// Walks the 2x2 toy family from nearly overlapping to orthogonal null spaces
// and prints each bound next to the true smallest positive eigenvalue of K.

#include <cmath>
#include <cstdio>

#include "spbounds/spbounds.hpp"

int main() {
  using namespace spbounds;
  std::printf("%6s %12s %12s %12s %12s\n", "b2", "lowest-rank", "wbound(g*)", "kernel", "mu_min+(K)");
  for (double b2 : {0.05, 0.1, 0.3, 0.5, 0.8, 0.95}) {
    const SaddleProblem p = gen_toy({std::sqrt(1.0 - b2 * b2), b2});
    const double lr = lowest_rank_bound(p).value;
    const double wb = wbound(p, WeightMatrix::scalar(optimal_gamma(p))).value;
    const double ka = kernel_angle_bound(p).value;
    std::printf("%6.2f %12.6g %12.6g %12.6g %12.6g\n", b2, lr, wb, ka, oracle(p).muMinPlusK);
  }
  return 0;
}
