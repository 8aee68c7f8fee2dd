#include <cmath>
#include <cstdio>

#include "spectrum/equilibrium.hpp"
#include "spectrum/presets.hpp"

int main() {
  const auto r = spectrum::solve(spectrum::homogeneous_box_market({}, 0.0));
  std::printf("%.6f\n", r.report.social_welfare);
  return std::abs(r.report.social_welfare - 0.25) < 1e-12 ? 0 : 1;
}
