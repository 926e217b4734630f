// Damped-case law at t = 1 next to a Monte Carlo histogram of the same process.
#include <cstdio>

#include "telegraph/telegraph.hpp"

int main() {
  using namespace telegraph;
  const MotionParams m{1, 1};
  const double p = 0.3, t = 1;
  const auto law = law_damped(p, 1, 1, m, t);
  const auto emp = estimate_law(TrialScheme::bernoulli(p), IntertimeModel::linear_rate(1, 1), m, t, 200000, 20, 42);

  const auto atoms = law.atoms();
  std::printf("atom at -vt: %.6f (mc %.6f)\n", atoms.minus, emp.atom_minus_freq());
  std::printf("atom at  ct: %.6f (mc %.6f)\n", atoms.plus, emp.atom_plus_freq());
  std::printf("%10s %12s %12s %12s\n", "x", "density", "mc", "mc_se");
  for (std::size_t i = 0; i < emp.counts.size(); ++i) {
    const double x = 0.5 * (emp.edges[i] + emp.edges[i + 1]);
    std::printf("%10.4f %12.6f %12.6f %12.6f\n", x, law.density(x), emp.density(i), emp.std_err(i));
  }
}
