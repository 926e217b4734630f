// Mean velocity E[V_t | V_0 = c] over time for the damped and Polya cases.
#include <cstdio>

#include "telegraph/telegraph.hpp"

int main() {
  using namespace telegraph;
  const MotionParams m{1, 1};
  std::printf("%6s %14s %14s %14s\n", "t", "bernoulli0.3", "polya(1,2,2)", "polya(2,1,2)");
  for (double t = 0.25; t <= 4.0; t += 0.25) {
    std::printf("%6.2f %14.8f %14.8f %14.8f\n", t, mean_velocity_damped(0.3, 1, 1, m, t).value,
                mean_velocity_polya(1, 2, 2, 1, 1, m, t).value, mean_velocity_polya(2, 1, 2, 1, 1, m, t).value);
  }
}
