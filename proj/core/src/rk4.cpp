#include "mfgnet/rk4.hpp"

#include <algorithm>
#include <cmath>

#include "mfgnet/error.hpp"

namespace mfgnet {

std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "time step must be positive");
  }
  const double span = t1 - t0;
  if (span < 0.0) {
    throw Error(ErrorCode::invalid_argument, "time interval is reversed");
  }
  if (span == 0.0) return {t0};
  // Tolerate round-off in span/dt so T=10, dt=1e-3 gives exactly 10000 steps.
  const auto steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
  std::vector<double> grid(steps + 1);
  const double h = span / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) {
    grid[k] = t0 + h * static_cast<double>(k);
  }
  grid.back() = t1;
  return grid;
}

}  // namespace mfgnet
