#pragma once

#include <cstddef>
#include <vector>

namespace mfgnet {

// Classical fixed-step fourth-order Runge-Kutta. `State` is any contiguous
// container of doubles with size() and operator[] (std::array, std::vector).
// `rhs(t, y, dydt)` writes the derivative into dydt, which has y's size.
template <class State, class Rhs>
State rk4_step(const Rhs& rhs, double t, const State& y, double h) {
  const std::size_t n = y.size();
  State k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;
  rhs(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(t + h, tmp, k4);
  State out = y;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

/// Uniform grid on [t0, t1] with the largest step <= dt that divides the
/// interval evenly. A zero-length interval yields the single point t0.
std::vector<double> uniform_grid(double t0, double t1, double dt);

}  // namespace mfgnet
