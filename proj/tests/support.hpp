#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <mfgnet/core.hpp>
#include <mfgnet/rng.hpp>
#include <mfgnet/stationary.hpp>

namespace testsupport {

using namespace mfgnet;

// f_i(x) = x, unit R on the chain arcs, Gamma13 = Gamma23 = 0.5.
inline CostWeights crowd_averse() {
  CostWeights w = CostWeights::with_slopes({1.0, 1.0, 1.0});
  w.Gamma[0][2] = 0.5;
  w.Gamma[1][2] = 0.5;
  return w;
}

inline CostWeights weights(std::array<double, 3> slopes, double g13, double g23) {
  CostWeights w = CostWeights::with_slopes(slopes);
  w.Gamma[0][2] = g13;
  w.Gamma[1][2] = g23;
  return w;
}

// Random strongly connected undirected graph: a random spanning tree plus
// extra edges.
inline Graph random_connected_graph(std::size_t n, Rng& rng, double extra = 0.3) {
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    a[i * n + j] = a[j * n + i] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(extra)) a[i * n + j] = a[j * n + i] = 1.0;
    }
  }
  return Graph(n, std::move(a));
}

// Breadth-first reachability from every node over the raw adjacency.
inline bool bfs_strongly_connected(const Graph& g) {
  const std::size_t n = g.size();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> q{s};
    seen[s] = 1;
    for (std::size_t h = 0; h < q.size(); ++h) {
      for (std::size_t j = 0; j < n; ++j) {
        if (g(q[h], j) > 0.0 && !seen[j]) {
          seen[j] = 1;
          q.push_back(j);
        }
      }
    }
    if (q.size() != n) return false;
  }
  return true;
}

// Brute force over y in [lo, 0]^2 minimizing the sup residual of the reduced
// value system.
struct GridHit {
  double y1, y2, residual;
};

inline GridHit grid_search_reduced(const ReducedCoefficients& k, double lo, double step) {
  GridHit best{0, 0, std::numeric_limits<double>::infinity()};
  const int m = static_cast<int>(std::lround(-lo / step));
  for (int i = 0; i <= m; ++i) {
    const double y1 = lo + i * step;
    for (int j = 0; j <= m; ++j) {
      const double y2 = lo + j * step;
      const double r1 = -0.5 * k.a11 * y1 * y1 - 0.5 * k.a12 * y2 * y2 + k.c1;
      const double r2 = -0.5 * k.a21 * y1 * y1 - 0.5 * k.a22 * y2 * y2 + k.c2;
      const double r = std::max(std::abs(r1), std::abs(r2));
      if (r < best.residual) best = {y1, y2, r};
    }
  }
  return best;
}

// Forward shooting on the regime v1, v2 < v3 with linear congestion. State
// (x1, x2, y1, y2, int H3), y = (v1 - v3, v2 - v3); v3(0) = psi3 + int_0^T H3.
struct ShootingModel {
  double q1 = 1, q2 = 1, q3 = 1;
  double g13 = 0.5, g23 = 0.5;
  double r31 = 1, r32 = 1;

  std::array<double, 5> rhs(const std::array<double, 5>& s) const {
    const double x1 = s[0], x2 = s[1], x3 = 1.0 - s[0] - s[1];
    const double y1 = s[2], y2 = s[3];
    const double b13 = std::max(0.0, -y1) / g13, b31 = std::max(0.0, -y1) / r31;
    const double b23 = std::max(0.0, -y2) / g23, b32 = std::max(0.0, -y2) / r32;
    const double h1 = 0.5 * y1 * y1 / g13 + q1 * x1;
    const double h2 = 0.5 * y2 * y2 / g23 + q2 * x2;
    const double h3 = -0.5 * (y1 * y1 / r31 + y2 * y2 / r32) + q3 * x3;
    return {b31 * x3 - b13 * x1, b32 * x3 - b23 * x2, -h1 + h3, -h2 + h3, h3};
  }

  // RK4; stops early once a value difference diverges below -1e3 (the
  // forward value flow blows up in finite time off the stable manifold).
  std::array<double, 5> flow(std::array<double, 5> s, double T, double dt) const {
    const int n = static_cast<int>(std::lround(T / dt));
    const double h = T / n;
    for (int k = 0; k < n; ++k) {
      const auto k1 = rhs(s);
      std::array<double, 5> t{};
      for (int i = 0; i < 5; ++i) t[i] = s[i] + 0.5 * h * k1[i];
      const auto k2 = rhs(t);
      for (int i = 0; i < 5; ++i) t[i] = s[i] + 0.5 * h * k2[i];
      const auto k3 = rhs(t);
      for (int i = 0; i < 5; ++i) t[i] = s[i] + h * k3[i];
      const auto k4 = rhs(t);
      for (int i = 0; i < 5; ++i) s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!(s[2] > -1e3) || !(s[3] > -1e3)) {
        s[2] = std::min(s[2], -1e3);
        s[3] = std::min(s[3], -1e3);
        break;
      }
    }
    return s;
  }

  // Terminal mismatch y(T) - (psi1 - psi3, psi2 - psi3)(x(T)).
  std::array<double, 2> mismatch(double x1, double x2, double y1, double y2, double T,
                                 double dt) const {
    const auto e = flow({x1, x2, y1, y2, 0.0}, T, dt);
    const double x3 = 1.0 - e[0] - e[1];
    return {e[2] - (q1 * e[0] - q3 * x3), e[3] - (q2 * e[1] - q3 * x3)};
  }

  // Nested bisection on y(0) in [lo, 0]^2: inner on y2 zeroes the second
  // mismatch, outer on y1 the first.
  std::array<double, 2> solve(double x1, double x2, double T, double dt,
                              double lo = -3.0) const {
    auto inner = [&](double y1) {
      double a = lo, b = 0.0;
      for (int it = 0; it < 64 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        (mismatch(x1, x2, y1, m, T, dt)[1] < 0.0 ? a : b) = m;
      }
      return 0.5 * (a + b);
    };
    double a = lo, b = 0.0;
    for (int it = 0; it < 64 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      (mismatch(x1, x2, m, inner(m), T, dt)[0] < 0.0 ? a : b) = m;
    }
    const double y1 = 0.5 * (a + b);
    return {y1, inner(y1)};
  }

  // (x(T), v(0)) along the shooting solution.
  std::pair<std::array<double, 3>, std::array<double, 3>> trajectory_ends(
      double x1, double x2, double T, double dt) const {
    const auto y = solve(x1, x2, T, dt);
    const auto e = flow({x1, x2, y[0], y[1], 0.0}, T, dt);
    const double x3 = 1.0 - e[0] - e[1];
    const double v3 = q3 * x3 + e[4];
    return {{e[0], e[1], x3}, {y[0] + v3, y[1] + v3, v3}};
  }
};

}  // namespace testsupport
