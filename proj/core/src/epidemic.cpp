#include "mfgnet/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>
#include <json.hpp>

#include "mfgnet/io.hpp"
#include "mfgnet/rk4.hpp"

namespace mfgnet {

void EpidemicParams::validate() const {
  for (double b : {beta13, beta23, beta31, beta32}) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("epidemic rates must be finite and >= 0 (got {})", b));
    }
  }
}

void EpidemicParams::require_threshold_hypothesis() const {
  validate();
  if (!(beta13 > 0 && beta23 > 0 && beta31 > 0 && beta32 > 0)) {
    throw Error(ErrorCode::hypothesis_violated, "all epidemic rates must be positive");
  }
  if (!graph.is_strongly_connected()) {
    throw Error(ErrorCode::hypothesis_violated, "graph is not strongly connected");
  }
}

namespace {

void check_size(std::size_t n, const Graph& g) {
  if (n != g.size()) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("state has {} nodes, graph has {}", n, g.size()));
  }
}

// Packed (s, r) right-hand side with z = 1 - s - r.
void virus_packed(const std::vector<double>& y, std::vector<double>& dy,
                  double b13, double b23, double b31, double b32, const Graph& g) {
  const std::size_t n = g.size();
  std::vector<double> z(n), Az(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = 1.0 - y[i] - y[n + i];
  g.multiply(z, Az);
  for (std::size_t i = 0; i < n; ++i) {
    dy[i] = -b23 * y[i] * Az[i] + b32 * z[i];
    dy[n + i] = -b13 * y[n + i] * Az[i] + b31 * z[i];
  }
}

}  // namespace

EpidemicState virus_network_rhs(const EpidemicState& x, const EpidemicParams& p) {
  const std::size_t n = x.size();
  check_size(n, p.graph);
  std::vector<double> y(2 * n), dy(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x.s[i];
    y[n + i] = x.r[i];
  }
  virus_packed(y, dy, p.beta13, p.beta23, p.beta31, p.beta32, p.graph);
  EpidemicState d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.s[i] = dy[i];
    d.r[i] = dy[n + i];
    d.z[i] = -(d.s[i] + d.r[i]);
  }
  return d;
}

MfgMapping mfg_to_virus_map(const EpidemicParams& p, double x3) {
  p.validate();
  auto weight = [](double num, double den, const char* what) {
    const double g = num / den;
    if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(g)) {
      throw Error(ErrorCode::degenerate_mapping,
                  fmt::format("{} = {}/{} is not a positive weight", what, num, den));
    }
    return g;
  };
  MfgMapping m;
  m.y_star = {-p.beta31, -p.beta32};
  m.gamma13 = weight(p.beta31, p.beta13 * x3, "Gamma13");
  m.gamma23 = weight(p.beta32, p.beta23 * x3, "Gamma23");
  return m;
}

ThresholdVerdict stability_condition(std::span<const double> s_star,
                                     const EpidemicParams& p) {
  check_size(s_star.size(), p.graph);
  ThresholdVerdict v;
  v.stable = true;
  const double rhs = p.beta32 + p.beta31;
  for (std::size_t i = 0; i < s_star.size(); ++i) {
    const double lhs =
        (p.beta23 * s_star[i] + p.beta13 * (1.0 - s_star[i])) * p.graph.degree(i);
    v.margin.push_back(rhs - lhs);
    v.stable = v.stable && lhs < rhs;
  }
  return v;
}

std::vector<double> linearized_infection_rhs(std::span<const double> z,
                                             std::span<const double> s_star,
                                             const EpidemicParams& p) {
  const std::size_t n = z.size();
  check_size(n, p.graph);
  std::vector<double> Az(n), out(n);
  p.graph.multiply(z, Az);
  for (std::size_t i = 0; i < n; ++i) {
    const double gain = p.beta23 * s_star[i] + p.beta13 * (1.0 - s_star[i]);
    out[i] = gain * Az[i] - (p.beta31 + p.beta32) * z[i];
  }
  return out;
}

std::vector<double> simulate_linearized_infection(std::span<const double> z0,
                                                  std::span<const double> s_star,
                                                  const EpidemicParams& p,
                                                  double horizon, double dt) {
  std::vector<double> z(z0.begin(), z0.end());
  const std::vector<double> grid = uniform_grid(0.0, horizon, dt);
  auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy = linearized_infection_rhs(y, s_star, p);
  };
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    z = rk4_step(rhs, grid[k], z, grid[k + 1] - grid[k]);
  }
  return z;
}

EpidemicState sir_limit_rhs(const EpidemicState& x, double beta23, double beta31,
                            const Graph& g) {
  const std::size_t n = x.size();
  check_size(n, g);
  std::vector<double> Az(n);
  g.multiply(x.z, Az);
  EpidemicState d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.s[i] = -beta23 * x.s[i] * Az[i];
    d.r[i] = beta31 * x.z[i];
    d.z[i] = -(d.s[i] + d.r[i]);
  }
  return d;
}

NetworkTrajectory simulate_sir_limit(const EpidemicState& x0, double beta23,
                                     double beta31, const Graph& g,
                                     double horizon, double dt) {
  const std::size_t n = x0.size();
  check_size(n, g);
  auto rhs = [&](double, std::size_t, const std::vector<double>& y,
                 std::vector<double>& dy) {
    std::vector<double> z(n), Az(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = 1.0 - y[i] - y[n + i];
    g.multiply(z, Az);
    for (std::size_t i = 0; i < n; ++i) {
      dy[i] = -beta23 * y[i] * Az[i];
      dy[n + i] = beta31 * z[i];
    }
  };
  return integrate_network(x0, rhs, horizon, dt);
}

EpidemicRun simulate_epidemic(const EpidemicState& x0, const EpidemicParams& p,
                              const AttackSchedule& sched, double horizon,
                              double dt) {
  p.validate();
  sched.validate();
  check_size(x0.size(), p.graph);
  auto rhs = [&](double, std::size_t step, const std::vector<double>& y,
                 std::vector<double>& dy) {
    const double m = sched.multiplier(static_cast<std::int64_t>(step));
    virus_packed(y, dy, p.beta13 * m, p.beta23 * m, p.beta31, p.beta32, p.graph);
  };
  EpidemicRun run;
  run.trajectory = integrate_network(x0, rhs, horizon, dt);
  const auto& states = run.trajectory.states;
  run.steady_infection = states.back().z;

  const std::size_t cycle = sched.kind == AttackKind::sequential
                                ? static_cast<std::size_t>(sched.burst_period)
                                : 1;
  if (states.size() > cycle) {
    const std::size_t last = states.size() - 1;
    const double span =
        run.trajectory.times[last] - run.trajectory.times[last - cycle];
    for (std::size_t i = 0; i < x0.size(); ++i) {
      run.staleness = std::max(
          run.staleness, std::abs(states[last].z[i] - states[last - cycle].z[i]) / span);
    }
    run.steady = run.staleness < 1e-6;
  }
  return run;
}

void write_infection_json(std::span<const double> infection, std::ostream& out) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < infection.size(); ++i) {
    j[std::to_string(i + 1)] = round_sig12(infection[i]);
  }
  out << j.dump(2) << '\n';
}

}  // namespace mfgnet
