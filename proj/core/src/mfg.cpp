#include "mfgnet/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/core.h>

#include "mfgnet/io.hpp"
#include "mfgnet/rk4.hpp"
#include "mfgnet/rng.hpp"

namespace mfgnet {

namespace {

constexpr double kSimplexDriftLimit = 1e-6;

double neg_part(double a) { return std::min(a, 0.0); }
double pos_part(double a) { return std::max(a, 0.0); }

// Index of the grid cell containing t and the interpolation weight of its
// right end, clamped to the grid.
std::pair<std::size_t, double> locate(const std::vector<double>& times,
                                      double t) {
  if (times.size() < 2 || t <= times.front()) return {0, 0.0};
  if (t >= times.back()) return {times.size() - 2, 1.0};
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
  const double theta = (t - times[k]) / (times[k + 1] - times[k]);
  return {k, theta};
}

SimplexState lerp(const SimplexState& a, const SimplexState& b, double theta) {
  return SimplexState::project(a.x1() + theta * (b.x1() - a.x1()),
                               a.x2() + theta * (b.x2() - a.x2()),
                               a.x3() + theta * (b.x3() - a.x3()));
}

ValueVector lerp(const ValueVector& a, const ValueVector& b, double theta) {
  ValueVector out;
  for (std::size_t i = 0; i < 3; ++i) out[i] = a[i] + theta * (b[i] - a[i]);
  return out;
}

}  // namespace

Vec3 difference_operator(const ValueVector& v, Opinion i) {
  const double vi = v[i];
  return {v[0] - vi, v[1] - vi, v[2] - vi};
}

Vec3 optimal_control(const ValueVector& v, Opinion i, const CostWeights& w) {
  const Vec3 d = difference_operator(v, i);
  Vec3 rho{0.0, 0.0, 0.0};
  for (Opinion j : kOpinions) {
    if (!is_chain_arc(i, j)) continue;
    rho[idx(j)] = -neg_part(d[idx(j)]) / w.r(i, j);
  }
  return rho;
}

Vec3 worst_disturbance(const ValueVector& v, Opinion i, const CostWeights& w) {
  const Vec3 d = difference_operator(v, i);
  Vec3 dist{0.0, 0.0, 0.0};
  for (Opinion j : kOpinions) {
    if (!is_chain_arc(i, j)) continue;
    dist[idx(j)] = pos_part(d[idx(j)]) / w.gamma(i, j);
  }
  return dist;
}

double self_rate(const Vec3& rates, Opinion i) {
  double sum = 0.0;
  for (Opinion j : kOpinions) {
    if (j != i) sum += rates[idx(j)];
  }
  return -sum;
}

double hamiltonian(const SimplexState& x, const ValueVector& v, Opinion i,
                   const CostWeights& w) {
  const Vec3 d = difference_operator(v, i);
  double h = 0.0;
  for (Opinion j : kOpinions) {
    if (!is_chain_arc(i, j)) continue;
    const double dn = neg_part(d[idx(j)]);
    const double dp = pos_part(d[idx(j)]);
    h += -0.5 * dn * dn / w.r(i, j) + 0.5 * dp * dp / w.gamma(i, j);
  }
  return h + w.congestion(i, x[i]);
}

double hamiltonian_integrand(const SimplexState& x, const ValueVector& v,
                             Opinion i, const CostWeights& w, const Vec3& rho,
                             const Vec3& dist) {
  const Vec3 d = difference_operator(v, i);
  double value = w.congestion(i, x[i]);
  for (Opinion j : kOpinions) {
    if (!is_chain_arc(i, j)) continue;
    const std::size_t k = idx(j);
    value += 0.5 * w.r(i, j) * rho[k] * rho[k] -
             0.5 * w.gamma(i, j) * dist[k] * dist[k] + (rho[k] + dist[k]) * d[k];
  }
  return value;
}

RateMatrix equilibrium_rates(const ValueVector& v, const CostWeights& w) {
  auto beta = [&](Opinion from, Opinion to) {
    return optimal_control(v, from, w)[idx(to)] +
           worst_disturbance(v, from, w)[idx(to)];
  };
  return RateMatrix(beta(Opinion::a, Opinion::uncommitted),
                    beta(Opinion::uncommitted, Opinion::a),
                    beta(Opinion::b, Opinion::uncommitted),
                    beta(Opinion::uncommitted, Opinion::b));
}

Vec3 kolmogorov_rhs(const SimplexState& x, const RateMatrix& beta) {
  const double d1 = x.x3() * beta.b31() - x.x1() * beta.b13();
  const double d2 = x.x3() * beta.b32() - x.x2() * beta.b23();
  return {d1, d2, -(d1 + d2)};
}

HjbDerivative hjb_rhs(const SimplexState& x, const ValueVector& v,
                      const CostWeights& w) {
  HjbDerivative out;
  for (Opinion i : kOpinions) out.dv[idx(i)] = -hamiltonian(x, v, i, w);
  out.regime_violation = v[Opinion::a] > v[Opinion::uncommitted] ||
                         v[Opinion::b] > v[Opinion::uncommitted];
  return out;
}

ValueVector terminal_values(const SimplexState& x_final, const CostWeights& w) {
  ValueVector psi;
  for (Opinion i : kOpinions) psi[i] = w.congestion(i, x_final[i]);
  return psi;
}

SimplexState Trajectory::state_at(double t) const {
  if (states.empty()) {
    throw Error(ErrorCode::invalid_argument, "empty trajectory");
  }
  if (states.size() == 1) return states.front();
  const auto [k, theta] = locate(times, t);
  return lerp(states[k], states[k + 1], theta);
}

ValueVector Trajectory::value_at(double t) const {
  if (!has_values() || values.empty()) {
    throw Error(ErrorCode::invalid_argument, "trajectory carries no values");
  }
  if (values.size() == 1) return values.front();
  const auto [k, theta] = locate(times, t);
  return lerp(values[k], values[k + 1], theta);
}

Trajectory integrate_forward(const SimplexState& x0, const RateSchedule& beta,
                             double horizon, double dt) {
  if (!(horizon >= 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("need horizon >= 0 and dt > 0 (got {}, {})",
                            horizon, dt));
  }
  if (horizon > 0.0 && dt > horizon) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("dt={} exceeds the horizon {}", dt, horizon));
  }
  Trajectory traj;
  traj.times = uniform_grid(0.0, horizon, dt);
  traj.states.reserve(traj.times.size());
  traj.states.push_back(x0);

  auto rhs = [&](double t, const std::array<double, 2>& y,
                 std::array<double, 2>& dy) {
    const RateMatrix b = beta(t);
    const double x3 = 1.0 - y[0] - y[1];
    dy[0] = x3 * b.b31() - y[0] * b.b13();
    dy[1] = x3 * b.b32() - y[1] * b.b23();
  };

  std::array<double, 2> y{x0.x1(), x0.x2()};
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    const double h = traj.times[k + 1] - traj.times[k];
    y = rk4_step(rhs, traj.times[k], y, h);
    const double x3 = 1.0 - y[0] - y[1];
    if (!std::isfinite(x3) || y[0] < -kSimplexDriftLimit ||
        y[1] < -kSimplexDriftLimit || x3 < -kSimplexDriftLimit) {
      throw Error(ErrorCode::step_too_large,
                  fmt::format("forward step at t={} left the simplex "
                              "({}, {}, {}); reduce dt",
                              traj.times[k + 1], y[0], y[1], x3));
    }
    const SimplexState x = SimplexState::project(y[0], y[1], x3);
    y = {x.x1(), x.x2()};
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory integrate_backward(const ValueVector& terminal,
                              const Trajectory& x_traj, const CostWeights& w) {
  if (x_traj.states.empty() || x_traj.states.size() != x_traj.times.size()) {
    throw Error(ErrorCode::invalid_argument,
                "distribution trajectory is empty or misaligned");
  }
  Trajectory out = x_traj;
  const std::size_t n = out.times.size();
  out.values.assign(n, ValueVector{});
  out.values[n - 1] = terminal;

  for (std::size_t k = n - 1; k > 0; --k) {
    const double t_hi = out.times[k];
    const double t_lo = out.times[k - 1];
    const SimplexState& x_hi = out.states[k];
    const SimplexState& x_lo = out.states[k - 1];
    auto rhs = [&](double t, const std::array<double, 3>& y,
                   std::array<double, 3>& dy) {
      const double theta = (t_hi - t) / (t_hi - t_lo);
      const SimplexState x = lerp(x_hi, x_lo, theta);
      ValueVector v{y};
      dy = hjb_rhs(x, v, w).dv;
    };
    const std::array<double, 3> next =
        rk4_step(rhs, t_hi, out.values[k].v, t_lo - t_hi);
    for (double c : next) {
      if (!std::isfinite(c)) {
        throw Error(ErrorCode::step_too_large,
                    fmt::format("value function diverged at t={}; reduce dt",
                                t_lo));
      }
    }
    out.values[k - 1].v = next;
  }
  return out;
}

RateSchedule equilibrium_schedule(const Trajectory& traj, const CostWeights& w) {
  return [&traj, &w](double t) { return equilibrium_rates(traj.value_at(t), w); };
}

void ItvpConfig::validate() const {
  if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon || !(tolerance > 0.0) ||
      !(relaxation > 0.0) || relaxation > 1.0 || max_iterations < 1) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("invalid ITVP config: horizon={} dt={} relaxation={} "
                            "tolerance={} max_iterations={}",
                            horizon, dt, relaxation, tolerance, max_iterations));
  }
}

ItvpResult solve_itvp(const SimplexState& x0, const CostWeights& w,
                      const ItvpConfig& cfg) {
  return solve_itvp(x0, w, cfg, [&w](const SimplexState& x_final) {
    return terminal_values(x_final, w);
  });
}

ItvpResult solve_itvp(const SimplexState& x0, const CostWeights& w,
                      const ItvpConfig& cfg, const TerminalCost& terminal) {
  cfg.validate();
  w.validate();

  Trajectory current;
  current.times = uniform_grid(0.0, cfg.horizon, cfg.dt);
  current.states.assign(current.times.size(), x0);

  ItvpResult result;
  const double lambda = cfg.relaxation;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const Trajectory valued =
        integrate_backward(terminal(current.states.back()), current, w);
    const Trajectory next = integrate_forward(
        x0, equilibrium_schedule(valued, w), cfg.horizon, cfg.dt);

    double change = 0.0;
    for (std::size_t k = 0; k < current.states.size(); ++k) {
      const SimplexState& old_x = current.states[k];
      const SimplexState& new_x = next.states[k];
      const SimplexState relaxed = SimplexState::project(
          lambda * new_x.x1() + (1.0 - lambda) * old_x.x1(),
          lambda * new_x.x2() + (1.0 - lambda) * old_x.x2(),
          lambda * new_x.x3() + (1.0 - lambda) * old_x.x3());
      for (std::size_t c = 0; c < 3; ++c) {
        change = std::max(change, std::abs(relaxed[c] - old_x[c]));
      }
      current.states[k] = relaxed;
    }
    result.iterations = iter;
    result.last_change = change;
    if (change < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.trajectory =
      integrate_backward(terminal(current.states.back()), current, w);
  const Trajectory image =
      integrate_forward(x0, equilibrium_schedule(result.trajectory, w),
                        cfg.horizon, cfg.dt);
  double residual = 0.0;
  for (std::size_t k = 0; k < image.states.size(); ++k) {
    for (std::size_t c = 0; c < 3; ++c) {
      residual = std::max(
          residual, std::abs(image.states[k][c] - current.states[k][c]));
    }
  }
  result.kolmogorov_residual = residual;
  return result;
}

Opinion AgentPath::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return states.front();
  return states[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

AgentPath sample_chain_path(const RateSchedule& beta, double rate_bound,
                            double horizon, Opinion start, std::uint64_t seed) {
  AgentPath path;
  path.jump_times.push_back(0.0);
  path.states.push_back(start);
  if (!(rate_bound > 0.0)) return path;

  Rng rng(seed);
  Opinion state = start;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate_bound);
    if (t > horizon) break;
    const RateMatrix b = beta(t);
    const double u = rng.uniform() * rate_bound;
    // Walk the candidate arcs; a proposal landing past the total exit rate
    // is a rejected (virtual) jump.
    double acc = 0.0;
    for (Opinion to : kOpinions) {
      if (!is_chain_arc(state, to)) continue;
      acc += b(state, to);
      if (u < acc) {
        state = to;
        path.jump_times.push_back(t);
        path.states.push_back(state);
        break;
      }
    }
  }
  return path;
}

namespace {

double max_exit_rate(const Trajectory& traj, const CostWeights& w) {
  double bound = 0.0;
  for (const ValueVector& v : traj.values) {
    const RateMatrix b = equilibrium_rates(v, w);
    for (Opinion s : kOpinions) bound = std::max(bound, b.exit_rate(s));
  }
  return bound;
}

}  // namespace

AgentPath sample_agent_path(const Trajectory& traj, const CostWeights& w,
                            Opinion start, std::uint64_t seed) {
  if (!traj.has_values()) {
    throw Error(ErrorCode::invalid_argument,
                "agent sampling needs a trajectory with values");
  }
  // Rates are piecewise linear in |Delta v| between grid points, so the grid
  // maximum bounds them everywhere.
  return sample_chain_path(equilibrium_schedule(traj, w), max_exit_rate(traj, w),
                           traj.horizon(), start, seed);
}

Vec3 sample_population(const Trajectory& traj, const CostWeights& w,
                       std::size_t n_agents, std::uint64_t seed, unsigned jobs) {
  if (!traj.has_values()) {
    throw Error(ErrorCode::invalid_argument,
                "agent sampling needs a trajectory with values");
  }
  const double bound = max_exit_rate(traj, w);
  const RateSchedule beta = equilibrium_schedule(traj, w);
  const SimplexState x0 = traj.states.front();
  const double horizon = traj.horizon();

  std::vector<Opinion> finals(n_agents);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Rng pick(derive_seed(seed, 2 * k));
      const double u = pick.uniform();
      const Opinion start = u < x0.x1()               ? Opinion::a
                            : u < x0.x1() + x0.x2()   ? Opinion::b
                                                      : Opinion::uncommitted;
      finals[k] = sample_chain_path(beta, bound, horizon, start,
                                    derive_seed(seed, 2 * k + 1))
                      .states.back();
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1 || n_agents < 2 * jobs) {
    work(0, n_agents);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_agents + jobs - 1) / jobs;
    for (std::size_t begin = 0; begin < n_agents; begin += chunk) {
      pool.emplace_back(work, begin, std::min(n_agents, begin + chunk));
    }
    for (auto& th : pool) th.join();
  }

  Vec3 counts{0.0, 0.0, 0.0};
  for (Opinion s : finals) counts[idx(s)] += 1.0;
  for (double& c : counts) c /= static_cast<double>(n_agents);
  return counts;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,x1,x2,x3,v1,v2,v3\n";
  const bool values = traj.has_values();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_number(traj.times[k]);
    for (std::size_t c = 0; c < 3; ++c) {
      out << ',' << format_number(traj.states[k][c]);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      out << ',';
      if (values) out << format_number(traj.values[k][c]);
    }
    out << '\n';
  }
}

}  // namespace mfgnet
