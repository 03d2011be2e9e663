#include "mfgnet/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/core.h>
#include <json.hpp>

#include "mfgnet/io.hpp"
#include "mfgnet/rk4.hpp"

namespace mfgnet {

void OscillatorParams::validate() const {
  const bool ok = M > 0.0 && D >= 0.0 && K >= 0.0 && std::isfinite(omega) &&
                  std::isfinite(M) && std::isfinite(D) && std::isfinite(K);
  if (!ok) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("oscillator parameters need M > 0, D >= 0, K >= 0 "
                            "(M={}, D={}, K={})",
                            M, D, K));
  }
  if (adjacency_coupling && graph.size() != n) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("adjacency coupling needs a {}-node graph (got {})", n,
                            graph.size()));
  }
}

namespace {

// Packed state (theta_1..theta_n, theta_dot_1..theta_dot_n).
void kuramoto_packed(const std::vector<double>& y, std::vector<double>& dy,
                     const OscillatorParams& p, std::span<const double> zeta) {
  const std::size_t n = p.n;
  const double gain = p.K / (static_cast<double>(n) * p.M);
  for (std::size_t i = 0; i < n; ++i) {
    double coupling = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c = p.adjacency_coupling ? p.graph(i, j) : 1.0;
      if (c != 0.0) coupling += c * std::sin(y[i] - y[j]);
    }
    dy[i] = y[n + i];
    dy[n + i] = p.omega / p.M - gain * coupling - (p.D / p.M) * y[n + i] + zeta[i];
  }
}

void check_length(std::size_t got, std::size_t n, const char* what) {
  if (got != n) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("{} has length {}, expected {}", what, got, n));
  }
}

}  // namespace

OscillatorState kuramoto_rhs(const OscillatorState& x, const OscillatorParams& p,
                             std::span<const double> zeta) {
  p.validate();
  const std::size_t n = p.n;
  check_length(x.theta.size(), n, "theta");
  check_length(x.theta_dot.size(), n, "theta_dot");
  check_length(zeta.size(), n, "zeta");
  std::vector<double> y(2 * n), dy(2 * n);
  std::copy(x.theta.begin(), x.theta.end(), y.begin());
  std::copy(x.theta_dot.begin(), x.theta_dot.end(), y.begin() + n);
  kuramoto_packed(y, dy, p, zeta);
  OscillatorState d(n);
  std::copy(dy.begin(), dy.begin() + n, d.theta.begin());
  std::copy(dy.begin() + n, dy.end(), d.theta_dot.begin());
  return d;
}

std::vector<double> sample_disturbance(std::span<const double> infection,
                                       const AttackSchedule& sched, Rng& rng) {
  std::vector<double> zeta(infection.size(), 0.0);
  for (std::size_t i = 0; i < infection.size(); ++i) {
    const double p = infection[i];
    if (!(p >= -1e-9 && p <= 1.0 + 1e-9)) {
      throw Error(ErrorCode::out_of_range,
                  fmt::format("infection probability {} at node {} is outside [0, 1]",
                              p, i + 1));
    }
    if (rng.bernoulli(p)) {
      zeta[i] = rng.bernoulli(0.5) ? sched.magnitude() : -sched.magnitude();
    }
  }
  return zeta;
}

std::vector<double> sample_disturbance(std::span<const double> infection,
                                       const AttackSchedule& sched,
                                       std::uint64_t seed) {
  Rng rng(seed);
  return sample_disturbance(infection, sched, rng);
}

FrequencyTrace simulate_grid(std::span<const double> infection,
                             const OscillatorParams& p, const AttackSchedule& sched,
                             std::int64_t iterations, double dt, std::uint64_t seed,
                             const OscillatorState* initial) {
  p.validate();
  sched.validate();
  const std::size_t n = p.n;
  check_length(infection.size(), n, "infection");
  if (!(dt > 0.0) || iterations < 0) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("need dt > 0 and iterations >= 0 (dt={}, iterations={})",
                            dt, iterations));
  }
  std::vector<double> y(2 * n, 0.0);
  if (initial) {
    check_length(initial->theta.size(), n, "initial theta");
    check_length(initial->theta_dot.size(), n, "initial theta_dot");
    std::copy(initial->theta.begin(), initial->theta.end(), y.begin());
    std::copy(initial->theta_dot.begin(), initial->theta_dot.end(), y.begin() + n);
  }

  FrequencyTrace trace;
  trace.dt = dt;
  const double to_hz = 1.0 / (2.0 * std::numbers::pi);
  auto record = [&](double t) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = kNominalHz + y[n + i] * to_hz;
      if (f[i] < 49.5 || f[i] > 50.5) trace.band_exceeded = true;
    }
    trace.times.push_back(t);
    trace.hz.push_back(std::move(f));
  };
  trace.times.reserve(static_cast<std::size_t>(iterations) + 1);
  trace.hz.reserve(static_cast<std::size_t>(iterations) + 1);
  record(0.0);

  Rng rng(seed);
  std::vector<double> zeta(n, 0.0);
  for (std::int64_t k = 0; k < iterations; ++k) {
    if (k % sched.sample_interval == 0) zeta = sample_disturbance(infection, sched, rng);
    auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dy) {
      kuramoto_packed(yy, dy, p, zeta);
    };
    y = rk4_step(rhs, static_cast<double>(k) * dt, y, dt);
    record(static_cast<double>(k + 1) * dt);
  }
  trace.final_state = OscillatorState(n);
  std::copy(y.begin(), y.begin() + n, trace.final_state.theta.begin());
  std::copy(y.begin() + n, y.end(), trace.final_state.theta_dot.begin());
  return trace;
}

namespace {

// simulate_grid with a prescribed per-epoch disturbance at one node.
double single_node_peak(const OscillatorParams& p, std::size_t node,
                        const std::vector<double>& epochs,
                        std::int64_t sample_interval, std::int64_t iterations,
                        double dt) {
  const std::size_t n = p.n;
  std::vector<double> y(2 * n, 0.0);
  std::vector<double> zeta(n, 0.0);
  double peak = 0.0;
  for (std::int64_t k = 0; k < iterations; ++k) {
    if (k % sample_interval == 0) {
      zeta[node] = epochs[static_cast<std::size_t>(k / sample_interval)];
    }
    auto rhs = [&](double, const std::vector<double>& yy, std::vector<double>& dy) {
      kuramoto_packed(yy, dy, p, zeta);
    };
    y = rk4_step(rhs, static_cast<double>(k) * dt, y, dt);
    peak = std::max(peak, std::abs(y[n + node]) / (2.0 * std::numbers::pi));
  }
  return peak;
}

}  // namespace

ResponseComparison compare_attack_response(const OscillatorParams& p,
                                           const AttackSchedule& sched,
                                           std::size_t node_a, std::size_t node_b,
                                           double attack_probability,
                                           std::int64_t iterations, double dt,
                                           std::uint64_t seed) {
  p.validate();
  sched.validate();
  if (node_a >= p.n || node_b >= p.n) {
    throw Error(ErrorCode::out_of_range,
                fmt::format("nodes {} and {} must be below {}", node_a + 1,
                            node_b + 1, p.n + 1));
  }
  if (!(dt > 0.0) || iterations < 0) {
    throw Error(ErrorCode::invalid_argument, "need dt > 0 and iterations >= 0");
  }
  const std::int64_t n_epochs = iterations / sched.sample_interval + 1;
  std::vector<double> epochs;
  Rng rng(seed);
  const std::array<double, 1> q{attack_probability};
  for (std::int64_t e = 0; e < n_epochs; ++e) {
    epochs.push_back(sample_disturbance(q, sched, rng)[0]);
  }
  ResponseComparison c;
  c.node_a = node_a;
  c.node_b = node_b;
  c.peak_a = single_node_peak(p, node_a, epochs, sched.sample_interval, iterations, dt);
  c.peak_b = single_node_peak(p, node_b, epochs, sched.sample_interval, iterations, dt);
  return c;
}

ExcursionStats frequency_excursion_stats(const FrequencyTrace& trace, double low,
                                         double high) {
  if (!(low < high)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("band [{}, {}] is empty", low, high));
  }
  const std::size_t n = trace.hz.empty() ? 0 : trace.hz.front().size();
  ExcursionStats s;
  s.peak.assign(n, 0.0);
  s.time_outside.assign(n, 0.0);
  for (const auto& row : trace.hz) {
    for (std::size_t i = 0; i < n; ++i) {
      s.peak[i] = std::max(s.peak[i], std::abs(row[i] - kNominalHz));
      if (row[i] < low || row[i] > high) s.time_outside[i] += trace.dt;
    }
  }
  return s;
}

void write_frequency_csv(const FrequencyTrace& trace, std::ostream& out,
                         std::size_t stride) {
  if (stride == 0) stride = 1;
  const std::size_t n = trace.hz.empty() ? 0 : trace.hz.front().size();
  out << 't';
  for (std::size_t i = 1; i <= n; ++i) out << ",f_" << i;
  out << '\n';
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    if (k % stride != 0 && k + 1 != trace.times.size()) continue;
    out << format_number(trace.times[k]);
    for (double f : trace.hz[k]) out << ',' << format_number(f);
    out << '\n';
  }
}

void write_excursion_json(const ExcursionStats& stats, double low, double high,
                          std::ostream& out) {
  nlohmann::ordered_json j;
  j["band"] = {round_sig12(low), round_sig12(high)};
  j["nodes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < stats.peak.size(); ++i) {
    nlohmann::ordered_json node;
    node["node"] = i + 1;
    node["peak_hz"] = round_sig12(stats.peak[i]);
    node["time_outside"] = round_sig12(stats.time_outside[i]);
    j["nodes"].push_back(std::move(node));
  }
  out << j.dump(2) << '\n';
}

}  // namespace mfgnet
