#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mfgnet/attack.hpp"
#include "mfgnet/core.hpp"
#include "mfgnet/rng.hpp"

namespace mfgnet {

inline constexpr double kNominalHz = 50.0;

/// Homogeneous second-order Kuramoto buses in a frame rotating at the
/// nominal frequency.
struct OscillatorParams {
  double omega = 0.0;  // natural frequency offset
  double M = 1.0;      // inertia
  double D = 0.1;      // damping
  double K = 10.0;     // coupling numerator, divided by n
  std::size_t n = 0;
  /// Weight sin(theta_i - theta_j) by a_ij instead of coupling all pairs.
  bool adjacency_coupling = false;
  Graph graph;  // required when adjacency_coupling is set

  void validate() const;
};

struct OscillatorState {
  std::vector<double> theta;
  std::vector<double> theta_dot;

  explicit OscillatorState(std::size_t n = 0) : theta(n, 0.0), theta_dot(n, 0.0) {}
};

/// Derivative of the state: theta' = theta_dot and
/// theta_dot' = omega/M - K/(n M) sum_j c_ij sin(theta_i - theta_j)
///              - (D/M) theta_dot + zeta,
/// c_ij = 1 (all-to-all) or a_ij (adjacency coupling).
OscillatorState kuramoto_rhs(const OscillatorState& x, const OscillatorParams& p,
                             std::span<const double> zeta);

/// Per node: attacked with probability infection_i; an attacked node gets
/// +-k_hat*omega_hat with a fair sign, others 0. Draws two uniforms per
/// attacked node and one per spared node, in node order.
std::vector<double> sample_disturbance(std::span<const double> infection,
                                       const AttackSchedule& sched, Rng& rng);
std::vector<double> sample_disturbance(std::span<const double> infection,
                                       const AttackSchedule& sched,
                                       std::uint64_t seed);

struct FrequencyTrace {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> hz;  // hz[k][i]: node i at times[k]
  OscillatorState final_state;
  bool band_exceeded = false;  // any sample outside [49.5, 50.5] Hz
};

/// RK4 of the oscillators for `iterations` steps from `initial` (all zero by
/// default). zeta is redrawn on iterations divisible by sched.sample_interval
/// and held in between. Frequencies are 50 + theta_dot / (2 pi).
FrequencyTrace simulate_grid(std::span<const double> infection,
                             const OscillatorParams& p, const AttackSchedule& sched,
                             std::int64_t iterations, double dt, std::uint64_t seed,
                             const OscillatorState* initial = nullptr);

struct ExcursionStats {
  std::vector<double> peak;          // max |f - 50| per node, Hz
  std::vector<double> time_outside;  // samples outside the band times dt
};

ExcursionStats frequency_excursion_stats(const FrequencyTrace& trace,
                                         double low = 49.5, double high = 50.5);

struct ResponseComparison {
  std::size_t node_a = 0, node_b = 0;  // 0-based
  double peak_a = 0.0;                 // Hz, attack injected at node_a only
  double peak_b = 0.0;                 // Hz, same attack at node_b only
};

/// Draws one attack sequence (probability `attack_probability` per sampling
/// epoch, fair sign) from `seed` and injects it, in two separate runs, at
/// node_a only and at node_b only.
ResponseComparison compare_attack_response(const OscillatorParams& p,
                                           const AttackSchedule& sched,
                                           std::size_t node_a, std::size_t node_b,
                                           double attack_probability,
                                           std::int64_t iterations, double dt,
                                           std::uint64_t seed);

/// Header `t,f_1..f_n`. Every `stride`-th row plus the last one.
void write_frequency_csv(const FrequencyTrace& trace, std::ostream& out,
                         std::size_t stride = 1);

/// {"band": [low, high], "nodes": [{"node": 1, "peak_hz": ..,
/// "time_outside": ..}, ...]}
void write_excursion_json(const ExcursionStats& stats, double low, double high,
                          std::ostream& out);

}  // namespace mfgnet
