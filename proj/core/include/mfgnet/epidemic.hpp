#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mfgnet/attack.hpp"
#include "mfgnet/core.hpp"
#include "mfgnet/network.hpp"
#include "mfgnet/swarm.hpp"

namespace mfgnet {

/// s and r are the two susceptible types, z the infected probability.
using EpidemicState = NodeTriple;

struct EpidemicParams {
  double beta13 = 0.13;  // infection of type-1 (r) nodes
  double beta23 = 0.13;  // infection of type-2 (s) nodes
  double beta31 = 0.1;   // recovery to type 1
  double beta32 = 0.1;   // recovery to type 2
  Graph graph;

  /// Throws Error(invalid_argument) on negative or non-finite rates.
  void validate() const;
  /// Throws Error(hypothesis_violated) unless all rates are positive and the
  /// graph is strongly connected.
  void require_threshold_hypothesis() const;
};

/// s' = -b23 s (A z) + b32 z,  r' = -b13 r (A z) + b31 z,  z' = -(s' + r'),
/// with z = 1 - s - r at every node.
EpidemicState virus_network_rhs(const EpidemicState& x, const EpidemicParams& p);

/// y* = (-b31, -b32), Gamma13 = b31 / (b13 x3), Gamma23 = b32 / (b23 x3), so
/// that the worst disturbance from opinion a is b13 x3. Throws
/// Error(degenerate_mapping) when a weight is not positive and finite.
MfgMapping mfg_to_virus_map(const EpidemicParams& p, double x3);

struct ThresholdVerdict {
  bool stable = false;
  /// (b32 + b31) - [b23 s* + b13 (1 - s*)] (A 1), per node.
  std::vector<double> margin;
};

/// Componentwise threshold test for the infection-free state (s*, 0, 1 - s*).
ThresholdVerdict stability_condition(std::span<const double> s_star,
                                     const EpidemicParams& p);

/// z' = (diag(b23 s* + b13 (1 - s*)) A - (b31 + b32) I) z, the infected block
/// linearized about (s*, 0, 1 - s*).
std::vector<double> linearized_infection_rhs(std::span<const double> z,
                                             std::span<const double> s_star,
                                             const EpidemicParams& p);

/// RK4 of the linearized infection block; returns z(horizon).
std::vector<double> simulate_linearized_infection(std::span<const double> z0,
                                                  std::span<const double> s_star,
                                                  const EpidemicParams& p,
                                                  double horizon, double dt);

/// s' = -b23 s (A z),  z' = b23 s (A z) - b31 z,  r' = b31 z.
EpidemicState sir_limit_rhs(const EpidemicState& x, double beta23, double beta31,
                            const Graph& g);

/// RK4 of the SIR limit on the packed (s, r) vector.
NetworkTrajectory simulate_sir_limit(const EpidemicState& x0, double beta23,
                                     double beta31, const Graph& g,
                                     double horizon, double dt);

struct EpidemicRun {
  NetworkTrajectory trajectory;
  std::vector<double> steady_infection;  // z at the final time
  /// max_i |z_i(T) - z_i(T - P)| / P with P one burst cycle (one step for a
  /// low-rate schedule).
  double staleness = 0.0;
  bool steady = false;  // staleness < 1e-6
};

/// RK4 of the network model. Iteration k (one step of length dt) uses
/// b13 * m_k and b23 * m_k, with m_k = sched.multiplier(k).
EpidemicRun simulate_epidemic(const EpidemicState& x0, const EpidemicParams& p,
                              const AttackSchedule& sched, double horizon,
                              double dt = 1e-2);

/// {"1": z_1, "2": z_2, ...} in node order.
void write_infection_json(std::span<const double> infection, std::ostream& out);

}  // namespace mfgnet
