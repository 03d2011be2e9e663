#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfgnet/core.hpp"
#include "mfgnet/mfg.hpp"
#include "mfgnet/network.hpp"
#include "mfgnet/stationary.hpp"

namespace mfgnet {

/// Rates of the mean-field honeybee model.
struct SwarmParams {
  double gamma1 = 0.0, gamma2 = 0.0;  // spontaneous commitment
  double r1 = 0.0, r2 = 0.0;          // recruitment
  double sigma1 = 0.0, sigma2 = 0.0;  // cross-inhibition
  double alpha1 = 0.0, alpha2 = 0.0;  // spontaneous abandonment

  void validate() const;
};

/// x1' = x3 (r1 x1 + gamma1) - x1 (sigma2 x2 + alpha1)
/// x2' = x3 (r2 x2 + gamma2) - x2 (sigma1 x1 + alpha2)
/// x3' = -(x1' + x2')
Vec3 honeybee_meanfield_rhs(const SimplexState& x, const SwarmParams& p);

/// Game parameters that reproduce an applied model: the stationary reduced
/// value and the disturbance weights, with unit control costs.
struct MfgMapping {
  ReducedValue y_star;
  double gamma13 = 0.0;
  double gamma23 = 0.0;

  /// Unit R on the chain arcs, Gamma13/Gamma23 from the mapping, zero
  /// congestion.
  CostWeights weights() const;
};

/// y* = (-gamma1 - r1 x1, -gamma2 - r2 x2),
/// Gamma13 = (gamma1 + r1 x1) / (alpha1 + sigma2 x2),
/// Gamma23 = (gamma2 + r2 x2) / (alpha2 + sigma1 x1).
/// Throws Error(degenerate_mapping) when a ratio is not positive and finite.
MfgMapping mfg_to_swarm_map(const SwarmParams& p, const SimplexState& x);

/// Interaction (primed) and spontaneous (double-primed) rates, one value per
/// arc type, on a contact graph.
struct NetworkSwarmParams {
  RateMatrix beta_prime;
  RateMatrix beta_doubleprime;
  Graph graph;

  /// Throws Error(hypothesis_violated) unless every rate is positive and
  /// the graph is strongly connected.
  void validate() const;
};

/// Per-node derivative of the network model. The z entry is the exact
/// negation of s' + r'.
NodeTriple swarm_network_rhs(const NodeTriple& x, const NetworkSwarmParams& p);

/// Jacobian of the reduced (s, r) system, z = 1 - s - r, row-major
/// 2n x 2n with the s block first.
std::vector<double> swarm_jacobian(const NodeTriple& x, const NetworkSwarmParams& p);

enum class SwarmVerdict { asymptotically_stable, saddle, not_an_equilibrium };

std::string_view to_string(SwarmVerdict v) noexcept;

struct SwarmEquilibrium {
  std::string label;
  NodeTriple state;
  double residual = 0.0;  // sup-norm of the right-hand side
  bool is_equilibrium = false;
  SwarmVerdict verdict = SwarmVerdict::not_an_equilibrium;
  double trace = 0.0;
};

/// Candidates (s, r) = (1, 0) and (0, 1) at every node, plus
/// (1/(2+k), 1/(2+k)) when k is given. Each candidate carries its residual;
/// the verdict uses the trace and row diagonal dominance of the Jacobian
/// (dominant with negative trace: stable, otherwise saddle). With k, throws
/// Error(hypothesis_violated) unless b23 = k b32 and b13 = k b31 for both
/// primed and double-primed rates.
std::vector<SwarmEquilibrium> swarm_equilibria(const NetworkSwarmParams& p,
                                               std::optional<double> k = {});

/// RK4 on (s, r). Throws Error(step_too_large) if a component leaves
/// [0, 1] by more than 1e-6.
NetworkTrajectory simulate_swarm(const NodeTriple& x0, const NetworkSwarmParams& p,
                                 double horizon, double dt = 1e-2);

}  // namespace mfgnet
