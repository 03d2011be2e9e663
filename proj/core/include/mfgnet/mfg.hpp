#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mfgnet/core.hpp"

namespace mfgnet {

using Vec3 = std::array<double, 3>;

/// (v1 - v_i, v2 - v_i, v3 - v_i); the i-th entry is zero.
Vec3 difference_operator(const ValueVector& v, Opinion i);

/// Best-response control rho_i* = -R_i^{-1} [Delta_i v]^- restricted to the
/// chain arcs. The i-th entry is left at zero; see self_rate().
Vec3 optimal_control(const ValueVector& v, Opinion i, const CostWeights& w);

/// Worst-case disturbance w_i* = Gamma_i^{-1} [Delta_i v]^+ on the chain arcs.
Vec3 worst_disturbance(const ValueVector& v, Opinion i, const CostWeights& w);

/// Diagonal bookkeeping entry rho_ii = -sum_{j != i} rho_ij.
double self_rate(const Vec3& rates, Opinion i);

/// Closed-form robust Hamiltonian
///   -1/2 (D^-)' R_i^{-1} D^- + 1/2 (D^+)' Gamma_i^{-1} D^+ + f_i(x_i),
/// D = Delta_i v, summed over the chain arcs leaving i.
double hamiltonian(const SimplexState& x, const ValueVector& v, Opinion i,
                   const CostWeights& w);

/// The min-max integrand g - 1/2 |dist|^2_Gamma + (rho + dist)' Delta_i v for
/// arbitrary nonnegative rho and dist. At (rho*, w*) it equals hamiltonian().
double hamiltonian_integrand(const SimplexState& x, const ValueVector& v,
                             Opinion i, const CostWeights& w, const Vec3& rho,
                             const Vec3& dist);

/// beta* = rho* + w* for every chain arc.
RateMatrix equilibrium_rates(const ValueVector& v, const CostWeights& w);

/// Kolmogorov forward equation. The third component is the exact negation of
/// the sum of the first two, so the components sum to zero.
Vec3 kolmogorov_rhs(const SimplexState& x, const RateMatrix& beta);

struct HjbDerivative {
  Vec3 dv{};
  /// v1 > v3 or v2 > v3: outside the regime where the specialized value
  /// equations hold. The derivative is still the general closed form.
  bool regime_violation = false;
};

/// dv_i/dt = -H(x, Delta_i v, i) for i = 1, 2, 3.
HjbDerivative hjb_rhs(const SimplexState& x, const ValueVector& v,
                      const CostWeights& w);

/// Terminal cost psi(i, x_i) = f_i(x_i(T)).
ValueVector terminal_values(const SimplexState& x_final, const CostWeights& w);

struct Trajectory {
  std::vector<double> times;
  std::vector<SimplexState> states;
  std::vector<ValueVector> values;  // empty when only the distribution is known

  std::size_t size() const noexcept { return times.size(); }
  bool has_values() const noexcept { return values.size() == times.size(); }
  double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }

  /// Piecewise-linear interpolation on the time grid, clamped at the ends.
  SimplexState state_at(double t) const;
  ValueVector value_at(double t) const;
};

using RateSchedule = std::function<RateMatrix(double t)>;

/// RK4 on the reduced (x1, x2) system with x3 = 1 - x1 - x2. Throws
/// Error(step_too_large) if a step leaves the simplex by more than 1e-6.
Trajectory integrate_forward(const SimplexState& x0, const RateSchedule& beta,
                             double horizon, double dt);

/// Backward RK4 of hjb_rhs from v(T) = terminal along the distribution path.
/// Returns a copy of x_traj with values filled in.
Trajectory integrate_backward(const ValueVector& terminal,
                              const Trajectory& x_traj, const CostWeights& w);

/// Rates beta*(t) read off an interpolated value trajectory.
RateSchedule equilibrium_schedule(const Trajectory& traj, const CostWeights& w);

struct ItvpConfig {
  double horizon = 10.0;
  double dt = 1e-3;
  double relaxation = 0.5;
  double tolerance = 1e-9;
  int max_iterations = 2000;

  void validate() const;
};

using TerminalCost = std::function<ValueVector(const SimplexState& x_final)>;

struct ItvpResult {
  Trajectory trajectory;  // distribution and values on the same grid
  bool converged = false;
  int iterations = 0;
  double last_change = 0.0;
  /// sup-norm gap between the returned distribution and the forward image of
  /// its own best-response rates.
  double kolmogorov_residual = 0.0;
};

/// Damped Picard iteration on the forward-backward system. Never throws on
/// non-convergence: the last iterate is returned with converged = false.
ItvpResult solve_itvp(const SimplexState& x0, const CostWeights& w,
                      const ItvpConfig& cfg);
ItvpResult solve_itvp(const SimplexState& x0, const CostWeights& w,
                      const ItvpConfig& cfg, const TerminalCost& terminal);

struct AgentPath {
  std::vector<double> jump_times;  // first entry is the start time 0
  std::vector<Opinion> states;

  Opinion state_at(double t) const;
};

/// Exact simulation by thinning of a time-inhomogeneous chain on [0, horizon]
/// whose exit rates never exceed rate_bound.
AgentPath sample_chain_path(const RateSchedule& beta, double rate_bound,
                            double horizon, Opinion start, std::uint64_t seed);

/// One reference player driven by the best-response rates of a solved
/// trajectory (values required).
AgentPath sample_agent_path(const Trajectory& traj, const CostWeights& w,
                            Opinion start, std::uint64_t seed);

/// Empirical distribution at the end of the horizon over n_agents players
/// whose initial states are drawn from traj.states.front(). Agent k uses
/// the seed derive_seed(seed, k), so the result does not depend on jobs.
Vec3 sample_population(const Trajectory& traj, const CostWeights& w,
                       std::size_t n_agents, std::uint64_t seed,
                       unsigned jobs = 1);

/// Header `t,x1,x2,x3,v1,v2,v3`; v columns are empty without values.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace mfgnet
