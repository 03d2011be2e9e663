#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace mfgnet {

/// Per-node probabilities of the three states: s (opinion b / type-2
/// susceptible), z (uncommitted / infected) and r (opinion a / type-1
/// susceptible).
struct NodeTriple {
  std::vector<double> s;
  std::vector<double> z;
  std::vector<double> r;

  NodeTriple() = default;
  explicit NodeTriple(std::size_t n) : s(n, 0.0), z(n, 0.0), r(n, 0.0) {}

  std::size_t size() const noexcept { return s.size(); }

  /// Same value at every node.
  static NodeTriple uniform(std::size_t n, double s, double z, double r);

  /// Throws Error(not_a_simplex) unless every node is a probability vector
  /// within `tol`.
  void validate(double tol = 1e-9) const;

  friend bool operator==(const NodeTriple&, const NodeTriple&) = default;
};

struct NetworkTrajectory {
  std::vector<double> times;
  std::vector<NodeTriple> states;

  std::size_t size() const noexcept { return times.size(); }
};

/// Right-hand side on the packed vector (s_1..s_n, r_1..r_n). `step` is the
/// index of the RK4 step being taken and is constant over its stages.
using PackedRhs = std::function<void(double t, std::size_t step,
                                     const std::vector<double>& y,
                                     std::vector<double>& dy)>;

/// RK4 on (s, r) with z = 1 - s - r recovered after each step. Throws
/// Error(step_too_large) if a probability leaves [0, 1] by more than 1e-6.
NetworkTrajectory integrate_network(const NodeTriple& x0, const PackedRhs& rhs,
                                    double horizon, double dt);

/// Header `t,s_1..s_n,z_1..z_n,r_1..r_n`. Every `stride`-th row is written,
/// plus the last one.
void write_network_csv(const NetworkTrajectory& traj, std::ostream& out,
                       std::size_t stride = 1);

}  // namespace mfgnet
