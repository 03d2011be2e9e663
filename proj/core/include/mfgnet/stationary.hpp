#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "mfgnet/core.hpp"
#include "mfgnet/mfg.hpp"

namespace mfgnet {

/// y = (v1 - v3, v2 - v3).
struct ReducedValue {
  double y1 = 0.0;
  double y2 = 0.0;

  ValueVector as_values() const { return ValueVector{{y1, y2, 0.0}}; }
  friend bool operator==(const ReducedValue&, const ReducedValue&) = default;
};

/// Coefficients of the reduced value dynamics
///   y1' = -a11/2 y1^2 - a12/2 y2^2 + c1
///   y2' = -a21/2 y1^2 - a22/2 y2^2 + c2
struct ReducedCoefficients {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double c1 = 0.0, c2 = 0.0;

  /// a11 = 1/G13 + 1/R31, a12 = 1/R32, a21 = 1/R31, a22 = 1/G23 + 1/R32,
  /// c1 = f3(x3) - f1(x1), c2 = f3(x3) - f2(x2).
  static ReducedCoefficients from(const CostWeights& w, const SimplexState& x);

  /// Throws Error(invalid_argument) unless a11 > a21 >= 0 and a22 > a12 >= 0.
  void validate() const;
};

std::array<double, 2> reduced_rhs(const ReducedValue& y,
                                  const ReducedCoefficients& k);

/// Third-quadrant equilibrium (-sqrt(u), -sqrt(w)) from the linear system in
/// the squared variables u = y1^2, w = y2^2. Throws Error(degenerate) for a
/// singular system and Error(no_real_equilibrium) when u or w is negative.
ReducedValue stationary_y(const ReducedCoefficients& k);

/// All four roots (+-sqrt(u), +-sqrt(w)), third quadrant first.
std::array<ReducedValue, 4> reduced_equilibria(const ReducedCoefficients& k);

/// The ellipse-difference relation between the two components of a
/// stationary y:  y1 = -sqrt(G13/G23 * y2^2 + 2 G13 (f2(x2) - f1(x1))).
double stationary_y1_from_y2(const CostWeights& w, const SimplexState& x,
                             double y2);

enum class Stability { stable_node, unstable_node, saddle, degenerate };

std::string_view to_string(Stability s) noexcept;

struct Classification {
  Stability stability = Stability::degenerate;
  double trace = 0.0;
  double determinant = 0.0;
  /// Linearization in reversed time, the direction the value equations are
  /// solved in (backward from the terminal condition).
  std::array<std::array<double, 2>, 2> jacobian{};
};

/// Trace/determinant classification. Throws Error(not_an_equilibrium) if
/// the reduced residual at y is 1e-8 or more.
Classification classify_equilibrium(const ReducedValue& y,
                                    const ReducedCoefficients& k);

/// Root of the reduced Kolmogorov equation for fixed rates: damped Newton,
/// then a bisection sweep. Throws Error(no_root) if the sweep finds nothing.
SimplexState stationary_distribution(const RateMatrix& beta);
/// Same, with the rates derived from y through the best responses.
SimplexState stationary_distribution(const CostWeights& w, const ReducedValue& y);

/// inf over lambda of |dv + lambda 1|_2 with dv = v - v_ref.
double seminorm_sharp(const ValueVector& v, const ValueVector& v_ref);

struct StationarySolution {
  SimplexState x_hat;
  ReducedValue y_star;
  double kappa = 0.0;  // common Hamiltonian level
  Classification classification;
};

/// Fixed point of distribution <-> reduced value: alternates
/// stationary_distribution and stationary_y until y moves less than 1e-13.
StationarySolution solve_stationary(const CostWeights& w,
                                    ReducedValue y_guess = {-1.0, -1.0});

struct ConvergenceRecord {
  double horizon = 0.0;
  double dx_sup = 0.0;    // |x^T(0) - x_bar|_inf
  double dv_sharp = 0.0;  // |v^T(0) - v_bar|_#
  int iterations = 0;
};

struct ConvergenceOptions {
  double dt = 1e-2;
  double relaxation = 0.5;
  double tolerance = 1e-10;
  int max_iterations = 5000;
  unsigned jobs = 1;
};

/// For each T solves the forward-backward system on a window of length 2T
/// (distribution fixed at the left end, terminal cost at the right end) and
/// compares the midpoint with the stationary solution. T = 0 compares x0
/// and psi(x0) directly. Throws Error(no_convergence) if a solve fails.
std::vector<ConvergenceRecord> convergence_study(
    const SimplexState& x0, const CostWeights& w, std::span<const double> horizons,
    const StationarySolution& stationary, const ConvergenceOptions& options = {});

/// Same, with a custom terminal cost.
std::vector<ConvergenceRecord> convergence_study(
    const SimplexState& x0, const CostWeights& w, std::span<const double> horizons,
    const StationarySolution& stationary, const ConvergenceOptions& options,
    const TerminalCost& terminal);

/// Header `T,dx_sup,dv_sharp`.
void write_convergence_csv(std::span<const ConvergenceRecord> records,
                           std::ostream& out);

}  // namespace mfgnet
