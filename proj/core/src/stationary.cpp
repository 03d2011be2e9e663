#include "mfgnet/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>

#include <fmt/core.h>

#include "mfgnet/io.hpp"

namespace mfgnet {

namespace {

constexpr double kEquilibriumResidual = 1e-8;
constexpr double kDistributionResidual = 1e-10;

double sup_norm(const std::array<double, 2>& r) {
  return std::max(std::abs(r[0]), std::abs(r[1]));
}

}  // namespace

ReducedCoefficients ReducedCoefficients::from(const CostWeights& w,
                                              const SimplexState& x) {
  using enum Opinion;
  ReducedCoefficients k;
  k.a11 = 1.0 / w.gamma(a, uncommitted) + 1.0 / w.r(uncommitted, a);
  k.a12 = 1.0 / w.r(uncommitted, b);
  k.a21 = 1.0 / w.r(uncommitted, a);
  k.a22 = 1.0 / w.gamma(b, uncommitted) + 1.0 / w.r(uncommitted, b);
  const double f3 = w.congestion(uncommitted, x.x3());
  k.c1 = f3 - w.congestion(a, x.x1());
  k.c2 = f3 - w.congestion(b, x.x2());
  return k;
}

void ReducedCoefficients::validate() const {
  const bool ok = a11 > a21 && a21 >= 0.0 && a22 > a12 && a12 >= 0.0 &&
                  std::isfinite(a11) && std::isfinite(a22) &&
                  std::isfinite(c1) && std::isfinite(c2);
  if (!ok) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("reduced coefficients a=({}, {}, {}, {}) c=({}, {}) "
                            "need a11 > a21 >= 0 and a22 > a12 >= 0",
                            a11, a12, a21, a22, c1, c2));
  }
}

std::array<double, 2> reduced_rhs(const ReducedValue& y,
                                  const ReducedCoefficients& k) {
  const double u = y.y1 * y.y1;
  const double w = y.y2 * y.y2;
  return {-0.5 * k.a11 * u - 0.5 * k.a12 * w + k.c1,
          -0.5 * k.a21 * u - 0.5 * k.a22 * w + k.c2};
}

namespace {

std::pair<double, double> squared_roots(const ReducedCoefficients& k) {
  k.validate();
  const double det = k.a11 * k.a22 - k.a12 * k.a21;
  const double scale = std::abs(k.a11 * k.a22) + std::abs(k.a12 * k.a21);
  if (!(std::abs(det) > 1e-14 * scale)) {
    throw Error(ErrorCode::degenerate,
                fmt::format("reduced system is singular (det={})", det));
  }
  // (1/2) [a11 a12; a21 a22] (u, w)' = (c1, c2)'
  double u = 2.0 * (k.c1 * k.a22 - k.a12 * k.c2) / det;
  double w = 2.0 * (k.a11 * k.c2 - k.a21 * k.c1) / det;
  const double tiny =
      1e-14 * (std::abs(k.c1) + std::abs(k.c2)) / std::max(det, 1e-300);
  if (u < 0.0 && u > -tiny) u = 0.0;
  if (w < 0.0 && w > -tiny) w = 0.0;
  if (u < 0.0 || w < 0.0) {
    throw Error(ErrorCode::no_real_equilibrium,
                fmt::format("the ellipses do not meet: y1^2={}, y2^2={}", u, w));
  }
  return {u, w};
}

}  // namespace

ReducedValue stationary_y(const ReducedCoefficients& k) {
  const auto [u, w] = squared_roots(k);
  return {-std::sqrt(u), -std::sqrt(w)};
}

std::array<ReducedValue, 4> reduced_equilibria(const ReducedCoefficients& k) {
  const auto [u, w] = squared_roots(k);
  const double p = std::sqrt(u);
  const double q = std::sqrt(w);
  return {ReducedValue{-p, -q}, ReducedValue{p, q}, ReducedValue{-p, q},
          ReducedValue{p, -q}};
}

double stationary_y1_from_y2(const CostWeights& w, const SimplexState& x,
                             double y2) {
  using enum Opinion;
  const double g13 = w.gamma(a, uncommitted);
  const double g23 = w.gamma(b, uncommitted);
  const double df = w.congestion(b, x.x2()) - w.congestion(a, x.x1());
  const double xi = g13 / g23 * y2 * y2 + 2.0 * g13 * df;
  if (xi < 0.0) {
    throw Error(ErrorCode::no_real_equilibrium,
                fmt::format("no real y1 for y2={} (xi={})", y2, xi));
  }
  return -std::sqrt(xi);
}

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::stable_node: return "stable node";
    case Stability::unstable_node: return "unstable node";
    case Stability::saddle: return "saddle";
    case Stability::degenerate: return "center/degenerate";
  }
  return "center/degenerate";
}

Classification classify_equilibrium(const ReducedValue& y,
                                    const ReducedCoefficients& k) {
  const double residual = sup_norm(reduced_rhs(y, k));
  if (!(residual < kEquilibriumResidual)) {
    throw Error(ErrorCode::not_an_equilibrium,
                fmt::format("({}, {}) is not an equilibrium (residual {})", y.y1,
                            y.y2, residual));
  }
  Classification c;
  // d/dtau with tau = T - t flips the sign of the forward Jacobian.
  c.jacobian = {{{k.a11 * y.y1, k.a12 * y.y2}, {k.a21 * y.y1, k.a22 * y.y2}}};
  c.trace = c.jacobian[0][0] + c.jacobian[1][1];
  c.determinant =
      c.jacobian[0][0] * c.jacobian[1][1] - c.jacobian[0][1] * c.jacobian[1][0];
  const double T = c.trace;
  const double D = c.determinant;
  if (D < 0.0) {
    c.stability = Stability::saddle;
  } else if (D > 0.0 && T * T > 4.0 * D) {
    c.stability = T < 0.0 ? Stability::stable_node : Stability::unstable_node;
  } else {
    c.stability = Stability::degenerate;
  }
  return c;
}

namespace {

std::array<double, 2> reduced_kolmogorov(const RateMatrix& b, double x1,
                                         double x2) {
  const double x3 = 1.0 - x1 - x2;
  return {x3 * b.b31() - x1 * b.b13(), x3 * b.b32() - x2 * b.b23()};
}

bool newton_root(const RateMatrix& b, double& x1, double& x2) {
  x1 = 1.0 / 3;
  x2 = 1.0 / 3;
  // The Jacobian is constant for fixed rates.
  const double j11 = -b.b31() - b.b13();
  const double j12 = -b.b31();
  const double j21 = -b.b32();
  const double j22 = -b.b32() - b.b23();
  const double det = j11 * j22 - j12 * j21;
  const double scale = std::abs(j11 * j22) + std::abs(j12 * j21);
  if (!(std::abs(det) > 1e-14 * scale) || scale == 0.0) return false;
  for (int it = 0; it < 50; ++it) {
    const auto r = reduced_kolmogorov(b, x1, x2);
    if (sup_norm(r) < 1e-15) return true;
    const double dx1 = (r[0] * j22 - j12 * r[1]) / det;
    const double dx2 = (j11 * r[1] - j21 * r[0]) / det;
    double step = 1.0;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      const double n1 = x1 - step * dx1;
      const double n2 = x2 - step * dx2;
      if (sup_norm(reduced_kolmogorov(b, n1, n2)) < sup_norm(r)) {
        x1 = n1;
        x2 = n2;
        break;
      }
    }
  }
  return sup_norm(reduced_kolmogorov(b, x1, x2)) < kDistributionResidual;
}

// Bisection of a monotone-bracketed scalar function on [lo, hi]; returns
// false without a sign change.
template <class F>
bool bisect(const F& f, double lo, double hi, double& root) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) { root = lo; return true; }
  if (fhi == 0.0) { root = hi; return true; }
  if ((flo > 0.0) == (fhi > 0.0)) return false;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) { lo = hi = mid; break; }
    if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
  }
  root = 0.5 * (lo + hi);
  return true;
}

bool sweep_root(const RateMatrix& b, double& x1, double& x2) {
  // Solve the second equation for x2 along each x1, then bisect the first.
  auto x2_of = [&](double a, double& out) {
    return bisect([&](double s) { return reduced_kolmogorov(b, a, s)[1]; }, 0.0,
                  1.0 - a, out);
  };
  auto first = [&](double a, bool& ok) {
    double s = 0.0;
    ok = x2_of(a, s);
    return reduced_kolmogorov(b, a, s)[0];
  };
  constexpr int kCells = 1000;
  double prev_a = 0.0;
  bool prev_ok = false;
  double prev_f = first(prev_a, prev_ok);
  for (int c = 1; c <= kCells; ++c) {
    const double a = static_cast<double>(c) / kCells;
    bool ok = false;
    const double f = first(a, ok);
    if (ok && prev_ok && (prev_f == 0.0 || (prev_f > 0.0) != (f > 0.0))) {
      double root = 0.0;
      bool inner_ok = true;
      if (bisect([&](double s) { return first(s, inner_ok); }, prev_a, a, root) &&
          inner_ok) {
        x1 = root;
        x2_of(root, x2);
        return true;
      }
    }
    prev_a = a;
    prev_f = f;
    prev_ok = ok;
  }
  return false;
}

}  // namespace

SimplexState stationary_distribution(const RateMatrix& beta) {
  double x1 = 0.0;
  double x2 = 0.0;
  const bool found = (newton_root(beta, x1, x2) && x1 >= -1e-12 &&
                      x2 >= -1e-12 && x1 + x2 <= 1.0 + 1e-12) ||
                     sweep_root(beta, x1, x2);
  if (!found) {
    throw Error(ErrorCode::no_root,
                fmt::format("no stationary distribution for rates "
                            "b13={} b31={} b23={} b32={}",
                            beta.b13(), beta.b31(), beta.b23(), beta.b32()));
  }
  return SimplexState::project(x1, x2, 1.0 - x1 - x2);
}

SimplexState stationary_distribution(const CostWeights& w,
                                     const ReducedValue& y) {
  return stationary_distribution(equilibrium_rates(y.as_values(), w));
}

double seminorm_sharp(const ValueVector& v, const ValueVector& v_ref) {
  std::array<double, 3> d{};
  double mean = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    d[i] = v[i] - v_ref[i];
    mean += d[i];
  }
  mean /= 3.0;
  double ss = 0.0;
  for (double c : d) ss += (c - mean) * (c - mean);
  return std::sqrt(ss);
}

StationarySolution solve_stationary(const CostWeights& w, ReducedValue y_guess) {
  w.validate();
  StationarySolution sol;
  ReducedValue y = y_guess;
  bool settled = false;
  for (int it = 0; it < 500 && !settled; ++it) {
    sol.x_hat = stationary_distribution(w, y);
    const ReducedValue next =
        stationary_y(ReducedCoefficients::from(w, sol.x_hat));
    settled = std::abs(next.y1 - y.y1) < 1e-13 && std::abs(next.y2 - y.y2) < 1e-13;
    y = next;
  }
  if (!settled) {
    throw Error(ErrorCode::no_convergence,
                "stationary distribution/value iteration did not settle");
  }
  sol.y_star = y;
  sol.kappa = hamiltonian(sol.x_hat, y.as_values(), Opinion::uncommitted, w);
  sol.classification =
      classify_equilibrium(y, ReducedCoefficients::from(w, sol.x_hat));
  return sol;
}

std::vector<ConvergenceRecord> convergence_study(
    const SimplexState& x0, const CostWeights& w, std::span<const double> horizons,
    const StationarySolution& stationary, const ConvergenceOptions& options) {
  return convergence_study(x0, w, horizons, stationary, options,
                           [&w](const SimplexState& x) {
                             return terminal_values(x, w);
                           });
}

std::vector<ConvergenceRecord> convergence_study(
    const SimplexState& x0, const CostWeights& w, std::span<const double> horizons,
    const StationarySolution& stationary, const ConvergenceOptions& options,
    const TerminalCost& terminal) {
  const ValueVector v_bar = stationary.y_star.as_values();
  const SimplexState& x_bar = stationary.x_hat;

  auto run = [&](double horizon) {
    ConvergenceRecord rec;
    rec.horizon = horizon;
    SimplexState x_mid = x0;
    ValueVector v_mid = terminal(x0);
    if (horizon > 0.0) {
      ItvpConfig cfg;
      cfg.horizon = 2.0 * horizon;
      cfg.dt = std::min(options.dt, cfg.horizon);
      cfg.relaxation = options.relaxation;
      cfg.tolerance = options.tolerance;
      cfg.max_iterations = options.max_iterations;
      const ItvpResult res = solve_itvp(x0, w, cfg, terminal);
      if (!res.converged) {
        throw Error(ErrorCode::no_convergence,
                    fmt::format("forward-backward iteration for T={} stopped "
                                "after {} sweeps (change {})",
                                horizon, res.iterations, res.last_change));
      }
      x_mid = res.trajectory.state_at(horizon);
      v_mid = res.trajectory.value_at(horizon);
      rec.iterations = res.iterations;
    }
    for (std::size_t c = 0; c < 3; ++c) {
      rec.dx_sup = std::max(rec.dx_sup, std::abs(x_mid[c] - x_bar[c]));
    }
    rec.dv_sharp = seminorm_sharp(v_mid, v_bar);
    return rec;
  };

  std::vector<ConvergenceRecord> out(horizons.size());
  if (options.jobs <= 1) {
    for (std::size_t i = 0; i < horizons.size(); ++i) out[i] = run(horizons[i]);
  } else {
    std::vector<std::future<ConvergenceRecord>> pending;
    for (double h : horizons) {
      pending.push_back(std::async(std::launch::async, run, h));
    }
    for (std::size_t i = 0; i < pending.size(); ++i) out[i] = pending[i].get();
  }
  return out;
}

void write_convergence_csv(std::span<const ConvergenceRecord> records,
                           std::ostream& out) {
  out << "T,dx_sup,dv_sharp\n";
  for (const auto& r : records) {
    out << format_number(r.horizon) << ',' << format_number(r.dx_sup) << ','
        << format_number(r.dv_sharp) << '\n';
  }
}

}  // namespace mfgnet
