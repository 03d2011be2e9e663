#include <cmath>
#include <sstream>

#include <doctest.h>

#include <mfgnet/mfg.hpp>
#include <mfgnet/stationary.hpp>

#include "support.hpp"

using namespace mfgnet;
using doctest::Approx;

namespace {

ValueVector vv(double a, double b, double c) { return ValueVector{{a, b, c}}; }

CostWeights unit_weights(std::array<double, 3> slopes = {0, 0, 0}) {
  CostWeights w = CostWeights::with_slopes(slopes);
  return w;
}

}  // namespace

TEST_CASE("difference operator") {
  CHECK(difference_operator(vv(1, 1, 1), Opinion::b) == Vec3{0, 0, 0});
  CHECK(difference_operator(vv(0, 2, 3), Opinion::uncommitted) == Vec3{-3, -1, 0});
  CHECK(difference_operator(vv(5, 5, 7), Opinion::a) == Vec3{0, 0, 2});
}

TEST_CASE("optimal control") {
  const CostWeights w = unit_weights();
  CHECK(optimal_control(vv(2, 2, 2), Opinion::uncommitted, w) == Vec3{0, 0, 0});
  CHECK(optimal_control(vv(0, 2, 3), Opinion::uncommitted, w) == Vec3{3, 1, 0});
  // a<->b is priced out
  const Vec3 r = optimal_control(vv(5, 0, 9), Opinion::a, w);
  CHECK(r[1] == 0.0);
  CHECK(self_rate(Vec3{3, 1, 0}, Opinion::uncommitted) == -4);

  const double g1 = 0.1, g2 = 0.2, rr = 1.0, x1 = 0.3, x2 = 0.4;
  const Vec3 rho = optimal_control(vv(-g1 - rr * x1, -g2 - rr * x2, 0), Opinion::uncommitted, w);
  CHECK(rho[0] == Approx(g1 + rr * x1));
  CHECK(rho[1] == Approx(g2 + rr * x2));
  CHECK(rho[2] == 0.0);
}

TEST_CASE("worst disturbance") {
  CostWeights w = unit_weights();
  CHECK(worst_disturbance(vv(1, 1, 1), Opinion::a, w) == Vec3{0, 0, 0});
  const double g1 = 0.1, r = 1.0, x1 = 0.3, alpha = 0.05, sigma = 0.5, x2 = 0.2;
  w.Gamma[0][2] = (g1 + r * x1) / (alpha + sigma * x2);
  const Vec3 d = worst_disturbance(vv(0, 0, g1 + r * x1), Opinion::a, w);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 0.0);
  CHECK(d[2] == Approx(alpha + sigma * x2));

  const double b13 = 0.13, b31 = 0.1, x3 = 0.6;
  // the weight that yields b13 x3 is b31 / (b13 x3); its reciprocal would
  // give b31^2 / (b13 x3)
  w.Gamma[0][2] = b31 / (b13 * x3);
  CHECK(worst_disturbance(vv(0, 0, b31), Opinion::a, w)[2] == Approx(b13 * x3));
  w.Gamma[0][2] = b13 * x3 / b31;
  CHECK(worst_disturbance(vv(0, 0, b31), Opinion::a, w)[2] == Approx(b31 * b31 / (b13 * x3)));
}

TEST_CASE("hamiltonian") {
  const SimplexState x = make_simplex(0.2, 0.3, 0.5);
  CHECK(hamiltonian(x, vv(4, 4, 4), Opinion::a, unit_weights()) == 0.0);
  CHECK(hamiltonian(x, vv(0, 0, 2), Opinion::uncommitted, unit_weights()) == Approx(-4));

  const CostWeights w = testsupport::weights({1, 1, 1}, 0.5, 0.7);
  const ValueVector v = vv(-0.4, -0.3, 0.0);
  CHECK(hamiltonian(x, v, Opinion::a, w) == Approx(0.5 / 0.5 * 0.4 * 0.4 + 0.2));
  CHECK(hamiltonian(x, v, Opinion::b, w) == Approx(0.5 / 0.7 * 0.3 * 0.3 + 0.3));
}

TEST_CASE("hamiltonian is the saddle value of its integrand") {
  // grid search over controls (min) and disturbances (max) on the chain arcs
  const SimplexState x = make_simplex(0.25, 0.35, 0.4);
  const CostWeights w = testsupport::weights({1, 0.5, 2}, 0.6, 0.9);
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const ValueVector v = vv(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
    for (Opinion i : kOpinions) {
      const double h = hamiltonian(x, v, i, w);
      const Vec3 rs = optimal_control(v, i, w), ds = worst_disturbance(v, i, w);
      CHECK(hamiltonian_integrand(x, v, i, w, rs, ds) == Approx(h).epsilon(1e-12));
      double best = 1e300;
      for (double r1 = 0; r1 <= 2.0; r1 += 0.01) {
        for (double r2 = 0; r2 <= 2.0; r2 += 0.01) {
          Vec3 rho{};
          if (i == Opinion::uncommitted) rho = {r1, r2, 0};
          else rho[2] = r1;
          best = std::min(best, hamiltonian_integrand(x, v, i, w, rho, ds));
          if (i != Opinion::uncommitted) break;
        }
      }
      CHECK(best >= h - 1e-12);
      CHECK(best <= h + 1e-3);
    }
  }
}

TEST_CASE("kolmogorov right-hand side") {
  const Vec3 z = kolmogorov_rhs(make_simplex(1.0 / 3, 1.0 / 3, 1.0 / 3), RateMatrix(0.4, 0.4, 0.4, 0.4));
  for (double c : z) CHECK(std::abs(c) < 1e-16);
  const Vec3 d = kolmogorov_rhs(make_simplex(0, 0, 1), RateMatrix(0, 2, 0, 1));
  CHECK(d == Vec3{2, 1, -3});
}

TEST_CASE("kolmogorov vanishes at the stationary pair") {
  const CostWeights w = testsupport::crowd_averse();
  const StationarySolution s = solve_stationary(w);
  const Vec3 d = kolmogorov_rhs(s.x_hat, equilibrium_rates(s.y_star.as_values(), w));
  for (double c : d) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("hjb right-hand side") {
  const SimplexState x = make_simplex(0.2, 0.3, 0.5);
  const CostWeights w = CostWeights::with_slopes({1, 2, 3});
  const HjbDerivative c = hjb_rhs(x, vv(1, 1, 1), w);
  CHECK(c.dv[0] == Approx(-0.2));
  CHECK(c.dv[1] == Approx(-0.6));
  CHECK(c.dv[2] == Approx(-1.5));

  const HjbDerivative d = hjb_rhs(x, vv(0, 0, 1), unit_weights());
  CHECK(d.dv[0] == Approx(-0.5));
  CHECK(d.dv[1] == Approx(-0.5));
  CHECK_FALSE(d.regime_violation);
  CHECK(hjb_rhs(x, vv(2, 0, 1), unit_weights()).regime_violation);

  const CostWeights ca = testsupport::crowd_averse();
  const StationarySolution s = solve_stationary(ca);
  const HjbDerivative e = hjb_rhs(s.x_hat, s.y_star.as_values(), ca);
  CHECK(std::abs(e.dv[0] - e.dv[2]) < 1e-12);
  CHECK(std::abs(e.dv[1] - e.dv[2]) < 1e-12);
}

TEST_CASE("forward integration") {
  const SimplexState x0 = make_simplex(0.2, 0.5, 0.3);
  const Trajectory still = integrate_forward(x0, [](double) { return RateMatrix(); }, 3, 1e-2);
  for (const auto& x : still.states)
    for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == Approx(x0[i]).epsilon(1e-15));

  const Trajectory sym = integrate_forward(make_simplex(1.0 / 3, 1.0 / 3, 1.0 / 3),
                                           [](double) { return RateMatrix(1, 1, 1, 1); }, 3, 1e-2);
  for (const auto& x : sym.states) CHECK(x.x1() == Approx(1.0 / 3).epsilon(1e-14));

  const Trajectory decay = integrate_forward(make_simplex(0.5, 0.5, 0),
                                             [](double) { return RateMatrix(1, 0, 1, 0); }, 5, 1e-3);
  double prev = -1;
  for (std::size_t k = 0; k < decay.size(); ++k) {
    const double t = decay.times[k];
    CHECK(std::abs(decay.states[k].x1() - 0.5 * std::exp(-t)) < 1e-12);
    CHECK(decay.states[k].x3() >= prev);
    prev = decay.states[k].x3();
  }
}

TEST_CASE("backward integration") {
  const SimplexState x = make_simplex(0.25, 0.25, 0.5);
  const Trajectory path = integrate_forward(x, [](double) { return RateMatrix(); }, 2, 1e-3);
  const Trajectory zero = integrate_backward(ValueVector{}, path, unit_weights());
  for (const auto& v : zero.values) CHECK(v == ValueVector{});

  const CostWeights w = testsupport::crowd_averse();
  const Trajectory sym = integrate_backward(terminal_values(x, w), path, w);
  for (const auto& v : sym.values) CHECK(v[0] == v[1]);

  // explicit Euler at dt / 10 agrees to first order
  ValueVector ve = terminal_values(x, w);
  const double h = 1e-4;
  for (int k = 0; k < 20000; ++k) {
    const HjbDerivative d = hjb_rhs(x, ve, w);
    for (int i = 0; i < 3; ++i) ve[static_cast<std::size_t>(i)] -= h * d.dv[i];
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(ve[i] - sym.values.front()[i]) < 1e-3);
}

TEST_CASE("itvp trivial cases") {
  const SimplexState x0 = make_simplex(0.2, 0.5, 0.3);
  const ItvpResult z = solve_itvp(x0, unit_weights(), ItvpConfig{3, 1e-2, 0.5, 1e-12, 100});
  CHECK(z.converged);
  for (std::size_t k = 0; k < z.trajectory.size(); ++k) {
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(z.trajectory.states[k][i] == Approx(x0[i]).epsilon(1e-15));
      CHECK(z.trajectory.values[k][i] == 0.0);
    }
  }
  const CostWeights w = testsupport::crowd_averse();
  const ItvpResult short_run = solve_itvp(x0, w, ItvpConfig{1e-6, 1e-6, 0.5, 1e-12, 100});
  CHECK(short_run.trajectory.states.front() == x0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(short_run.trajectory.values.front()[i] ==
          Approx(terminal_values(x0, w)[i]).epsilon(1e-5));
  }
  CHECK_THROWS_AS(solve_itvp(x0, w, ItvpConfig{0.0, 1e-2, 0.5, 1e-9, 10}), Error);
  CHECK_THROWS_AS(solve_itvp(x0, w, ItvpConfig{1.0, -1.0, 0.5, 1e-9, 10}), Error);
}

TEST_CASE("itvp agrees with a nested shooting oracle") {
  const ItvpResult r = solve_itvp(make_simplex(0.3, 0.3, 0.4), testsupport::crowd_averse(), ItvpConfig{});
  REQUIRE(r.converged);
  const testsupport::ShootingModel oracle;
  const auto [xT, v0] = oracle.trajectory_ends(0.3, 0.3, 10.0, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(r.trajectory.states.back()[i] - xT[i]) < 1e-4);
    CHECK(std::abs(r.trajectory.values.front()[i] - v0[i]) < 1e-4);
  }
}

TEST_CASE("itvp on an asymmetric game") {
  const CostWeights w = testsupport::weights({1, 1.2, 1}, 0.5, 0.6);
  // a start whose solution keeps v1, v2 < v3, where the oracle's closed form holds
  const ItvpResult r = solve_itvp(make_simplex(0.3, 0.2, 0.5), w, ItvpConfig{5, 1e-3, 0.5, 1e-10, 2000});
  REQUIRE(r.converged);
  for (const auto& v : r.trajectory.values) REQUIRE((v[0] < v[2] && v[1] < v[2]));
  CHECK(r.kolmogorov_residual < 1e-8);
  testsupport::ShootingModel oracle;
  oracle.q2 = 1.2;
  oracle.g23 = 0.6;
  const auto [xT, v0] = oracle.trajectory_ends(0.3, 0.2, 5.0, 1e-3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(r.trajectory.states.back()[i] - xT[i]) < 1e-4);
    CHECK(std::abs(r.trajectory.values.front()[i] - v0[i]) < 1e-4);
  }
}

TEST_CASE("chain sampling") {
  const AgentPath still = sample_chain_path([](double) { return RateMatrix(); }, 1.0, 10, Opinion::b, 3);
  CHECK(still.states.size() == 1);
  CHECK(still.state_at(9.0) == Opinion::b);

  double mean = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const AgentPath p = sample_chain_path([](double) { return RateMatrix(1, 0, 0, 0); }, 1.0, 1e3,
                                          Opinion::a, derive_seed(99, static_cast<std::uint64_t>(k)));
    REQUIRE(p.jump_times.size() >= 2);
    mean += p.jump_times[1] / n;
  }
  CHECK(std::abs(mean - 1.0) < 0.03);
}

TEST_CASE("population sampling matches the forward equation and ignores jobs") {
  const CostWeights w = testsupport::crowd_averse();
  const ItvpResult r = solve_itvp(make_simplex(0.5, 0.2, 0.3), w, ItvpConfig{5, 1e-3, 0.5, 1e-9, 2000});
  REQUIRE(r.converged);
  const Vec3 a = sample_population(r.trajectory, w, 4000, 5, 1);
  const Vec3 b = sample_population(r.trajectory, w, 4000, 5, 3);
  CHECK(a == b);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(a[i] - r.trajectory.states.back()[i]) < 0.03);
}

TEST_CASE("trajectory csv") {
  const Trajectory t = integrate_forward(make_simplex(0.5, 0.5, 0), [](double) { return RateMatrix(1, 0, 1, 0); },
                                         0.02, 1e-2);
  std::ostringstream out;
  write_trajectory_csv(t, out);
  CHECK(out.str().rfind("t,x1,x2,x3,v1,v2,v3\n0,0.5,0.5,0,,,\n", 0) == 0);
}
