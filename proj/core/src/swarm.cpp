#include "mfgnet/swarm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace mfgnet {

void SwarmParams::validate() const {
  for (double v : {gamma1, gamma2, r1, r2, sigma1, sigma2, alpha1, alpha2}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("swarm rates must be finite and >= 0 (got {})", v));
    }
  }
}

Vec3 honeybee_meanfield_rhs(const SimplexState& x, const SwarmParams& p) {
  const double d1 = x.x3() * (p.r1 * x.x1() + p.gamma1) -
                    x.x1() * (p.sigma2 * x.x2() + p.alpha1);
  const double d2 = x.x3() * (p.r2 * x.x2() + p.gamma2) -
                    x.x2() * (p.sigma1 * x.x1() + p.alpha2);
  return {d1, d2, -(d1 + d2)};
}

CostWeights MfgMapping::weights() const {
  CostWeights w = CostWeights::with_slopes({0.0, 0.0, 0.0});
  w.Gamma[idx(Opinion::a)][idx(Opinion::uncommitted)] = gamma13;
  w.Gamma[idx(Opinion::b)][idx(Opinion::uncommitted)] = gamma23;
  return w;
}

namespace {

double positive_ratio(double num, double den, const char* what) {
  const double g = num / den;
  if (!(den > 0.0) || !(num > 0.0) || !std::isfinite(g)) {
    throw Error(ErrorCode::degenerate_mapping,
                fmt::format("{} = {}/{} is not a positive weight", what, num, den));
  }
  return g;
}

}  // namespace

MfgMapping mfg_to_swarm_map(const SwarmParams& p, const SimplexState& x) {
  p.validate();
  MfgMapping m;
  const double pull1 = p.gamma1 + p.r1 * x.x1();
  const double pull2 = p.gamma2 + p.r2 * x.x2();
  m.y_star = {-pull1, -pull2};
  m.gamma13 = positive_ratio(pull1, p.alpha1 + p.sigma2 * x.x2(), "Gamma13");
  m.gamma23 = positive_ratio(pull2, p.alpha2 + p.sigma1 * x.x1(), "Gamma23");
  return m;
}

void NetworkSwarmParams::validate() const {
  for (const RateMatrix* b : {&beta_prime, &beta_doubleprime}) {
    if (!(b->b13() > 0 && b->b31() > 0 && b->b23() > 0 && b->b32() > 0)) {
      throw Error(ErrorCode::hypothesis_violated,
                  "all interaction and spontaneous rates must be positive");
    }
  }
  if (!graph.is_strongly_connected()) {
    throw Error(ErrorCode::hypothesis_violated, "graph is not strongly connected");
  }
}

NodeTriple swarm_network_rhs(const NodeTriple& x, const NetworkSwarmParams& p) {
  const std::size_t n = x.size();
  const RateMatrix& b1 = p.beta_prime;
  const RateMatrix& b2 = p.beta_doubleprime;
  std::vector<double> As(n), Ar(n);
  p.graph.multiply(x.s, As);
  p.graph.multiply(x.r, Ar);
  NodeTriple d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.s[i] = -b1.b23() * x.s[i] * Ar[i] + b1.b32() * x.z[i] * As[i] -
             b2.b23() * x.s[i] + b2.b32() * x.z[i];
    d.r[i] = -b1.b13() * x.r[i] * As[i] + b1.b31() * x.z[i] * Ar[i] -
             b2.b13() * x.r[i] + b2.b31() * x.z[i];
    d.z[i] = -(d.s[i] + d.r[i]);
  }
  return d;
}

std::vector<double> swarm_jacobian(const NodeTriple& x, const NetworkSwarmParams& p) {
  const std::size_t n = x.size();
  const std::size_t m = 2 * n;
  const RateMatrix& b1 = p.beta_prime;
  const RateMatrix& b2 = p.beta_doubleprime;
  std::vector<double> As(n), Ar(n);
  p.graph.multiply(x.s, As);
  p.graph.multiply(x.r, Ar);
  std::vector<double> J(m * m, 0.0);
  auto at = [&](std::size_t row, std::size_t col) -> double& {
    return J[row * m + col];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = 1.0 - x.s[i] - x.r[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double a = p.graph(i, j);
      at(i, j) += b1.b32() * zi * a;
      at(i, n + j) += -b1.b23() * x.s[i] * a;
      at(n + i, n + j) += b1.b31() * zi * a;
      at(n + i, j) += -b1.b13() * x.r[i] * a;
    }
    at(i, i) += -b1.b23() * Ar[i] - b1.b32() * As[i] - b2.b23() - b2.b32();
    at(i, n + i) += -b1.b32() * As[i] - b2.b32();
    at(n + i, n + i) += -b1.b13() * As[i] - b1.b31() * Ar[i] - b2.b13() - b2.b31();
    at(n + i, i) += -b1.b31() * Ar[i] - b2.b31();
  }
  return J;
}

std::string_view to_string(SwarmVerdict v) noexcept {
  switch (v) {
    case SwarmVerdict::asymptotically_stable: return "asymptotically stable";
    case SwarmVerdict::saddle: return "saddle";
    case SwarmVerdict::not_an_equilibrium: return "not an equilibrium";
  }
  return "not an equilibrium";
}

namespace {

constexpr double kSwarmResidual = 1e-12;

double residual_of(const NodeTriple& x, const NetworkSwarmParams& p) {
  const NodeTriple d = swarm_network_rhs(x, p);
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    res = std::max({res, std::abs(d.s[i]), std::abs(d.z[i]), std::abs(d.r[i])});
  }
  return res;
}

SwarmEquilibrium assess(std::string label, NodeTriple x, const NetworkSwarmParams& p) {
  SwarmEquilibrium e;
  e.label = std::move(label);
  e.residual = residual_of(x, p);
  e.is_equilibrium = e.residual < kSwarmResidual;
  const std::vector<double> J = swarm_jacobian(x, p);
  const std::size_t m = 2 * x.size();
  bool dominant = true;
  for (std::size_t row = 0; row < m; ++row) {
    double off = 0.0;
    for (std::size_t col = 0; col < m; ++col) {
      if (col != row) off += std::abs(J[row * m + col]);
    }
    const double diag = J[row * m + row];
    e.trace += diag;
    dominant = dominant && diag < 0.0 && -diag > off;
  }
  if (!e.is_equilibrium) {
    e.verdict = SwarmVerdict::not_an_equilibrium;
  } else if (e.trace < 0.0 && dominant) {
    e.verdict = SwarmVerdict::asymptotically_stable;
  } else {
    e.verdict = SwarmVerdict::saddle;
  }
  e.state = std::move(x);
  return e;
}

bool proportional(double num, double den, double k) {
  return std::abs(num - k * den) <= 1e-12 * std::max(1.0, std::abs(num));
}

}  // namespace

std::vector<SwarmEquilibrium> swarm_equilibria(const NetworkSwarmParams& p,
                                               std::optional<double> k) {
  p.validate();
  const std::size_t n = p.graph.size();
  std::vector<SwarmEquilibrium> out;
  out.push_back(assess("s=1,r=0", NodeTriple::uniform(n, 1.0, 0.0, 0.0), p));
  out.push_back(assess("s=0,r=1", NodeTriple::uniform(n, 0.0, 0.0, 1.0), p));
  if (k) {
    const double kk = *k;
    if (!(kk > 0.0) || !std::isfinite(kk)) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("connectivity parameter k={} must be positive", kk));
    }
    for (const RateMatrix* b : {&p.beta_prime, &p.beta_doubleprime}) {
      if (!proportional(b->b23(), b->b32(), kk) ||
          !proportional(b->b13(), b->b31(), kk)) {
        throw Error(ErrorCode::hypothesis_violated,
                    fmt::format("rates b23={} b32={} b13={} b31={} are not in "
                                "ratio k={}",
                                b->b23(), b->b32(), b->b13(), b->b31(), kk));
      }
    }
    const double c = 1.0 / (2.0 + kk);
    out.push_back(assess(fmt::format("s=r=1/(2+{})", kk),
                         NodeTriple::uniform(n, c, 1.0 - 2.0 * c, c), p));
  }
  return out;
}

NetworkTrajectory simulate_swarm(const NodeTriple& x0, const NetworkSwarmParams& p,
                                 double horizon, double dt) {
  const std::size_t n = x0.size();
  if (p.graph.size() != n) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("state has {} nodes, graph has {}", n, p.graph.size()));
  }
  auto rhs = [&](double, std::size_t, const std::vector<double>& y,
                 std::vector<double>& dy) {
    NodeTriple x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x.s[i] = y[i];
      x.r[i] = y[n + i];
      x.z[i] = 1.0 - y[i] - y[n + i];
    }
    const NodeTriple d = swarm_network_rhs(x, p);
    for (std::size_t i = 0; i < n; ++i) {
      dy[i] = d.s[i];
      dy[n + i] = d.r[i];
    }
  };
  return integrate_network(x0, rhs, horizon, dt);
}

}  // namespace mfgnet
