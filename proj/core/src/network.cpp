#include "mfgnet/network.hpp"

#include <cmath>
#include <ostream>

#include <fmt/core.h>

#include "mfgnet/error.hpp"
#include "mfgnet/io.hpp"
#include "mfgnet/rk4.hpp"

namespace mfgnet {

NodeTriple NodeTriple::uniform(std::size_t n, double s, double z, double r) {
  NodeTriple t;
  t.s.assign(n, s);
  t.z.assign(n, z);
  t.r.assign(n, r);
  return t;
}

void NodeTriple::validate(double tol) const {
  if (z.size() != s.size() || r.size() != s.size()) {
    throw Error(ErrorCode::invalid_argument, "node vectors differ in length");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double sum = s[i] + z[i] + r[i];
    const bool ok = s[i] >= -tol && z[i] >= -tol && r[i] >= -tol &&
                    s[i] <= 1 + tol && z[i] <= 1 + tol && r[i] <= 1 + tol &&
                    std::abs(sum - 1.0) <= tol;
    if (!ok) {
      throw Error(ErrorCode::not_a_simplex,
                  fmt::format("node {}: ({}, {}, {}) is not a probability vector",
                              i + 1, s[i], z[i], r[i]));
    }
  }
}

namespace {

NodeTriple unpack(const std::vector<double>& y, std::size_t n) {
  NodeTriple x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.s[i] = y[i];
    x.r[i] = y[n + i];
    x.z[i] = 1.0 - x.s[i] - x.r[i];
  }
  return x;
}

}  // namespace

NetworkTrajectory integrate_network(const NodeTriple& x0, const PackedRhs& rhs,
                                    double horizon, double dt) {
  x0.validate();
  const std::size_t n = x0.size();
  std::vector<double> y(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x0.s[i];
    y[n + i] = x0.r[i];
  }
  NetworkTrajectory traj;
  traj.times = uniform_grid(0.0, horizon, dt);
  traj.states.reserve(traj.times.size());
  traj.states.push_back(x0);
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const double h = traj.times[k + 1] - t;
    auto stage = [&](double tt, const std::vector<double>& yy,
                     std::vector<double>& dy) { rhs(tt, k, yy, dy); };
    y = rk4_step(stage, t, y, h);
    NodeTriple x = unpack(y, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double c : {x.s[i], x.z[i], x.r[i]}) {
        if (!(c >= -1e-6 && c <= 1.0 + 1e-6)) {
          throw Error(ErrorCode::step_too_large,
                      fmt::format("node {} left [0, 1] at t={} (value {}); "
                                  "reduce dt={}",
                                  i + 1, traj.times[k + 1], c, dt));
        }
      }
    }
    traj.states.push_back(std::move(x));
  }
  return traj;
}

void write_network_csv(const NetworkTrajectory& traj, std::ostream& out,
                       std::size_t stride) {
  if (stride == 0) stride = 1;
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  out << 't';
  for (const char* name : {"s", "z", "r"}) {
    for (std::size_t i = 1; i <= n; ++i) out << ',' << name << '_' << i;
  }
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k % stride != 0 && k + 1 != traj.size()) continue;
    const NodeTriple& x = traj.states[k];
    out << format_number(traj.times[k]);
    for (const auto* v : {&x.s, &x.z, &x.r}) {
      for (double c : *v) out << ',' << format_number(c);
    }
    out << '\n';
  }
}

}  // namespace mfgnet
