#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "mfgnet/error.hpp"
#include "mfgnet/io.hpp"
#include "mfgnet/mfg.hpp"
#include "mfgnet/rk4.hpp"
#include "mfgnet/scenario.hpp"
#include "mfgnet/stationary.hpp"
#include "mfgnet/swarm.hpp"

namespace mfgnet::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Key {
  std::string_view name;
  std::string_view doc;
};

struct Command {
  std::string_view name;
  std::string_view summary;
  std::vector<Key> keys;
};

const std::vector<Key> kWeightKeys = {
    {"slopes", "[f1, f2, f3] linear congestion slopes (default [1,1,1])"},
    {"gamma13", "disturbance weight on 1->3 (default 0.5)"},
    {"gamma23", "disturbance weight on 2->3 (default 0.5)"},
};

const std::vector<Key> kAttackKeys = {
    {"attack", "\"low-rate\" | \"sequential\" (default low-rate)"},
    {"k_hat", "disturbance amplitude (preset: 0.8 low-rate, 1.2 sequential)"},
    {"omega_hat", "disturbance scale (default 1)"},
    {"sample_interval", "iterations between disturbance draws (preset: 150 | 100)"},
    {"burst_multiplier", "rate multiplier on burst iterations (default 5)"},
    {"burst_period", "iterations between bursts (default 5)"},
};

const std::vector<Key> kNodeKeys = {
    {"graph", "\"walpole\" | \"complete:N\" | edge-list path (default walpole)"},
    {"initial", "\"walpole-node11\" | \"uniform\" | \"nodes\""},
    {"uniform", "[s, z, r] applied to every node when initial = uniform"},
    {"initial_nodes", "[[s, z, r], ...] one per node when initial = nodes"},
};

std::vector<Key> join(std::initializer_list<std::vector<Key>> parts) {
  std::vector<Key> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"mfg-solve", "Solve the forward-backward game on [0, T]; writes trajectory.csv",
       join({{{"x0", "initial distribution [x1, x2, x3] (default [0.3,0.3,0.4])"}},
             kWeightKeys,
             {{"horizon", "T (default 10)"},
              {"dt", "step (default 1e-3)"},
              {"relaxation", "Picard damping (default 0.5)"},
              {"tolerance", "sup-norm stop (default 1e-9)"},
              {"max_iterations", "iteration cap (default 2000)"},
              {"agents", "Monte Carlo players sampled at T, 0 to skip (default 0)"},
              {"seed", "sampling seed (default 42)"}}})},
      {"stationary", "Stationary value and distribution; writes stationary.json",
       join({{{"coefficients",
               "{a11, a12, a21, a22, c1, c2}: solve the reduced system directly"}},
             kWeightKeys,
             {{"y_guess", "[y1, y2] start for the fixed point (default [-1,-1])"}}})},
      {"convergence", "Long-horizon distance to the stationary solution; writes convergence.csv",
       join({{{"x0", "initial distribution (default [0.3,0.3,0.4])"}},
             kWeightKeys,
             {{"horizons", "list of T (default [5,10,20,40])"},
              {"dt", "step (default 1e-2)"},
              {"relaxation", "Picard damping (default 0.5)"},
              {"tolerance", "sup-norm stop (default 1e-10)"},
              {"max_iterations", "iteration cap (default 5000)"}}})},
      {"swarm-sim", "Honeybee model, mean-field or networked; writes trajectory.csv",
       join({{{"model", "\"network\" | \"meanfield\" (default network)"}},
             kNodeKeys,
             {{"beta_prime", "interaction rates [b13, b31, b23, b32] (default [1,0.5,1,0.5])"},
              {"beta_doubleprime", "spontaneous rates [b13, b31, b23, b32] (default [0.2,0.1,0.2,0.1])"},
              {"k", "rate ratio for the interior equilibrium check (optional)"},
              {"params", "meanfield {gamma1, gamma2, r1, r2, sigma1, sigma2, alpha1, alpha2}"},
              {"x0", "meanfield initial distribution (default [0.1,0.1,0.8])"},
              {"horizon", "T (default 50)"},
              {"dt", "step (default 1e-2)"},
              {"stride", "CSV row stride (default 10)"}}})},
      {"virus-sim", "Networked epidemic under an attack schedule; writes trajectory.csv",
       join({kNodeKeys,
             {{"beta13", "infection of type-1 nodes (default 0.13)"},
              {"beta23", "infection of type-2 nodes (default 0.13)"},
              {"beta31", "recovery to type 1 (default 0.1)"},
              {"beta32", "recovery to type 2 (default 0.1)"}},
             kAttackKeys,
             {{"horizon", "T (default 200)"},
              {"dt", "step, one schedule iteration (default 1e-2)"},
              {"stride", "CSV row stride (default 10)"}}})},
      {"grid-sim", "Oscillator buses driven by attack disturbances; writes frequency.csv",
       join({{{"infection", "per-node attack probability list"},
              {"infection_file", "JSON file with {\"1\": p1, ...} or a list"},
              {"graph", "coupling graph for adjacency_coupling (default walpole)"},
              {"omega", "natural frequency offset (default 0)"},
              {"M", "inertia (default 1)"},
              {"D", "damping (default 0.1)"},
              {"K", "coupling (default 10)"},
              {"adjacency_coupling", "weight coupling by the graph (default false)"}},
             kAttackKeys,
             {{"iterations", "steps (default 1500)"},
              {"dt", "step (default 1e-2)"},
              {"band", "[low, high] Hz (default [49.5, 50.5])"},
              {"seed", "disturbance seed (default 42)"},
              {"stride", "CSV row stride (default 1)"}}})},
      {"scenario", "Epidemic, histograms and grid response in one run; writes a bundle",
       {{"graph", "\"walpole\" or edge-list path (default walpole)"},
        {"initial", "\"walpole-node11\" | \"nodes\""},
        {"initial_nodes", "[[s, z, r], ...] when initial = nodes"},
        {"seed", "grid disturbance seed (default 42)"},
        {"output", "bundle directory when --out is not given"},
        {"epidemic", "{beta13, beta23, beta31, beta32, horizon (40), steady_horizon (200), dt}"},
        {"attack", "{kind, burst_multiplier, burst_period, sample_interval, k_hat, omega_hat}"},
        {"grid", "{omega, M, D, K, adjacency_coupling, iterations, dt, band}"}}},
      {"buckets", "Infection histogram; writes histogram.json",
       {{"infection", "per-node infection list"},
        {"infection_file", "JSON file with {\"1\": z1, ...} or a list"}}},
  };
  return cmds;
}

const Command& command(std::string_view name) {
  for (const auto& c : commands()) {
    if (c.name == name) return c;
  }
  throw std::logic_error("unregistered command");
}

std::string key_help(const Command& c) {
  std::string s = "Config keys (JSON object, all optional):\n";
  for (const auto& k : c.keys) s += fmt::format("  {:<18} {}\n", k.name, k.doc);
  return s;
}

// A JSON object restricted to the documented keys of one command.
class Config {
 public:
  Config(json j, const Command& cmd, fs::path base)
      : j_(std::move(j)), cmd_(cmd), base_(std::move(base)) {
    if (!j_.is_object()) {
      throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
    }
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!documented(it.key())) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("unknown key '{}' for {}", it.key(), cmd_.name));
      }
    }
  }

  bool has(std::string_view key) const {
    require(key);
    return j_.contains(std::string(key));
  }

  template <class T>
  T get(std::string_view key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return j_.at(std::string(key)).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("config key '{}' has the wrong type", key));
    }
  }

  const json& raw(std::string_view key) const {
    require(key);
    return j_.at(std::string(key));
  }

  std::string path(std::string_view key) const {
    fs::path p = get<std::string>(key, "");
    if (p.is_relative() && !base_.empty()) p = base_ / p;
    return p.string();
  }

  const fs::path& base() const { return base_; }

 private:
  bool documented(std::string_view key) const {
    for (const auto& k : cmd_.keys) {
      if (k.name == key) return true;
    }
    return false;
  }
  void require(std::string_view key) const {
    if (!documented(key)) throw std::logic_error(fmt::format("undocumented key {}", key));
  }

  json j_;
  const Command& cmd_;
  fs::path base_;
};

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool verbose = false;
};

class Bundle {
 public:
  explicit Bundle(fs::path dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, const std::string& content) {
    write_text_file((dir_ / name).string(), content);
    names_.push_back(name);
  }
  const std::vector<std::string>& names() const { return names_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

fs::path output_dir(const Options& o, std::string_view sub) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("MFGNET_OUT"); env != nullptr && *env != '\0') {
    return fs::path(env) / sub;
  }
  return fs::path("mfgnet-out") / sub;
}

double r12(double x) { return round_sig12(x); }

json r12(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs) a.push_back(round_sig12(x));
  return a;
}

SimplexState simplex(const std::array<double, 3>& x) { return make_simplex(x[0], x[1], x[2]); }

CostWeights weights_from(const Config& c) {
  CostWeights w = CostWeights::with_slopes(c.get<std::array<double, 3>>("slopes", {1, 1, 1}));
  w.Gamma[idx(Opinion::a)][idx(Opinion::uncommitted)] = c.get("gamma13", 0.5);
  w.Gamma[idx(Opinion::b)][idx(Opinion::uncommitted)] = c.get("gamma23", 0.5);
  w.validate();
  return w;
}

Graph graph_from(const Config& c) {
  const std::string g = c.get<std::string>("graph", "walpole");
  if (g == "walpole") return walpole_graph();
  if (g.rfind("complete:", 0) == 0) {
    const int n = std::atoi(g.c_str() + 9);
    if (n < 1) throw Error(ErrorCode::invalid_argument, fmt::format("bad graph '{}'", g));
    return Graph::complete(static_cast<std::size_t>(n));
  }
  return load_graph(c.path("graph"));
}

NodeTriple nodes_from(const Config& c, std::size_t n, std::string_view fallback) {
  const std::string init = c.get<std::string>("initial", std::string(fallback));
  NodeTriple x;
  if (init == "walpole-node11") {
    if (n != 11) {
      throw Error(ErrorCode::invalid_argument, "walpole-node11 needs an 11-node graph");
    }
    x = walpole_node11_initial();
  } else if (init == "uniform") {
    const auto u = c.get<std::array<double, 3>>("uniform", {0.3, 0.4, 0.3});
    x = NodeTriple::uniform(n, u[0], u[1], u[2]);
  } else if (init == "nodes") {
    const auto v = c.get<std::vector<std::array<double, 3>>>("initial_nodes", {});
    if (v.size() != n) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("initial_nodes has {} entries for {} nodes", v.size(), n));
    }
    x = NodeTriple(n);
    for (std::size_t i = 0; i < n; ++i) {
      x.s[i] = v[i][0];
      x.z[i] = v[i][1];
      x.r[i] = v[i][2];
    }
  } else {
    throw Error(ErrorCode::invalid_argument, fmt::format("unknown initial '{}'", init));
  }
  x.validate();
  return x;
}

AttackSchedule attack_from(const Config& c) {
  const AttackKind kind = attack_kind_from_string(c.get<std::string>("attack", "low-rate"));
  AttackSchedule s =
      kind == AttackKind::sequential ? AttackSchedule::sequential() : AttackSchedule::low_rate();
  s.k_hat = c.get("k_hat", s.k_hat);
  s.omega_hat = c.get("omega_hat", s.omega_hat);
  s.sample_interval = c.get("sample_interval", s.sample_interval);
  s.burst_multiplier = c.get("burst_multiplier", s.burst_multiplier);
  s.burst_period = c.get("burst_period", s.burst_period);
  s.validate();
  return s;
}

RateMatrix rates_from(const Config& c, std::string_view key, std::array<double, 4> fallback) {
  const auto b = c.get(key, fallback);
  return RateMatrix(b[0], b[1], b[2], b[3]);
}

std::vector<double> infection_from(const Config& c) {
  json j;
  if (c.has("infection")) {
    j = c.raw("infection");
  } else if (c.has("infection_file")) {
    try {
      j = json::parse(read_text_file(c.path("infection_file")));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_argument, fmt::format("infection_file: {}", e.what()));
    }
  } else {
    throw Error(ErrorCode::invalid_argument, "need infection or infection_file");
  }
  std::vector<double> z;
  try {
    if (j.is_array()) return j.get<std::vector<double>>();
    for (std::size_t i = 1; i <= j.size(); ++i) z.push_back(j.at(std::to_string(i)).get<double>());
  } catch (const json::exception&) {
    throw Error(ErrorCode::invalid_argument,
                "infection must be a list or an object keyed \"1\"..\"n\"");
  }
  return z;
}

std::size_t stride_from(const Config& c, std::int64_t fallback) {
  const auto s = c.get<std::int64_t>("stride", fallback);
  if (s < 1) throw Error(ErrorCode::invalid_argument, "stride must be >= 1");
  return static_cast<std::size_t>(s);
}

json rates_json(const RateMatrix& b) {
  return {r12(b.b13()), r12(b.b31()), r12(b.b23()), r12(b.b32())};
}

json run_mfg_solve(const Config& c, const Options& o, Bundle& b) {
  const SimplexState x0 = simplex(c.get<std::array<double, 3>>("x0", {0.3, 0.3, 0.4}));
  const CostWeights w = weights_from(c);
  ItvpConfig ic;
  ic.horizon = c.get("horizon", ic.horizon);
  ic.dt = c.get("dt", ic.dt);
  ic.relaxation = c.get("relaxation", ic.relaxation);
  ic.tolerance = c.get("tolerance", ic.tolerance);
  ic.max_iterations = c.get("max_iterations", ic.max_iterations);
  const auto agents = c.get<std::int64_t>("agents", 0);
  const std::uint64_t seed = o.seed.value_or(c.get<std::uint64_t>("seed", 42));
  if (agents < 0) throw Error(ErrorCode::invalid_argument, "agents must be >= 0");

  const ItvpResult res = solve_itvp(x0, w, ic);
  std::ostringstream csv;
  write_trajectory_csv(res.trajectory, csv);
  b.add("trajectory.csv", csv.str());

  json s;
  s["converged"] = res.converged;
  s["iterations"] = res.iterations;
  s["last_change"] = r12(res.last_change);
  s["kolmogorov_residual"] = r12(res.kolmogorov_residual);
  s["x_final"] = r12(res.trajectory.states.back().values());
  s["v_initial"] = r12(res.trajectory.values.front().v);
  if (agents > 0) {
    const Vec3 emp = sample_population(res.trajectory, w, static_cast<std::size_t>(agents),
                                       seed, o.jobs);
    s["monte_carlo"] = {{"agents", agents}, {"seed", seed}, {"x_final", r12(emp)}};
  }
  if (!res.converged) {
    b.add("summary.json", s.dump(2) + "\n");
    throw Error(ErrorCode::no_convergence,
                fmt::format("no convergence after {} iterations (last change {})",
                            res.iterations, res.last_change));
  }
  return s;
}

json classification_json(const Classification& cl) {
  return {{"verdict", std::string(to_string(cl.stability))},
          {"trace", r12(cl.trace)},
          {"determinant", r12(cl.determinant)}};
}

json run_stationary(const Config& c, const Options&, Bundle&) {
  json s;
  if (c.has("coefficients")) {
    const json& k = c.raw("coefficients");
    ReducedCoefficients rc;
    const std::pair<const char*, double*> fields[] = {{"a11", &rc.a11}, {"a12", &rc.a12},
                                                      {"a21", &rc.a21}, {"a22", &rc.a22},
                                                      {"c1", &rc.c1},   {"c2", &rc.c2}};
    if (!k.is_object() || k.size() != 6) {
      throw Error(ErrorCode::invalid_argument,
                  "coefficients needs exactly a11, a12, a21, a22, c1, c2");
    }
    for (const auto& [name, dst] : fields) {
      if (!k.contains(name) || !k[name].is_number()) {
        throw Error(ErrorCode::invalid_argument, fmt::format("coefficients.{} missing", name));
      }
      *dst = k[name].get<double>();
    }
    rc.validate();
    const ReducedValue y = stationary_y(rc);
    const auto res = reduced_rhs(y, rc);
    s["y_star"] = {r12(y.y1), r12(y.y2)};
    s["residual"] = r12(std::max(std::abs(res[0]), std::abs(res[1])));
    s["classification"] = classification_json(classify_equilibrium(y, rc));
    return s;
  }
  const CostWeights w = weights_from(c);
  const auto g = c.get<std::array<double, 2>>("y_guess", {-1.0, -1.0});
  const StationarySolution sol = solve_stationary(w, {g[0], g[1]});
  s["y_star"] = {r12(sol.y_star.y1), r12(sol.y_star.y2)};
  s["x_hat"] = r12(sol.x_hat.values());
  s["kappa"] = r12(sol.kappa);
  s["classification"] = classification_json(sol.classification);
  return s;
}

json run_convergence(const Config& c, const Options& o, Bundle& b) {
  const SimplexState x0 = simplex(c.get<std::array<double, 3>>("x0", {0.3, 0.3, 0.4}));
  const CostWeights w = weights_from(c);
  const auto horizons = c.get<std::vector<double>>("horizons", {5, 10, 20, 40});
  ConvergenceOptions opt;
  opt.dt = c.get("dt", opt.dt);
  opt.relaxation = c.get("relaxation", opt.relaxation);
  opt.tolerance = c.get("tolerance", opt.tolerance);
  opt.max_iterations = c.get("max_iterations", opt.max_iterations);
  opt.jobs = o.jobs;
  const StationarySolution st = solve_stationary(w);
  const auto recs = convergence_study(x0, w, horizons, st, opt);
  std::ostringstream csv;
  write_convergence_csv(recs, csv);
  b.add("convergence.csv", csv.str());
  json s;
  s["x_hat"] = r12(st.x_hat.values());
  s["y_star"] = {r12(st.y_star.y1), r12(st.y_star.y2)};
  s["records"] = json::array();
  for (const auto& r : recs) {
    s["records"].push_back({{"T", r12(r.horizon)},
                            {"dx_sup", r12(r.dx_sup)},
                            {"dv_sharp", r12(r.dv_sharp)},
                            {"iterations", r.iterations}});
  }
  return s;
}

json run_swarm_meanfield(const Config& c, Bundle& b) {
  SwarmParams p{0.1, 0.1, 1.0, 1.0, 0.5, 0.5, 0.05, 0.05};
  if (c.has("params")) {
    const json& j = c.raw("params");
    const std::pair<const char*, double*> fields[] = {
        {"gamma1", &p.gamma1}, {"gamma2", &p.gamma2}, {"r1", &p.r1},
        {"r2", &p.r2},         {"sigma1", &p.sigma1}, {"sigma2", &p.sigma2},
        {"alpha1", &p.alpha1}, {"alpha2", &p.alpha2}};
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "params must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (const auto& [name, dst] : fields) {
        if (it.key() == name && it.value().is_number()) {
          *dst = it.value().get<double>();
          known = true;
        }
      }
      if (!known) {
        throw Error(ErrorCode::invalid_argument, fmt::format("bad params key '{}'", it.key()));
      }
    }
  }
  p.validate();
  const SimplexState x0 = simplex(c.get<std::array<double, 3>>("x0", {0.1, 0.1, 0.8}));
  const double T = c.get("horizon", 50.0);
  const double dt = c.get("dt", 1e-2);
  const std::size_t stride = stride_from(c, 10);
  if (!(T > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "need horizon, dt > 0");

  const auto grid = uniform_grid(0.0, T, dt);
  auto rhs = [&](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    const Vec3 d = honeybee_meanfield_rhs(SimplexState::project(y[0], y[1], 1.0 - y[0] - y[1]), p);
    dy = {d[0], d[1]};
  };
  std::array<double, 2> y{x0.x1(), x0.x2()};
  std::string csv = "t,x1,x2,x3\n";
  auto row = [&](double t) {
    csv += fmt::format("{},{},{},{}\n", format_number(t), format_number(y[0]),
                       format_number(y[1]), format_number(1.0 - y[0] - y[1]));
  };
  row(grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    y = rk4_step(rhs, grid[k - 1], y, grid[k] - grid[k - 1]);
    if (k % stride == 0 || k + 1 == grid.size()) row(grid[k]);
  }
  b.add("trajectory.csv", csv);
  const SimplexState xf = make_simplex(y[0], y[1], 1.0 - y[0] - y[1]);
  json s;
  s["model"] = "meanfield";
  s["x_final"] = r12(xf.values());
  try {
    const MfgMapping m = mfg_to_swarm_map(p, xf);
    s["mapping"] = {{"y_star", {r12(m.y_star.y1), r12(m.y_star.y2)}},
                    {"gamma13", r12(m.gamma13)},
                    {"gamma23", r12(m.gamma23)}};
  } catch (const Error& e) {
    s["mapping_error"] = e.what();
  }
  return s;
}

json run_swarm_sim(const Config& c, const Options&, Bundle& b) {
  const std::string model = c.get<std::string>("model", "network");
  if (model == "meanfield") return run_swarm_meanfield(c, b);
  if (model != "network") {
    throw Error(ErrorCode::invalid_argument, fmt::format("unknown model '{}'", model));
  }
  NetworkSwarmParams p{rates_from(c, "beta_prime", {1.0, 0.5, 1.0, 0.5}),
                       rates_from(c, "beta_doubleprime", {0.2, 0.1, 0.2, 0.1}), graph_from(c)};
  p.validate();
  const NodeTriple x0 = nodes_from(c, p.graph.size(), "uniform");
  const double T = c.get("horizon", 50.0);
  const double dt = c.get("dt", 1e-2);
  const NetworkTrajectory traj = simulate_swarm(x0, p, T, dt);
  std::ostringstream csv;
  write_network_csv(traj, csv, stride_from(c, 10));
  b.add("trajectory.csv", csv.str());

  std::optional<double> k;
  if (c.has("k")) k = c.get("k", 0.0);
  json eq = json::array();
  for (const auto& e : swarm_equilibria(p, k)) {
    eq.push_back({{"label", e.label},
                  {"residual", r12(e.residual)},
                  {"is_equilibrium", e.is_equilibrium},
                  {"verdict", std::string(to_string(e.verdict))},
                  {"trace", r12(e.trace)}});
  }
  b.add("equilibria.json", eq.dump(2) + "\n");
  json s;
  s["model"] = "network";
  s["beta_prime"] = rates_json(p.beta_prime);
  s["beta_doubleprime"] = rates_json(p.beta_doubleprime);
  s["s_final"] = r12(traj.states.back().s);
  s["r_final"] = r12(traj.states.back().r);
  s["equilibria"] = eq;
  return s;
}

json run_virus_sim(const Config& c, const Options&, Bundle& b) {
  EpidemicParams p;
  p.beta13 = c.get("beta13", p.beta13);
  p.beta23 = c.get("beta23", p.beta23);
  p.beta31 = c.get("beta31", p.beta31);
  p.beta32 = c.get("beta32", p.beta32);
  p.graph = graph_from(c);
  p.validate();
  AttackSchedule sched = attack_from(c);
  sched.base13 = p.beta13;
  sched.base23 = p.beta23;
  const NodeTriple x0 = nodes_from(c, p.graph.size(), "walpole-node11");
  const EpidemicRun run = simulate_epidemic(x0, p, sched, c.get("horizon", 200.0),
                                            c.get("dt", 1e-2));
  std::ostringstream csv;
  write_network_csv(run.trajectory, csv, stride_from(c, 10));
  b.add("trajectory.csv", csv.str());
  std::ostringstream inf;
  write_infection_json(run.steady_infection, inf);
  b.add("infection_steady_state.json", inf.str());
  json s;
  s["attack"] = std::string(to_string(sched.kind));
  s["steady"] = run.steady;
  s["staleness"] = r12(run.staleness);
  s["infection_final"] = r12(run.steady_infection);
  s["histogram"] = bucket_histogram(run.steady_infection).counts;
  return s;
}

json run_grid_sim(const Config& c, const Options& o, Bundle& b) {
  const std::vector<double> z = infection_from(c);
  OscillatorParams p;
  p.omega = c.get("omega", p.omega);
  p.M = c.get("M", p.M);
  p.D = c.get("D", p.D);
  p.K = c.get("K", p.K);
  p.n = z.size();
  p.adjacency_coupling = c.get("adjacency_coupling", false);
  if (p.adjacency_coupling) p.graph = graph_from(c);
  p.validate();
  const AttackSchedule sched = attack_from(c);
  const auto band = c.get<std::array<double, 2>>("band", {49.5, 50.5});
  if (!(band[0] < band[1])) throw Error(ErrorCode::invalid_argument, "empty band");
  const std::uint64_t seed = o.seed.value_or(c.get<std::uint64_t>("seed", 42));
  const FrequencyTrace tr = simulate_grid(z, p, sched, c.get<std::int64_t>("iterations", 1500),
                                          c.get("dt", 1e-2), seed);
  const ExcursionStats st = frequency_excursion_stats(tr, band[0], band[1]);
  std::ostringstream csv;
  write_frequency_csv(tr, csv, stride_from(c, 1));
  b.add("frequency.csv", csv.str());
  std::ostringstream ex;
  write_excursion_json(st, band[0], band[1], ex);
  b.add("excursion_stats.json", ex.str());
  json s;
  s["attack"] = std::string(to_string(sched.kind));
  s["seed"] = seed;
  s["band_exceeded"] = tr.band_exceeded;
  s["peak_hz"] = r12(st.peak);
  return s;
}

json run_buckets(const Config& c, const Options&, Bundle& b) {
  const InfectionHistogram h = bucket_histogram(infection_from(c));
  b.add("histogram.json", histogram_json(h));
  return {{"counts", h.counts}, {"infected", h.infected()}};
}

json run_scenario_cmd(const std::string& text, const fs::path& base, const Options& o,
                      Bundle& b) {
  ScenarioConfig cfg = ScenarioConfig::from_json(text, base);
  const bool config_output = json::parse(text).contains("output");
  if (!o.out.empty() || !config_output) {
    cfg.output = output_dir(o, "scenario").string();
  } else if (fs::path(cfg.output).is_relative() && !base.empty()) {
    cfg.output = (base / cfg.output).string();
  }
  if (o.seed) cfg.seed = *o.seed;
  b = Bundle(cfg.output);
  const ScenarioReport r = run_scenario(cfg);
  json s;
  s["attack"] = std::string(to_string(cfg.attack.kind));
  s["seed"] = cfg.seed;
  s["histogram_mid"] = r.mid.counts;
  s["histogram_final"] = r.final.counts;
  s["final_dominates_mid"] = stochastically_dominates(r.final, r.mid);
  s["steady"] = r.steady;
  s["staleness"] = r12(r.staleness);
  s["band_exceeded"] = r.band_exceeded;
  s["peak_hz"] = r12(r.excursions.peak);
  s["files"] = r.files;
  return s;
}

void domain_error(std::ostream& err, std::string_view code, std::string_view msg) {
  err << json{{"error", code}, {"message", msg}}.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust mean-field games on networks: solvers and scenario runs", "mfgnet"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  Options o;
  std::uint64_t seed = 0;
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(std::string(c.name), std::string(c.summary));
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--out", o.out, "Output directory (default $MFGNET_OUT/<cmd> or mfgnet-out/<cmd>)");
    sub->add_option("--seed", seed, "Seed override");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_flag("--verbose", o.verbose, "Progress on stderr");
    sub->footer(key_help(c));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (sub->count("--seed") > 0) o.seed = seed;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::string text = "{}";
    fs::path base;
    if (!o.config.empty()) {
      text = read_text_file(o.config);
      base = fs::path(o.config).parent_path();
    }
    Bundle bundle(output_dir(o, name));
    json summary;
    if (name == "scenario") {
      summary = run_scenario_cmd(text, base, o, bundle);
    } else {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_argument, fmt::format("config: {}", e.what()));
      }
      const Config cfg(std::move(j), command(name), base);
      if (name == "mfg-solve") summary = run_mfg_solve(cfg, o, bundle);
      else if (name == "stationary") summary = run_stationary(cfg, o, bundle);
      else if (name == "convergence") summary = run_convergence(cfg, o, bundle);
      else if (name == "swarm-sim") summary = run_swarm_sim(cfg, o, bundle);
      else if (name == "virus-sim") summary = run_virus_sim(cfg, o, bundle);
      else if (name == "grid-sim") summary = run_grid_sim(cfg, o, bundle);
      else summary = run_buckets(cfg, o, bundle);
      bundle.add("summary.json", summary.dump(2) + "\n");
    }
    out << summary.dump(2) << "\n";
    if (o.verbose) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const std::size_t files =
          summary.contains("files") ? summary["files"].size() : bundle.names().size();
      err << fmt::format("{}: wrote {} file(s) to {} in {:.2f}s\n", name, files,
                         bundle.dir().string(), secs);
    }
    return 0;
  } catch (const Error& e) {
    domain_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    domain_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace mfgnet::cli
