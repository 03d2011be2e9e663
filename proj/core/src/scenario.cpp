#include "mfgnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "mfgnet/io.hpp"

namespace mfgnet {

extern const char* const kWalpoleEdges;  // generated from data/walpole.edges

Graph walpole_graph() {
  std::istringstream in(kWalpoleEdges);
  return parse_graph(in);
}

NodeTriple walpole_node11_initial() {
  NodeTriple x(11);
  for (std::size_t i = 0; i < 5; ++i) x.r[i] = 1.0;
  for (std::size_t i = 5; i < 10; ++i) x.s[i] = 1.0;
  x.z[10] = 1.0;
  return x;
}

std::size_t InfectionHistogram::total() const noexcept {
  return counts[0] + counts[1] + counts[2] + counts[3];
}

InfectionHistogram bucket_histogram(std::span<const double> infection) {
  InfectionHistogram h;
  for (std::size_t i = 0; i < infection.size(); ++i) {
    const double v = infection[i];
    if (!(v >= -1e-9 && v <= 1.0 + 1e-9)) {
      throw Error(ErrorCode::out_of_range,
                  fmt::format("infection {} at node {} is outside [0, 1]", v, i + 1));
    }
    const std::size_t b = v < 0.25 ? 0 : v < 0.5 ? 1 : v < 0.75 ? 2 : 3;
    ++h.counts[b];
  }
  return h;
}

bool stochastically_dominates(const InfectionHistogram& a, const InfectionHistogram& b) {
  bool strict = false;
  std::size_t tail_a = 0, tail_b = 0;
  for (std::size_t k = 4; k-- > 1;) {
    tail_a += a.counts[k];
    tail_b += b.counts[k];
    if (tail_a < tail_b) return false;
    strict = strict || tail_a > tail_b;
  }
  return strict;
}

std::string histogram_json(const InfectionHistogram& h) {
  nlohmann::ordered_json j;
  j["buckets"] = {"[0,0.25)", "[0.25,0.5)", "[0.5,0.75)", "[0.75,1]"};
  j["counts"] = h.counts;
  return j.dump(2) + "\n";
}

ScenarioConfig ScenarioConfig::preset(AttackKind kind) {
  ScenarioConfig c;
  c.attack = kind == AttackKind::sequential ? AttackSchedule::sequential()
                                            : AttackSchedule::low_rate();
  c.grid.adjacency_coupling = false;
  return c;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::invalid_argument, fmt::format("{} must be an object", where));
  }
  std::set<std::string> allowed(known.begin(), known.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("unknown key '{}' in {}", it.key(), where));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("{}.{} has the wrong type", where, key));
  }
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const std::string& text,
                                         const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, fmt::format("config: {}", e.what()));
  }
  reject_unknown(j, {"graph", "initial", "initial_nodes", "seed", "output",
                     "epidemic", "attack", "grid"},
                 "config");
  ScenarioConfig c;
  if (j.contains("attack") && j["attack"].contains("kind")) {
    std::string kind;
    read(j["attack"], "kind", kind, "attack");
    c = preset(attack_kind_from_string(kind));
  }
  read(j, "graph", c.graph, "config");
  if (c.graph != "walpole" && !base_dir.empty() &&
      std::filesystem::path(c.graph).is_relative()) {
    c.graph = (base_dir / c.graph).string();
  }
  read(j, "initial", c.initial, "config");
  read(j, "initial_nodes", c.initial_nodes, "config");
  read(j, "seed", c.seed, "config");
  read(j, "output", c.output, "config");
  if (j.contains("epidemic")) {
    const json& e = j["epidemic"];
    reject_unknown(e, {"beta13", "beta23", "beta31", "beta32", "horizon",
                       "steady_horizon", "dt"},
                   "epidemic");
    read(e, "beta13", c.epidemic.beta13, "epidemic");
    read(e, "beta23", c.epidemic.beta23, "epidemic");
    read(e, "beta31", c.epidemic.beta31, "epidemic");
    read(e, "beta32", c.epidemic.beta32, "epidemic");
    read(e, "horizon", c.epidemic_horizon, "epidemic");
    read(e, "steady_horizon", c.steady_horizon, "epidemic");
    read(e, "dt", c.epidemic_dt, "epidemic");
  }
  if (j.contains("attack")) {
    const json& a = j["attack"];
    reject_unknown(a, {"kind", "burst_multiplier", "burst_period", "sample_interval",
                       "k_hat", "omega_hat"},
                   "attack");
    read(a, "burst_multiplier", c.attack.burst_multiplier, "attack");
    read(a, "burst_period", c.attack.burst_period, "attack");
    read(a, "sample_interval", c.attack.sample_interval, "attack");
    read(a, "k_hat", c.attack.k_hat, "attack");
    read(a, "omega_hat", c.attack.omega_hat, "attack");
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown(g, {"omega", "M", "D", "K", "adjacency_coupling", "iterations",
                       "dt", "band"},
                   "grid");
    read(g, "omega", c.grid.omega, "grid");
    read(g, "M", c.grid.M, "grid");
    read(g, "D", c.grid.D, "grid");
    read(g, "K", c.grid.K, "grid");
    read(g, "adjacency_coupling", c.grid.adjacency_coupling, "grid");
    read(g, "iterations", c.grid_iterations, "grid");
    read(g, "dt", c.grid_dt, "grid");
    if (g.contains("band")) {
      std::array<double, 2> band{};
      read(g, "band", band, "grid");
      c.band_low = band[0];
      c.band_high = band[1];
    }
  }
  return c;
}

NodeTriple ScenarioConfig::resolve() {
  epidemic.graph = graph == "walpole" ? walpole_graph() : load_graph(graph);
  const std::size_t n = epidemic.graph.size();
  NodeTriple x0;
  if (initial == "walpole-node11") {
    if (n != 11) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("preset walpole-node11 needs 11 nodes, graph has {}", n));
    }
    x0 = walpole_node11_initial();
  } else if (initial == "nodes") {
    if (initial_nodes.size() != n) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("initial_nodes has {} entries, graph has {} nodes",
                              initial_nodes.size(), n));
    }
    x0 = NodeTriple(n);
    for (std::size_t i = 0; i < n; ++i) {
      x0.s[i] = initial_nodes[i][0];
      x0.z[i] = initial_nodes[i][1];
      x0.r[i] = initial_nodes[i][2];
    }
  } else {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("unknown initial condition '{}' (walpole-node11 | nodes)",
                            initial));
  }
  x0.validate();
  epidemic.validate();
  attack.base13 = epidemic.beta13;
  attack.base23 = epidemic.beta23;
  attack.validate();
  grid.n = n;
  grid.graph = epidemic.graph;
  grid.validate();
  if (!(epidemic_horizon > 0.0) || !(steady_horizon >= epidemic_horizon) ||
      !(epidemic_dt > 0.0) || !(grid_dt > 0.0) || grid_iterations < 0 ||
      !(band_low < band_high)) {
    throw Error(ErrorCode::invalid_argument,
                "need 0 < horizon <= steady_horizon, dt > 0, iterations >= 0 and "
                "a non-empty band");
  }
  return x0;
}

namespace {

class BundleWriter {
 public:
  explicit BundleWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, const std::string& content) {
    write_text_file((dir_ / name).string(), content);
    entries_.push_back({name, sha256_hex(content), content.size()});
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

  void manifest(const nlohmann::ordered_json& extra, bool partial,
                const std::string& error) {
    nlohmann::ordered_json m;
    m["partial"] = partial;
    if (!error.empty()) m["error"] = error;
    m["files"] = nlohmann::ordered_json::array();
    for (const auto& e : entries_) {
      m["files"].push_back({{"name", e.name}, {"sha256", e.sha}, {"bytes", e.bytes}});
    }
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    write_text_file((dir_ / "manifest.json").string(), m.dump(2) + "\n");
  }

 private:
  struct Entry {
    std::string name;
    std::string sha;
    std::size_t bytes;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

std::size_t index_at(const std::vector<double>& times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9);
  return it == times.end() ? times.size() - 1
                           : static_cast<std::size_t>(it - times.begin());
}

}  // namespace

ScenarioReport run_scenario(ScenarioConfig cfg) {
  const NodeTriple x0 = cfg.resolve();
  BundleWriter bundle(cfg.output);
  ScenarioReport report;
  nlohmann::ordered_json flags;
  flags["seed"] = cfg.seed;
  flags["attack"] = std::string(to_string(cfg.attack.kind));
  try {
    const EpidemicRun run = simulate_epidemic(x0, cfg.epidemic, cfg.attack,
                                              cfg.steady_horizon, cfg.epidemic_dt);
    const auto& times = run.trajectory.times;
    const std::size_t k_mid = index_at(times, 0.5 * cfg.epidemic_horizon);
    const std::size_t k_end = index_at(times, cfg.epidemic_horizon);
    report.mid = bucket_histogram(run.trajectory.states[k_mid].z);
    report.final = bucket_histogram(run.trajectory.states[k_end].z);
    report.steady_infection = run.steady_infection;
    report.staleness = run.staleness;
    report.steady = run.steady;

    std::ostringstream csv;
    const auto stride = static_cast<std::size_t>(
        std::max(1.0, std::round(0.1 / cfg.epidemic_dt)));
    write_network_csv(run.trajectory, csv, stride);
    bundle.add("epidemic_trajectory.csv", csv.str());
    std::ostringstream steady;
    write_infection_json(run.steady_infection, steady);
    bundle.add("infection_steady_state.json", steady.str());
    bundle.add("histogram_mid.json", histogram_json(report.mid));
    bundle.add("histogram_final.json", histogram_json(report.final));
    flags["epidemic_steady"] = run.steady;
    flags["staleness"] = round_sig12(run.staleness);
    flags["snapshot_times"] = {round_sig12(times[k_mid]), round_sig12(times[k_end])};

    const FrequencyTrace trace =
        simulate_grid(run.steady_infection, cfg.grid, cfg.attack, cfg.grid_iterations,
                      cfg.grid_dt, cfg.seed);
    report.excursions = frequency_excursion_stats(trace, cfg.band_low, cfg.band_high);
    report.band_exceeded = trace.band_exceeded;
    std::ostringstream freq;
    write_frequency_csv(trace, freq);
    bundle.add("frequency.csv", freq.str());
    std::ostringstream stats;
    write_excursion_json(report.excursions, cfg.band_low, cfg.band_high, stats);
    bundle.add("excursion_stats.json", stats.str());
    flags["band_exceeded"] = trace.band_exceeded;
  } catch (const Error& e) {
    bundle.manifest(flags, true, e.what());
    throw;
  }
  bundle.manifest(flags, false, "");
  report.files = bundle.names();
  report.files.push_back("manifest.json");
  return report;
}

}  // namespace mfgnet
