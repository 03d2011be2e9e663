#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mfgnet/attack.hpp"
#include "mfgnet/epidemic.hpp"
#include "mfgnet/grid.hpp"

namespace mfgnet {

/// The bundled 11-bus Walpole graph.
Graph walpole_graph();
/// Node 11 infected, nodes 1-5 at (s,z,r) = (0,0,1), nodes 6-10 at (1,0,0).
NodeTriple walpole_node11_initial();

/// Node counts in [0, .25), [.25, .5), [.5, .75), [.75, 1].
struct InfectionHistogram {
  std::array<std::size_t, 4> counts{};

  std::size_t total() const noexcept;
  /// Nodes at or above 0.25.
  std::size_t infected() const noexcept { return total() - counts[0]; }
  friend bool operator==(const InfectionHistogram&, const InfectionHistogram&) = default;
};

/// Throws Error(out_of_range) for a value outside [0, 1] by more than 1e-9.
InfectionHistogram bucket_histogram(std::span<const double> infection);

/// First-order stochastic dominance: at every bucket threshold `a` has at
/// least as many nodes at or above it as `b`, and strictly more at one.
bool stochastically_dominates(const InfectionHistogram& a, const InfectionHistogram& b);

struct ScenarioConfig {
  std::string graph = "walpole";  // "walpole" or an edge-list path
  std::string initial = "walpole-node11";
  std::vector<std::array<double, 3>> initial_nodes;  // (s, z, r), when initial == "nodes"
  EpidemicParams epidemic;                            // graph filled by load
  double epidemic_horizon = 40.0;   // histogram snapshots at T/2 and T
  double steady_horizon = 200.0;    // integration length for the steady state
  double epidemic_dt = 1e-2;
  AttackSchedule attack;            // base rates follow the epidemic rates
  OscillatorParams grid;
  std::int64_t grid_iterations = 1500;
  double grid_dt = 1e-2;
  double band_low = 49.5;
  double band_high = 50.5;
  std::uint64_t seed = 42;
  std::string output = "scenario-out";

  /// Preset for a schedule kind on the bundled graph.
  static ScenarioConfig preset(AttackKind kind);

  /// Reads JSON; relative graph paths resolve against `base_dir`. Throws
  /// Error(invalid_argument) on unknown keys or bad values.
  static ScenarioConfig from_json(const std::string& text,
                                  const std::filesystem::path& base_dir = {});

  /// Loads the graph, builds the initial state and syncs derived fields.
  /// Returns the initial state.
  NodeTriple resolve();
};

struct ScenarioReport {
  InfectionHistogram mid;
  InfectionHistogram final;
  std::vector<double> steady_infection;
  double staleness = 0.0;
  bool steady = false;
  ExcursionStats excursions;
  bool band_exceeded = false;
  std::vector<std::string> files;  // relative to the output directory
};

/// Epidemic to steady state, histograms at T/2 and T, grid driven by the
/// steady infection, excursion statistics. Writes epidemic_trajectory.csv,
/// infection_steady_state.json, histogram_mid.json, histogram_final.json,
/// frequency.csv, excursion_stats.json and manifest.json (with SHA-256 of
/// each file). A failing stage still writes a manifest flagged partial.
ScenarioReport run_scenario(ScenarioConfig cfg);

/// {"buckets": ["[0,0.25)", ...], "counts": [...]}
std::string histogram_json(const InfectionHistogram& h);

}  // namespace mfgnet
