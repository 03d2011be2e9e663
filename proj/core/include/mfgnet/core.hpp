#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mfgnet/error.hpp"

namespace mfgnet {

/// The three states of the chain. States `a` and `b` are the two committed
/// options, `uncommitted` is state 3; only the arcs a<->uncommitted and
/// b<->uncommitted carry rates.
enum class Opinion : std::uint8_t { a = 0, b = 1, uncommitted = 2 };

inline constexpr std::array<Opinion, 3> kOpinions{Opinion::a, Opinion::b,
                                                  Opinion::uncommitted};

constexpr std::size_t idx(Opinion s) noexcept {
  return static_cast<std::size_t>(s);
}

/// 1-based state number as used in configs and the CLI.
Opinion opinion_from_number(int number);

/// True when i->j is an arc of the three-state chain (no a<->b transitions).
constexpr bool is_chain_arc(Opinion from, Opinion to) noexcept {
  return from != to &&
         (from == Opinion::uncommitted || to == Opinion::uncommitted);
}

inline constexpr double kSimplexBuildTolerance = 1e-9;
inline constexpr double kNegativeTolerance = 1e-12;

/// Population distribution over the three states.
class SimplexState {
 public:
  SimplexState() : x_{1.0 / 3, 1.0 / 3, 1.0 / 3} {}

  double operator[](Opinion s) const noexcept { return x_[idx(s)]; }
  double operator[](std::size_t i) const noexcept { return x_[i]; }
  double x1() const noexcept { return x_[0]; }
  double x2() const noexcept { return x_[1]; }
  double x3() const noexcept { return x_[2]; }
  const std::array<double, 3>& values() const noexcept { return x_; }

  /// Clamps to [0,1] and renormalizes without tolerance checks. Integrators
  /// call this after they have verified the drift is within their own bound.
  static SimplexState project(double x1, double x2, double x3) noexcept;

  friend bool operator==(const SimplexState&, const SimplexState&) = default;

 private:
  explicit SimplexState(std::array<double, 3> x) : x_(x) {}
  std::array<double, 3> x_;
};

/// Throws Error(not_a_simplex) when |sum-1| > 1e-9 or any component is below
/// -1e-12.
SimplexState make_simplex(double x1, double x2, double x3);

/// Value function v = (v1, v2, v3).
struct ValueVector {
  std::array<double, 3> v{0.0, 0.0, 0.0};

  double& operator[](Opinion s) noexcept { return v[idx(s)]; }
  double operator[](Opinion s) const noexcept { return v[idx(s)]; }
  double& operator[](std::size_t i) noexcept { return v[i]; }
  double operator[](std::size_t i) const noexcept { return v[i]; }

  friend bool operator==(const ValueVector&, const ValueVector&) = default;
};

/// Transition rates of the chain. Entries a<->b are identically zero.
class RateMatrix {
 public:
  RateMatrix() = default;
  /// Throws Error(invalid_argument) on negative or non-finite rates.
  RateMatrix(double b13, double b31, double b23, double b32);

  /// Rate from -> to; zero on the diagonal and for a<->b.
  double operator()(Opinion from, Opinion to) const noexcept;

  double b13() const noexcept { return b13_; }
  double b31() const noexcept { return b31_; }
  double b23() const noexcept { return b23_; }
  double b32() const noexcept { return b32_; }

  /// Total exit rate from a state.
  double exit_rate(Opinion from) const noexcept;

 private:
  double b13_ = 0.0;
  double b31_ = 0.0;
  double b23_ = 0.0;
  double b32_ = 0.0;
};

using Congestion = std::function<double(double)>;

/// f(x) = slope * x; slope > 0 is crowd-averse, slope < 0 crowd-seeking.
Congestion linear_congestion(double slope);

/// Diagonal control costs R_i and disturbance costs Gamma_i, stored as
/// R[i][j] = cost weight of the rate i -> j, plus the congestion terms f_i.
struct CostWeights {
  std::array<std::array<double, 3>, 3> R{};
  std::array<std::array<double, 3>, 3> Gamma{};
  std::array<Congestion, 3> f;

  double r(Opinion from, Opinion to) const noexcept {
    return R[idx(from)][idx(to)];
  }
  double gamma(Opinion from, Opinion to) const noexcept {
    return Gamma[idx(from)][idx(to)];
  }
  double congestion(Opinion s, double mass) const { return f[idx(s)](mass); }

  /// Unit weights on the chain arcs, 1e6 on a<->b and on the diagonal,
  /// linear congestion with the given slopes.
  static CostWeights with_slopes(std::array<double, 3> slopes);

  /// Throws Error(invalid_argument) if any weight is non-positive or a
  /// congestion function is missing.
  void validate() const;
};

inline constexpr double kLargeCost = 1e6;

/// Dense weighted adjacency matrix. Strong connectivity is computed at
/// construction and cached.
class Graph {
 public:
  Graph() = default;
  /// Row-major n*n weights. Throws Error(invalid_argument) on self-loops,
  /// negative or non-finite weights, or a size mismatch.
  Graph(std::size_t n, std::vector<double> adjacency);

  struct Edge {
    std::size_t from;  // 0-based
    std::size_t to;
    double weight;
  };
  /// Undirected: each edge is mirrored.
  static Graph undirected(std::size_t n, std::span<const Edge> edges);
  static Graph complete(std::size_t n, double weight = 1.0);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return a_[i * n_ + j];
  }
  bool is_strongly_connected() const noexcept { return strongly_connected_; }
  bool is_symmetric() const noexcept;

  /// Weighted out-degree (A * 1)_i.
  double degree(std::size_t i) const noexcept;
  std::vector<double> degrees() const;

  /// out = A * x.
  void multiply(std::span<const double> x, std::span<double> out) const;

  const std::vector<double>& adjacency() const noexcept { return a_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
  bool strongly_connected_ = false;
};

bool strongly_connected(const Graph& g);

/// Edge-list text format: `i j w` per line, 1-based ids, '#' comments,
/// undirected edges listed once.
Graph parse_graph(std::istream& in);
Graph load_graph(const std::string& path);

}  // namespace mfgnet
