#include "mfgnet/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <queue>
#include <sstream>

#include <fmt/core.h>

namespace mfgnet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::not_a_simplex: return "NotASimplex";
    case ErrorCode::step_too_large: return "StepTooLarge";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::degenerate: return "Degenerate";
    case ErrorCode::no_real_equilibrium: return "NoRealEquilibrium";
    case ErrorCode::not_an_equilibrium: return "NotAnEquilibrium";
    case ErrorCode::no_root: return "NoRoot";
    case ErrorCode::degenerate_mapping: return "DegenerateMapping";
    case ErrorCode::hypothesis_violated: return "HypothesisViolated";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io: return "IoError";
  }
  return "Unknown";
}

Opinion opinion_from_number(int number) {
  if (number < 1 || number > 3) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("state must be 1, 2 or 3 (got {})", number));
  }
  return static_cast<Opinion>(number - 1);
}

SimplexState SimplexState::project(double x1, double x2, double x3) noexcept {
  std::array<double, 3> x{std::clamp(x1, 0.0, 1.0), std::clamp(x2, 0.0, 1.0),
                          std::clamp(x3, 0.0, 1.0)};
  const double sum = x[0] + x[1] + x[2];
  if (sum > 0.0 && sum != 1.0) {
    for (double& c : x) c /= sum;
  }
  // Put the rounding residue on the largest component so the sum is 1 to
  // the last bit whenever that is representable.
  auto largest = std::max_element(x.begin(), x.end());
  double rest = 0.0;
  for (auto it = x.begin(); it != x.end(); ++it) {
    if (it != largest) rest += *it;
  }
  *largest = 1.0 - rest;
  return SimplexState(x);
}

SimplexState make_simplex(double x1, double x2, double x3) {
  const double sum = x1 + x2 + x3;
  if (!std::isfinite(sum) || std::abs(sum - 1.0) > kSimplexBuildTolerance ||
      x1 < -kNegativeTolerance || x2 < -kNegativeTolerance ||
      x3 < -kNegativeTolerance) {
    throw Error(ErrorCode::not_a_simplex,
                fmt::format("({}, {}, {}) is not a probability vector", x1, x2,
                            x3));
  }
  return SimplexState::project(x1, x2, x3);
}

RateMatrix::RateMatrix(double b13, double b31, double b23, double b32)
    : b13_(b13), b31_(b31), b23_(b23), b32_(b32) {
  for (double b : {b13, b31, b23, b32}) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("transition rate {} must be finite and >= 0", b));
    }
  }
}

double RateMatrix::operator()(Opinion from, Opinion to) const noexcept {
  if (from == Opinion::a && to == Opinion::uncommitted) return b13_;
  if (from == Opinion::uncommitted && to == Opinion::a) return b31_;
  if (from == Opinion::b && to == Opinion::uncommitted) return b23_;
  if (from == Opinion::uncommitted && to == Opinion::b) return b32_;
  return 0.0;
}

double RateMatrix::exit_rate(Opinion from) const noexcept {
  switch (from) {
    case Opinion::a: return b13_;
    case Opinion::b: return b23_;
    case Opinion::uncommitted: return b31_ + b32_;
  }
  return 0.0;
}

Congestion linear_congestion(double slope) {
  return [slope](double mass) { return slope * mass; };
}

CostWeights CostWeights::with_slopes(std::array<double, 3> slopes) {
  CostWeights w;
  for (Opinion i : kOpinions) {
    for (Opinion j : kOpinions) {
      const double c = is_chain_arc(i, j) ? 1.0 : kLargeCost;
      w.R[idx(i)][idx(j)] = c;
      w.Gamma[idx(i)][idx(j)] = c;
    }
    w.f[idx(i)] = linear_congestion(slopes[idx(i)]);
  }
  return w;
}

void CostWeights::validate() const {
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (!(R[i][j] > 0.0) || !(Gamma[i][j] > 0.0) ||
          !std::isfinite(R[i][j]) || !std::isfinite(Gamma[i][j])) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("cost weights R[{0}][{1}]={2}, Gamma[{0}][{1}]={3} "
                                "must be positive and finite",
                                i + 1, j + 1, R[i][j], Gamma[i][j]));
      }
    }
    if (!f[i]) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("congestion function f{} is missing", i + 1));
    }
  }
}

namespace {

bool reaches_all(std::size_t n, const std::vector<double>& a, bool transpose) {
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      const double w = transpose ? a[v * n + u] : a[u * n + v];
      if (w > 0.0 && !seen[v]) {
        seen[v] = 1;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count == n;
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<double> adjacency)
    : n_(n), a_(std::move(adjacency)) {
  if (a_.size() != n_ * n_) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("adjacency has {} entries, expected {}", a_.size(),
                            n_ * n_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const double w = a_[i * n_ + j];
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("edge weight a[{}][{}]={} must be >= 0", i + 1,
                                j + 1, w));
      }
      if (i == j && w != 0.0) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("self-loop at node {}", i + 1));
      }
    }
  }
  strongly_connected_ =
      n_ > 0 && reaches_all(n_, a_, false) && reaches_all(n_, a_, true);
}

Graph Graph::undirected(std::size_t n, std::span<const Edge> edges) {
  std::vector<double> a(n * n, 0.0);
  for (const Edge& e : edges) {
    if (e.from >= n || e.to >= n) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("edge {}-{} outside a {}-node graph", e.from + 1,
                              e.to + 1, n));
    }
    a[e.from * n + e.to] = e.weight;
    a[e.to * n + e.from] = e.weight;
  }
  return Graph(n, std::move(a));
}

Graph Graph::complete(std::size_t n, double weight) {
  std::vector<double> a(n * n, weight);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 0.0;
  return Graph(n, std::move(a));
}

bool Graph::is_symmetric() const noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (a_[i * n_ + j] != a_[j * n_ + i]) return false;
    }
  }
  return true;
}

double Graph::degree(std::size_t i) const noexcept {
  double d = 0.0;
  for (std::size_t j = 0; j < n_; ++j) d += a_[i * n_ + j];
  return d;
}

std::vector<double> Graph::degrees() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = degree(i);
  return d;
}

void Graph::multiply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    const double* row = a_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
}

bool strongly_connected(const Graph& g) { return g.is_strongly_connected(); }

Graph parse_graph(std::istream& in) {
  std::vector<Graph::Edge> edges;
  std::size_t n = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long i = 0;
    long long j = 0;
    double w = 0.0;
    if (!(fields >> i >> j >> w) || i < 1 || j < 1) {
      throw Error(ErrorCode::io,
                  fmt::format("graph line {}: expected `i j w` with 1-based ids",
                              line_no));
    }
    if (i == j) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("graph line {}: self-loop at node {}", line_no, i));
    }
    edges.push_back({static_cast<std::size_t>(i - 1),
                     static_cast<std::size_t>(j - 1), w});
    n = std::max({n, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  }
  return Graph::undirected(n, edges);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, fmt::format("cannot open graph file {}", path));
  }
  return parse_graph(in);
}

}  // namespace mfgnet
