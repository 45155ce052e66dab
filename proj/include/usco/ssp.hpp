#pragma once

// Stochastic shortest path: weighted-graph configurations over a fixed graph,
// per-edge Weibull ground truth, and a Dijkstra oracle on summed weights.

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "usco/core.hpp"

namespace usco::ssp {

struct Edge {
  int u = 0;
  int v = 0;
  bool operator==(const Edge&) const = default;
};

/// Fixed graph structure with CSR adjacency. Undirected graphs expose every
/// edge as two arcs carrying the same edge index.
class Graph {
 public:
  struct Arc {
    int to;
    int edge;
  };

  Graph() = default;
  /// Validates ids, self-loops and duplicates.
  Graph(int node_count, std::vector<Edge> edges, bool directed);

  int node_count() const noexcept { return node_count_; }
  bool directed() const noexcept { return directed_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Outgoing arcs of u sorted by target id.
  std::span<const Arc> out_arcs(int u) const;
  std::span<const Arc> in_arcs(int v) const;
  std::optional<int> find_edge(int u, int v) const;

  bool operator==(const Graph& other) const {
    return node_count_ == other.node_count_ && directed_ == other.directed_ &&
           edges_ == other.edges_;
  }

 private:
  int node_count_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<int> out_offsets_, in_offsets_;
  std::vector<Arc> out_arcs_, in_arcs_;
};

/// Per-edge Weibull parameters; mean of edge e is scale[e] * Gamma(1 + 1/shape[e]).
struct WeibullEdgeLaw {
  std::vector<int> shape;
  std::vector<int> scale;
  bool operator==(const WeibullEdgeLaw&) const = default;
};

struct SspConfig {
  std::vector<double> weights;  // one per edge, > 0
  bool operator==(const SspConfig&) const = default;
};

struct SspInput {
  int source = 0;
  int target = 0;
  bool operator==(const SspInput&) const = default;
};

struct SspPath {
  std::vector<int> nodes;
  bool operator==(const SspPath&) const = default;
  auto operator<=>(const SspPath&) const = default;
};

enum class SspDist { Exp, Norm, True };

void validate_law(const Graph& graph, const WeibullEdgeLaw& law);
void validate_config(const Graph& graph, const SspConfig& config);
void validate_input(const Graph& graph, const SspInput& x);

/// Edge indices along the path; throws a feasibility error naming the
/// violated constraint when the path is not a simple u->v path in the graph.
std::vector<int> path_edges(const Graph& graph, const SspInput& x, const SspPath& path);

double path_length(std::span<const int> edges, std::span<const double> edge_weights);

/// weight(e) = sum_i w_i * c_i(e).
std::vector<double> aggregate_edge_weights(std::span<const Configuration<SspConfig>> configs,
                                           std::span<const double> weights,
                                           std::size_t edge_count);

/// Minimum-weight u->v path. Among equal-weight paths the one with fewest
/// edges wins, then the lexicographically smallest node sequence.
SspPath dijkstra_oracle(const Graph& graph, std::span<const double> edge_weights,
                        const SspInput& x);

SspConfig sample_ssp_config(const Graph& graph, SspDist dist, const WeibullEdgeLaw* law,
                            std::uint64_t rng_seed);

std::vector<double> expected_edge_weights(const WeibullEdgeLaw& law);
double expected_path_length(const Graph& graph, const SspPath& path, const WeibullEdgeLaw& law);

struct DimacsGraph {
  Graph graph;
  std::vector<std::int64_t> weights;  // arc weights from the file, one per edge
};

/// Reads the DIMACS shortest-path format ("c", "p sp n m", "a u v w").
/// Parallel arcs are merged keeping the smallest weight; self-loops are dropped.
DimacsGraph parse_dimacs(std::istream& in);

/// Dijkstra on uniform [0,1] random edge weights.
SspPath base_baseline(const Graph& graph, const SspInput& x, std::uint64_t rng_seed);

/// 64-node stochastic-Kronecker graph with ~160 undirected edges, connected.
Graph desk_graph(std::uint64_t seed, int levels = 6, std::size_t target_edges = 160);

class SspProblem {
 public:
  using Input = SspInput;
  using Solution = SspPath;
  using Payload = SspConfig;
  using Scorer = std::vector<double>;

  explicit SspProblem(Graph graph) : graph_(std::move(graph)) {}

  Sense sense() const noexcept { return Sense::Minimize; }
  double alpha() const noexcept { return 1.0; }
  const Graph& graph() const noexcept { return graph_; }

  double objective(const Input& x, const Solution& y, const Payload& c) const;
  /// f(x, y, c_i) for every configuration; y must already be feasible.
  std::vector<double> batch_objective(const Input& x, const Solution& y,
                                      std::span<const Configuration<Payload>> configs) const;
  void check_feasible(const Input& x, const Solution& y) const;
  Scorer make_scorer(std::span<const Configuration<Payload>> configs,
                     std::span<const double> weights) const;
  Solution solve(const Input& x, const Scorer& edge_weights) const;

  static std::string encode(const Solution& y);
  static std::string encode_input(const Input& x);

 private:
  Graph graph_;
};

}  // namespace usco::ssp
