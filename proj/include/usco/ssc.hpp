#pragma once

// Stochastic maximum coverage over a bipartite graph whose edges appear
// independently. Configurations are present-edge subsets; the oracle is the
// (1 - 1/e) greedy algorithm on the weighted coverage objective.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "usco/core.hpp"

namespace usco::ssc {

inline constexpr double kGreedyAlpha = 1.0 - 0.36787944117144233;  // 1 - 1/e

struct CoverEdge {
  int left = 0;
  int right = 0;
  bool operator==(const CoverEdge&) const = default;
};

class CoverGraph {
 public:
  struct Link {
    int right;
    int edge;
  };

  CoverGraph() = default;
  CoverGraph(int left_count, int right_count, std::vector<CoverEdge> edges);

  int left_count() const noexcept { return left_count_; }
  int right_count() const noexcept { return right_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<CoverEdge>& edges() const noexcept { return edges_; }
  /// Edges of left node v sorted by right id.
  std::span<const Link> links(int v) const;

  bool operator==(const CoverGraph& other) const {
    return left_count_ == other.left_count_ && right_count_ == other.right_count_ &&
           edges_ == other.edges_;
  }

 private:
  int left_count_ = 0;
  int right_count_ = 0;
  std::vector<CoverEdge> edges_;
  std::vector<int> offsets_;
  std::vector<Link> links_;
};

struct EdgeProbLaw {
  std::vector<double> p;  // one per edge, in (0, 1)
  bool operator==(const EdgeProbLaw&) const = default;
};

/// Present-edge subset of E as a bitset.
struct SscConfig {
  std::vector<std::uint64_t> bits;

  bool has(std::size_t e) const { return (bits[e >> 6] >> (e & 63)) & 1U; }
  void set(std::size_t e) { bits[e >> 6] |= std::uint64_t{1} << (e & 63); }
  bool operator==(const SscConfig&) const = default;
};

struct SscInput {
  std::vector<int> targets;  // R*, sorted and unique
  int budget = 1;            // k
  bool operator==(const SscInput&) const = default;
};

struct SscSolution {
  std::vector<int> nodes;  // sorted left ids
  bool operator==(const SscSolution&) const = default;
};

enum class SscDist { Uni, True };

void validate_law(const CoverGraph& graph, const EdgeProbLaw& law, bool open_interval = true);
void validate_input(const CoverGraph& graph, const SscInput& x);
void validate_solution(const CoverGraph& graph, const SscInput& x, const SscSolution& y);

/// |union of N_c(v) for v in y, intersected with R*|.
int coverage_value(const CoverGraph& graph, const SscConfig& config, const SscInput& x,
                   const SscSolution& y);

/// Configurations with nonzero weight folded into per-edge bitsets over those
/// configurations, so a marginal gain is a masked weight sum per edge.
struct CoverageScorer {
  std::vector<double> active_weights;
  std::size_t words = 0;
  std::vector<std::uint64_t> presence;  // edge-major, `words` per edge
};

CoverageScorer make_coverage_scorer(const CoverGraph& graph,
                                    std::span<const Configuration<SscConfig>> configs,
                                    std::span<const double> weights);

/// Lazy greedy; output-identical to `greedy_plain`.
SscSolution greedy_oracle(const CoverGraph& graph, const CoverageScorer& scorer, const SscInput& x);
/// Textbook greedy: every round rescans all left nodes.
SscSolution greedy_plain(const CoverGraph& graph, const CoverageScorer& scorer, const SscInput& x);

/// Weighted objective sum_i w_i * coverage(c_i) along the greedy chain; entry
/// t is the value after t additions, in the order greedy picked the nodes.
std::vector<double> greedy_trace(const CoverGraph& graph, const CoverageScorer& scorer,
                                 const SscInput& x);

double expected_coverage(const CoverGraph& graph, const SscInput& x, const SscSolution& y,
                         const EdgeProbLaw& law);

/// Greedy directly on the exact expected coverage (used to label pairs).
SscSolution greedy_expected(const CoverGraph& graph, const SscInput& x, const EdgeProbLaw& law);

SscConfig sample_ssc_config(const CoverGraph& graph, SscDist dist, const EdgeProbLaw* law,
                            std::uint64_t rng_seed);

/// Uniform k-subset of L.
SscSolution rand_baseline(const CoverGraph& graph, const SscInput& x, std::uint64_t rng_seed);

/// Random bipartite graph: each left node links to a uniform number in
/// [min_degree, max_degree] of distinct right nodes.
CoverGraph desk_cover_graph(std::uint64_t seed, int left = 200, int right = 500,
                            int min_degree = 2, int max_degree = 14);

class SscProblem {
 public:
  using Input = SscInput;
  using Solution = SscSolution;
  using Payload = SscConfig;
  using Scorer = CoverageScorer;

  explicit SscProblem(CoverGraph graph) : graph_(std::move(graph)) {}

  Sense sense() const noexcept { return Sense::Maximize; }
  double alpha() const noexcept { return kGreedyAlpha; }
  const CoverGraph& graph() const noexcept { return graph_; }

  double objective(const Input& x, const Solution& y, const Payload& c) const {
    return coverage_value(graph_, c, x, y);
  }
  std::vector<double> batch_objective(const Input& x, const Solution& y,
                                      std::span<const Configuration<Payload>> configs) const;
  void check_feasible(const Input& x, const Solution& y) const {
    validate_solution(graph_, x, y);
  }
  Scorer make_scorer(std::span<const Configuration<Payload>> configs,
                     std::span<const double> weights) const {
    return make_coverage_scorer(graph_, configs, weights);
  }
  Solution solve(const Input& x, const Scorer& scorer) const {
    return greedy_oracle(graph_, scorer, x);
  }

  static std::string encode(const Solution& y);
  static std::string encode_input(const Input& x);

 private:
  CoverGraph graph_;
};

}  // namespace usco::ssc
