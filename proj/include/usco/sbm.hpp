#pragma once

// Stochastic minimum-weight bipartite matching on a complete n x n bipartite
// graph with Gaussian edge costs. The oracle is the Hungarian algorithm.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "usco/core.hpp"

namespace usco::sbm {

inline constexpr double kSigmaRatio = 0.3;
inline constexpr double kWeightFloor = 1e-6;

/// Complete bipartite graph; edge (l, r) has cost ~ N(mu, (0.3 mu)^2).
struct MatchGraph {
  int n = 0;
  std::vector<double> mu;  // row-major n x n, entries in [1, 10]

  double mean(int l, int r) const { return mu[static_cast<std::size_t>(l) * n + r]; }
  double sigma(int l, int r) const { return kSigmaRatio * mean(l, r); }
  bool operator==(const MatchGraph&) const = default;
};

struct SbmConfig {
  std::vector<double> cost;  // row-major n x n, > 0
  bool operator==(const SbmConfig&) const = default;
};

struct SbmInput {
  std::vector<int> left;   // L*, sorted and unique
  std::vector<int> right;  // R*, sorted and unique, same size as L*
  bool operator==(const SbmInput&) const = default;
};

/// right_of[a] is the R node matched to x.left[a].
struct SbmMatching {
  std::vector<int> right_of;
  bool operator==(const SbmMatching&) const = default;
};

struct SbmDist {
  enum Kind { Uni, Q, True } kind = Uni;
  double q = 0.0;  // interval half-width factor for Kind::Q
};

void validate_graph(const MatchGraph& graph);
void validate_input(const MatchGraph& graph, const SbmInput& x);
void validate_matching(const MatchGraph& graph, const SbmInput& x, const SbmMatching& y);

/// Dense row-major square cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Minimum-cost perfect assignment (column per row). Among optimal
/// assignments the lexicographically smallest column vector is returned.
std::vector<int> min_cost_assignment(const CostMatrix& costs);

/// Oracle on the |L*| x |R*| cost matrix of input x.
SbmMatching hungarian_oracle(const CostMatrix& costs, const SbmInput& x);

double matching_cost(const CostMatrix& full_costs, int n, const SbmInput& x, const SbmMatching& y);

SbmConfig sample_sbm_config(const MatchGraph& graph, SbmDist dist, std::uint64_t rng_seed);

double expected_matching_cost(const MatchGraph& graph, const SbmInput& x, const SbmMatching& y);

/// Uniform random bijection L* -> R*.
SbmMatching rand_baseline(const SbmInput& x, std::uint64_t rng_seed);

class SbmProblem {
 public:
  using Input = SbmInput;
  using Solution = SbmMatching;
  using Payload = SbmConfig;
  using Scorer = CostMatrix;  // full n x n summed costs

  explicit SbmProblem(int n) : n_(n) {}

  Sense sense() const noexcept { return Sense::Minimize; }
  double alpha() const noexcept { return 1.0; }
  int size() const noexcept { return n_; }

  double objective(const Input& x, const Solution& y, const Payload& c) const;
  std::vector<double> batch_objective(const Input& x, const Solution& y,
                                      std::span<const Configuration<Payload>> configs) const;
  void check_feasible(const Input& x, const Solution& y) const;
  Scorer make_scorer(std::span<const Configuration<Payload>> configs,
                     std::span<const double> weights) const;
  Solution solve(const Input& x, const Scorer& costs) const;

  static std::string encode(const Solution& y);
  static std::string encode_input(const Input& x);

 private:
  int n_;
};

}  // namespace usco::sbm
