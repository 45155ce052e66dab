#include "usco/ssc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>

#include "usco/rng.hpp"

namespace usco::ssc {

CoverGraph::CoverGraph(int left_count, int right_count, std::vector<CoverEdge> edges)
    : left_count_(left_count), right_count_(right_count), edges_(std::move(edges)) {
  require(left_count_ >= 1 && right_count_ >= 1, ErrorKind::Domain,
          "cover graph: both sides need at least one node");
  std::vector<std::pair<int, Link>> tagged;
  tagged.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [l, r] = edges_[e];
    require(l >= 0 && l < left_count_ && r >= 0 && r < right_count_, ErrorKind::Domain,
            "cover graph: edge " + std::to_string(e) + " has a node id out of range");
    tagged.push_back({l, Link{r, static_cast<int>(e)}});
  }
  std::sort(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.right < b.second.right;
  });
  for (std::size_t i = 1; i < tagged.size(); ++i)
    require(tagged[i].first != tagged[i - 1].first ||
                tagged[i].second.right != tagged[i - 1].second.right,
            ErrorKind::Domain, "cover graph: duplicate edge");
  offsets_.assign(static_cast<std::size_t>(left_count_) + 1, 0);
  links_.reserve(tagged.size());
  for (const auto& [l, link] : tagged) {
    ++offsets_[static_cast<std::size_t>(l) + 1];
    links_.push_back(link);
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

std::span<const CoverGraph::Link> CoverGraph::links(int v) const {
  return {links_.data() + offsets_[v], links_.data() + offsets_[v + 1]};
}

void validate_law(const CoverGraph& graph, const EdgeProbLaw& law, bool open_interval) {
  require(law.p.size() == graph.edge_count(), ErrorKind::Dimension,
          "edge probability law: one probability per edge required");
  for (std::size_t e = 0; e < law.p.size(); ++e) {
    const double p = law.p[e];
    const bool ok = open_interval ? (p > 0.0 && p < 1.0) : (p >= 0.0 && p <= 1.0);
    require(ok, ErrorKind::Domain,
            "edge probability law: p of edge " + std::to_string(e) + " out of range");
  }
}

void validate_input(const CoverGraph& graph, const SscInput& x) {
  require(!x.targets.empty(), ErrorKind::Domain, "ssc input: empty target set");
  for (std::size_t i = 0; i < x.targets.size(); ++i) {
    require(x.targets[i] >= 0 && x.targets[i] < graph.right_count(), ErrorKind::Domain,
            "ssc input: target id out of range");
    require(i == 0 || x.targets[i - 1] < x.targets[i], ErrorKind::Domain,
            "ssc input: targets must be sorted and unique");
  }
  require(x.budget >= 1 && x.budget <= graph.left_count(), ErrorKind::Domain,
          "ssc input: budget must lie in [1, |L|]");
}

void validate_solution(const CoverGraph& graph, const SscInput& x, const SscSolution& y) {
  validate_input(graph, x);
  require(y.nodes.size() <= static_cast<std::size_t>(x.budget), ErrorKind::Feasibility,
          "ssc solution: more than k nodes");
  for (std::size_t i = 0; i < y.nodes.size(); ++i) {
    require(y.nodes[i] >= 0 && y.nodes[i] < graph.left_count(), ErrorKind::Feasibility,
            "ssc solution: node id out of range");
    require(i == 0 || y.nodes[i - 1] < y.nodes[i], ErrorKind::Feasibility,
            "ssc solution: nodes must be sorted and unique");
  }
}

namespace {

std::vector<int> target_slots(const CoverGraph& graph, const SscInput& x) {
  std::vector<int> slot(static_cast<std::size_t>(graph.right_count()), -1);
  for (std::size_t i = 0; i < x.targets.size(); ++i) slot[x.targets[i]] = static_cast<int>(i);
  return slot;
}

class GreedyState {
 public:
  GreedyState(const CoverGraph& graph, const CoverageScorer& scorer, const SscInput& x)
      : graph_(graph), scorer_(scorer), slot_(target_slots(graph, x)),
        covered_(x.targets.size() * scorer.words, 0) {}

  double gain(int v) const {
    double total = 0.0;
    const std::size_t words = scorer_.words;
    for (const auto& link : graph_.links(v)) {
      const int s = slot_[link.right];
      if (s < 0) continue;
      const auto* pres = scorer_.presence.data() + static_cast<std::size_t>(link.edge) * words;
      const auto* cov = covered_.data() + static_cast<std::size_t>(s) * words;
      for (std::size_t w = 0; w < words; ++w) {
        for (std::uint64_t bits = pres[w] & ~cov[w]; bits; bits &= bits - 1)
          total += scorer_.active_weights[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
      }
    }
    return total;
  }

  void add(int v) {
    const std::size_t words = scorer_.words;
    for (const auto& link : graph_.links(v)) {
      const int s = slot_[link.right];
      if (s < 0) continue;
      const auto* pres = scorer_.presence.data() + static_cast<std::size_t>(link.edge) * words;
      auto* cov = covered_.data() + static_cast<std::size_t>(s) * words;
      for (std::size_t w = 0; w < words; ++w) cov[w] |= pres[w];
    }
  }

  double value() const {
    double total = 0.0;
    for (std::size_t i = 0; i < covered_.size(); ++i)
      for (std::uint64_t bits = covered_[i]; bits; bits &= bits - 1)
        total += scorer_.active_weights[(i % scorer_.words) * 64 +
                                        static_cast<std::size_t>(std::countr_zero(bits))];
    return total;
  }

 private:
  const CoverGraph& graph_;
  const CoverageScorer& scorer_;
  std::vector<int> slot_;
  std::vector<std::uint64_t> covered_;
};

std::vector<int> greedy_order(const CoverGraph& graph, const CoverageScorer& scorer,
                              const SscInput& x, std::vector<double>* trace) {
  validate_input(graph, x);
  GreedyState state(graph, scorer, x);
  // Max-heap on (bound, -id): larger bound first, smaller id on ties.
  struct Entry {
    double bound;
    int node;
    bool operator<(const Entry& o) const {
      return bound != o.bound ? bound < o.bound : node > o.node;
    }
  };
  std::priority_queue<Entry> heap;
  for (int v = 0; v < graph.left_count(); ++v) heap.push({state.gain(v), v});
  std::vector<int> picked;
  if (trace) trace->assign(1, 0.0);
  while (picked.size() < static_cast<std::size_t>(x.budget) && !heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const double g = state.gain(top.node);
    const bool wins = heap.empty() || g > heap.top().bound ||
                      (g == heap.top().bound && top.node < heap.top().node);
    if (!wins) {
      heap.push({g, top.node});
      continue;
    }
    if (g <= 0.0) break;
    state.add(top.node);
    picked.push_back(top.node);
    if (trace) trace->push_back(state.value());
  }
  return picked;
}

}  // namespace

int coverage_value(const CoverGraph& graph, const SscConfig& config, const SscInput& x,
                   const SscSolution& y) {
  const auto slot = target_slots(graph, x);
  std::vector<char> hit(x.targets.size(), 0);
  int count = 0;
  for (int v : y.nodes)
    for (const auto& link : graph.links(v)) {
      const int s = slot[link.right];
      if (s >= 0 && !hit[s] && config.has(static_cast<std::size_t>(link.edge))) {
        hit[s] = 1;
        ++count;
      }
    }
  return count;
}

CoverageScorer make_coverage_scorer(const CoverGraph& graph,
                                    std::span<const Configuration<SscConfig>> configs,
                                    std::span<const double> weights) {
  require(configs.size() == weights.size(), ErrorKind::Dimension,
          "coverage scorer: " + std::to_string(weights.size()) + " weights for " +
              std::to_string(configs.size()) + " configurations");
  CoverageScorer scorer;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, ErrorKind::Domain, "coverage scorer: negative weight");
    if (weights[i] > 0.0) {
      active.push_back(i);
      scorer.active_weights.push_back(weights[i]);
    }
  }
  scorer.words = (active.size() + 63) / 64;
  scorer.presence.assign(graph.edge_count() * scorer.words, 0);
  const std::size_t edge_words = (graph.edge_count() + 63) / 64;
  for (std::size_t j = 0; j < active.size(); ++j) {
    const auto& bits = configs[active[j]].payload.bits;
    require(bits.size() == edge_words, ErrorKind::Dimension,
            "coverage scorer: configuration bitset size mismatch");
    const std::uint64_t mask = std::uint64_t{1} << (j & 63);
    for (std::size_t w = 0; w < edge_words; ++w)
      for (std::uint64_t b = bits[w]; b; b &= b - 1) {
        const std::size_t e = w * 64 + static_cast<std::size_t>(std::countr_zero(b));
        scorer.presence[e * scorer.words + (j >> 6)] |= mask;
      }
  }
  return scorer;
}

SscSolution greedy_oracle(const CoverGraph& graph, const CoverageScorer& scorer,
                          const SscInput& x) {
  SscSolution y{greedy_order(graph, scorer, x, nullptr)};
  std::sort(y.nodes.begin(), y.nodes.end());
  return y;
}

SscSolution greedy_plain(const CoverGraph& graph, const CoverageScorer& scorer,
                         const SscInput& x) {
  validate_input(graph, x);
  GreedyState state(graph, scorer, x);
  std::vector<char> chosen(static_cast<std::size_t>(graph.left_count()), 0);
  SscSolution y;
  for (int round = 0; round < x.budget; ++round) {
    int best = -1;
    double best_gain = 0.0;
    for (int v = 0; v < graph.left_count(); ++v) {
      if (chosen[v]) continue;
      const double g = state.gain(v);
      if (g > best_gain) {
        best_gain = g;
        best = v;
      }
    }
    if (best < 0) break;
    chosen[best] = 1;
    state.add(best);
    y.nodes.push_back(best);
  }
  std::sort(y.nodes.begin(), y.nodes.end());
  return y;
}

std::vector<double> greedy_trace(const CoverGraph& graph, const CoverageScorer& scorer,
                                 const SscInput& x) {
  std::vector<double> trace;
  greedy_order(graph, scorer, x, &trace);
  return trace;
}

double expected_coverage(const CoverGraph& graph, const SscInput& x, const SscSolution& y,
                         const EdgeProbLaw& law) {
  validate_solution(graph, x, y);
  validate_law(graph, law, false);
  const auto slot = target_slots(graph, x);
  std::vector<double> miss(x.targets.size(), 1.0);
  for (int v : y.nodes)
    for (const auto& link : graph.links(v))
      if (const int s = slot[link.right]; s >= 0) miss[s] *= 1.0 - law.p[link.edge];
  double total = 0.0;
  for (double q : miss) total += 1.0 - q;
  return total;
}

SscSolution greedy_expected(const CoverGraph& graph, const SscInput& x, const EdgeProbLaw& law) {
  validate_input(graph, x);
  validate_law(graph, law, false);
  const auto slot = target_slots(graph, x);
  std::vector<double> miss(x.targets.size(), 1.0);
  std::vector<char> chosen(static_cast<std::size_t>(graph.left_count()), 0);
  SscSolution y;
  for (int round = 0; round < x.budget; ++round) {
    int best = -1;
    double best_gain = 0.0;
    for (int v = 0; v < graph.left_count(); ++v) {
      if (chosen[v]) continue;
      double g = 0.0;
      for (const auto& link : graph.links(v))
        if (const int s = slot[link.right]; s >= 0) g += miss[s] * law.p[link.edge];
      if (g > best_gain) {
        best_gain = g;
        best = v;
      }
    }
    if (best < 0) break;
    chosen[best] = 1;
    for (const auto& link : graph.links(best))
      if (const int s = slot[link.right]; s >= 0) miss[s] *= 1.0 - law.p[link.edge];
    y.nodes.push_back(best);
  }
  std::sort(y.nodes.begin(), y.nodes.end());
  return y;
}

SscConfig sample_ssc_config(const CoverGraph& graph, SscDist dist, const EdgeProbLaw* law,
                            std::uint64_t rng_seed) {
  if (dist == SscDist::True) {
    require(law != nullptr, ErrorKind::Config, "phi_true sampling requires an edge probability law");
    validate_law(graph, *law, false);
  }
  Rng rng(rng_seed);
  SscConfig config;
  config.bits.assign((graph.edge_count() + 63) / 64, 0);
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const double p = dist == SscDist::Uni ? 0.1 : law->p[e];
    if (rng.uniform01() < p) config.set(e);
  }
  return config;
}

SscSolution rand_baseline(const CoverGraph& graph, const SscInput& x, std::uint64_t rng_seed) {
  require(x.budget >= 0 && x.budget <= graph.left_count(), ErrorKind::Domain,
          "rand baseline: budget exceeds |L|");
  Rng rng(derive_seed(rng_seed, "ssc-rand"));
  std::vector<int> nodes(static_cast<std::size_t>(graph.left_count()));
  std::iota(nodes.begin(), nodes.end(), 0);
  for (int i = 0; i < x.budget; ++i) {
    const auto j = rng.uniform_int(i, graph.left_count() - 1);
    std::swap(nodes[i], nodes[static_cast<std::size_t>(j)]);
  }
  SscSolution y{std::vector<int>(nodes.begin(), nodes.begin() + x.budget)};
  std::sort(y.nodes.begin(), y.nodes.end());
  return y;
}

CoverGraph desk_cover_graph(std::uint64_t seed, int left, int right, int min_degree,
                            int max_degree) {
  require(left >= 1 && right >= 1 && min_degree >= 0 && min_degree <= max_degree &&
              max_degree <= right,
          ErrorKind::Domain, "desk_cover_graph: invalid size parameters");
  Rng rng(derive_seed(seed, "cover-graph"));
  std::vector<int> pool(static_cast<std::size_t>(right));
  std::vector<CoverEdge> edges;
  for (int v = 0; v < left; ++v) {
    std::iota(pool.begin(), pool.end(), 0);
    const auto degree = rng.uniform_int(min_degree, max_degree);
    std::vector<int> picks;
    for (std::int64_t i = 0; i < degree; ++i) {
      const auto j = rng.uniform_int(i, right - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
      picks.push_back(pool[static_cast<std::size_t>(i)]);
    }
    std::sort(picks.begin(), picks.end());
    for (int r : picks) edges.push_back({v, r});
  }
  return CoverGraph(left, right, std::move(edges));
}

std::vector<double> SscProblem::batch_objective(
    const Input& x, const Solution& y, std::span<const Configuration<Payload>> configs) const {
  // Edges from y into R*, grouped by target slot.
  const auto slot = target_slots(graph_, x);
  std::vector<std::vector<int>> by_slot(x.targets.size());
  for (int v : y.nodes)
    for (const auto& link : graph_.links(v))
      if (const int s = slot[link.right]; s >= 0) by_slot[s].push_back(link.edge);
  std::vector<double> out;
  out.reserve(configs.size());
  for (const auto& c : configs) {
    int count = 0;
    for (const auto& group : by_slot)
      for (int e : group)
        if (c.payload.has(static_cast<std::size_t>(e))) {
          ++count;
          break;
        }
    out.push_back(count);
  }
  return out;
}

std::string SscProblem::encode(const Solution& y) {
  std::string out;
  for (std::size_t i = 0; i < y.nodes.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(y.nodes[i]);
  }
  return out;
}

std::string SscProblem::encode_input(const Input& x) {
  std::string out = std::to_string(x.budget) + ":";
  for (std::size_t i = 0; i < x.targets.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(x.targets[i]);
  }
  return out;
}

}  // namespace usco::ssc
