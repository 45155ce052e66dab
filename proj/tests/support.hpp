#pragma once

// Brute-force reference implementations and small random fixtures shared by
// the unit tests. Nothing here calls into the oracles under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numeric>
#include <unistd.h>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "usco/sbm.hpp"
#include "usco/ssc.hpp"
#include "usco/ssp.hpp"

namespace testing_support {

using usco::ssp::Edge;
using usco::ssp::Graph;

/// Random graph on n nodes: each pair becomes an edge with probability p.
inline Graph random_graph(std::mt19937_64& gen, int n, double p, bool directed) {
  std::bernoulli_distribution keep(p);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = directed ? 0 : u + 1; v < n; ++v)
      if (u != v && keep(gen)) edges.push_back({u, v});
  return Graph(n, edges, directed);
}

/// Every simple u -> v path, as node sequences.
inline std::vector<std::vector<int>> all_simple_paths(const Graph& g, int u, int v) {
  std::vector<std::vector<int>> out;
  std::vector<int> stack{u};
  std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
  seen[static_cast<std::size_t>(u)] = true;
  std::function<void(int)> walk = [&](int at) {
    if (at == v) {
      out.push_back(stack);
      return;
    }
    for (const auto& e : g.edges()) {
      int next = -1;
      if (e.u == at) next = e.v;
      else if (!g.directed() && e.v == at) next = e.u;
      if (next < 0 || seen[static_cast<std::size_t>(next)]) continue;
      seen[static_cast<std::size_t>(next)] = true;
      stack.push_back(next);
      walk(next);
      stack.pop_back();
      seen[static_cast<std::size_t>(next)] = false;
    }
  };
  walk(u);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Edge index joining a and b, looked up by linear scan.
inline int edge_between(const Graph& g, int a, int b) {
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& e = g.edges()[i];
    if (e.u == a && e.v == b) return static_cast<int>(i);
    if (!g.directed() && e.u == b && e.v == a) return static_cast<int>(i);
  }
  return -1;
}

/// Sum of edge weights along the node sequence, left to right.
inline double walk_length(const Graph& g, const std::vector<int>& nodes,
                          const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    total += w[static_cast<std::size_t>(edge_between(g, nodes[i], nodes[i + 1]))];
  return total;
}

/// Shortest path by enumeration, ties by (hops, node sequence).
inline std::vector<int> brute_shortest(const Graph& g, int u, int v, const std::vector<double>& w) {
  std::vector<int> best;
  double best_len = INFINITY;
  for (const auto& p : all_simple_paths(g, u, v)) {
    const double len = walk_length(g, p, w);
    if (best.empty() || len < best_len ||
        (len == best_len && (p.size() < best.size() || (p.size() == best.size() && p < best)))) {
      best = p;
      best_len = len;
    }
  }
  return best;
}

/// Minimum assignment cost and the lexicographically smallest optimal permutation.
inline std::pair<double, std::vector<int>> brute_assignment(const usco::sbm::CostMatrix& c) {
  std::vector<int> perm(c.rows);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  std::vector<int> arg;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < c.rows; ++i) total += c(i, static_cast<std::size_t>(perm[i]));
    if (total < best) {
      best = total;
      arg = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, arg};
}

inline double assignment_cost(const usco::sbm::CostMatrix& c, const std::vector<int>& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < c.rows; ++i) total += c(i, static_cast<std::size_t>(perm[i]));
  return total;
}

/// Calls fn on every subset of {0..n-1} of size exactly k.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == k) {
      fn(pick);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

/// |union of neighbours of y among present edges| restricted to targets.
inline int brute_coverage(const usco::ssc::CoverGraph& g, const usco::ssc::SscConfig& c,
                          const std::vector<int>& targets, const std::vector<int>& y) {
  std::set<int> covered;
  const std::set<int> want(targets.begin(), targets.end());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!c.has(e)) continue;
    const auto& edge = g.edges()[e];
    if (std::find(y.begin(), y.end(), edge.left) != y.end() && want.count(edge.right))
      covered.insert(edge.right);
  }
  return static_cast<int>(covered.size());
}

inline usco::ssc::SscConfig config_with(std::size_t edge_count, const std::vector<std::size_t>& on) {
  usco::ssc::SscConfig c;
  c.bits.assign((edge_count + 63) / 64, 0);
  for (auto e : on) c.set(e);
  return c;
}

/// Unique scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("usco-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
