#include "usco/ssp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <tuple>

#include "usco/rng.hpp"

namespace usco::ssp {

namespace {

void build_csr(int n, const std::vector<std::pair<int, Graph::Arc>>& arcs,
               std::vector<int>& offsets, std::vector<Graph::Arc>& out) {
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [from, arc] : arcs) ++offsets[static_cast<std::size_t>(from) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  out.assign(arcs.size(), Graph::Arc{0, 0});
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [from, arc] : arcs) out[static_cast<std::size_t>(cursor[from]++)] = arc;
  for (int u = 0; u < n; ++u)
    std::sort(out.begin() + offsets[u], out.begin() + offsets[u + 1],
              [](const Graph::Arc& a, const Graph::Arc& b) { return a.to < b.to; });
}

}  // namespace

Graph::Graph(int node_count, std::vector<Edge> edges, bool directed)
    : node_count_(node_count), directed_(directed), edges_(std::move(edges)) {
  require(node_count_ >= 1, ErrorKind::Domain, "graph: node_count must be >= 1");
  std::vector<std::pair<int, Arc>> out, in;
  std::vector<std::pair<int, int>> seen;
  seen.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    require(u >= 0 && u < node_count_ && v >= 0 && v < node_count_, ErrorKind::Domain,
            "graph: edge " + std::to_string(e) + " has a node id out of range");
    require(u != v, ErrorKind::Domain, "graph: edge " + std::to_string(e) + " is a self-loop");
    seen.emplace_back(directed_ ? u : std::min(u, v), directed_ ? v : std::max(u, v));
    const int idx = static_cast<int>(e);
    out.push_back({u, Arc{v, idx}});
    in.push_back({v, Arc{u, idx}});
    if (!directed_) {
      out.push_back({v, Arc{u, idx}});
      in.push_back({u, Arc{v, idx}});
    }
  }
  std::sort(seen.begin(), seen.end());
  require(std::adjacent_find(seen.begin(), seen.end()) == seen.end(), ErrorKind::Domain,
          "graph: duplicate edge");
  build_csr(node_count_, out, out_offsets_, out_arcs_);
  build_csr(node_count_, in, in_offsets_, in_arcs_);
}

std::span<const Graph::Arc> Graph::out_arcs(int u) const {
  return {out_arcs_.data() + out_offsets_[u], out_arcs_.data() + out_offsets_[u + 1]};
}

std::span<const Graph::Arc> Graph::in_arcs(int v) const {
  return {in_arcs_.data() + in_offsets_[v], in_arcs_.data() + in_offsets_[v + 1]};
}

std::optional<int> Graph::find_edge(int u, int v) const {
  if (u < 0 || u >= node_count_) return std::nullopt;
  const auto arcs = out_arcs(u);
  auto it = std::lower_bound(arcs.begin(), arcs.end(), v,
                             [](const Arc& a, int target) { return a.to < target; });
  if (it == arcs.end() || it->to != v) return std::nullopt;
  return it->edge;
}

void validate_law(const Graph& graph, const WeibullEdgeLaw& law) {
  require(law.shape.size() == graph.edge_count() && law.scale.size() == graph.edge_count(),
          ErrorKind::Dimension, "weibull law: one (shape, scale) entry per edge required");
  for (std::size_t e = 0; e < law.shape.size(); ++e)
    require(law.shape[e] >= 1 && law.shape[e] <= 10 && law.scale[e] >= 1 && law.scale[e] <= 10,
            ErrorKind::Domain, "weibull law: parameters of edge " + std::to_string(e) +
                                   " outside {1,...,10}");
}

void validate_config(const Graph& graph, const SspConfig& config) {
  require(config.weights.size() == graph.edge_count(), ErrorKind::Dimension,
          "ssp config: weight count does not match edge count");
  for (double w : config.weights)
    require(std::isfinite(w) && w > 0.0, ErrorKind::Domain,
            "ssp config: edge weights must be finite and positive");
}

void validate_input(const Graph& graph, const SspInput& x) {
  require(x.source >= 0 && x.source < graph.node_count() && x.target >= 0 &&
              x.target < graph.node_count(),
          ErrorKind::Domain, "ssp input: node id out of range");
  require(x.source != x.target, ErrorKind::Domain, "ssp input: source equals destination");
}

std::vector<int> path_edges(const Graph& graph, const SspInput& x, const SspPath& path) {
  const auto& nodes = path.nodes;
  require(nodes.size() >= 2, ErrorKind::Feasibility, "path: fewer than two nodes");
  require(nodes.front() == x.source, ErrorKind::Feasibility, "path: does not start at the source");
  require(nodes.back() == x.target, ErrorKind::Feasibility, "path: does not end at the destination");
  std::vector<char> visited(static_cast<std::size_t>(graph.node_count()), 0);
  std::vector<int> edges;
  edges.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int a = nodes[i];
    require(a >= 0 && a < graph.node_count(), ErrorKind::Feasibility,
            "path: node id " + std::to_string(a) + " out of range");
    require(!visited[a], ErrorKind::Feasibility,
            "path: node " + std::to_string(a) + " repeated (path must be simple)");
    visited[a] = 1;
    if (i + 1 < nodes.size()) {
      const auto e = graph.find_edge(a, nodes[i + 1]);
      require(e.has_value(), ErrorKind::Feasibility,
              "path: no edge " + std::to_string(a) + "->" + std::to_string(nodes[i + 1]));
      edges.push_back(*e);
    }
  }
  return edges;
}

double path_length(std::span<const int> edges, std::span<const double> edge_weights) {
  double total = 0.0;
  for (int e : edges) total += edge_weights[static_cast<std::size_t>(e)];
  return total;
}

std::vector<double> aggregate_edge_weights(std::span<const Configuration<SspConfig>> configs,
                                           std::span<const double> weights,
                                           std::size_t edge_count) {
  require(configs.size() == weights.size(), ErrorKind::Dimension,
          "aggregate_edge_weights: " + std::to_string(weights.size()) + " weights for " +
              std::to_string(configs.size()) + " configurations");
  std::vector<double> out(edge_count, 0.0);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const auto& c = configs[i].payload.weights;
    require(c.size() == edge_count, ErrorKind::Dimension,
            "aggregate_edge_weights: configuration edge count mismatch");
    for (std::size_t e = 0; e < edge_count; ++e) out[e] += w * c[e];
  }
  return out;
}

SspPath dijkstra_oracle(const Graph& graph, std::span<const double> edge_weights,
                        const SspInput& x) {
  validate_input(graph, x);
  require(edge_weights.size() == graph.edge_count(), ErrorKind::Dimension,
          "dijkstra: edge weight count does not match edge count");
  for (double w : edge_weights)
    require(std::isfinite(w) && w >= 0.0, ErrorKind::Domain,
            "dijkstra: edge weights must be finite and nonnegative");

  // Distances to the target, ordered by (length, hops).
  const auto n = static_cast<std::size_t>(graph.node_count());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> hops(n, std::numeric_limits<int>::max());
  using Item = std::tuple<double, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[x.target] = 0.0;
  hops[x.target] = 0;
  heap.emplace(0.0, 0, x.target);
  while (!heap.empty()) {
    const auto [d, h, node] = heap.top();
    heap.pop();
    if (d != dist[node] || h != hops[node]) continue;
    if (node == x.source) break;
    for (const auto& arc : graph.in_arcs(node)) {
      const double cand = d + edge_weights[arc.edge];
      const int cand_hops = h + 1;
      if (cand < dist[arc.to] || (cand == dist[arc.to] && cand_hops < hops[arc.to])) {
        dist[arc.to] = cand;
        hops[arc.to] = cand_hops;
        heap.emplace(cand, cand_hops, arc.to);
      }
    }
  }
  if (dist[x.source] == inf)
    fail(ErrorKind::NoSolution, "dijkstra: node " + std::to_string(x.target) +
                                    " unreachable from " + std::to_string(x.source));

  // Walk tight arcs forward, smallest neighbor first. Every node on the walk
  // has its final label: it lies on a shortest route to a node settled before
  // the source.
  SspPath path;
  int at = x.source;
  path.nodes.push_back(at);
  while (at != x.target) {
    int next = -1;
    for (const auto& arc : graph.out_arcs(at)) {
      if (hops[arc.to] != std::numeric_limits<int>::max() && hops[arc.to] + 1 == hops[at] &&
          dist[arc.to] + edge_weights[arc.edge] == dist[at]) {
        next = arc.to;
        break;
      }
    }
    if (next < 0) fail(ErrorKind::NoSolution, "dijkstra: internal error reconstructing path");
    path.nodes.push_back(next);
    at = next;
  }
  return path;
}

SspConfig sample_ssp_config(const Graph& graph, SspDist dist, const WeibullEdgeLaw* law,
                            std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  const std::size_t m = graph.edge_count();
  SspConfig config;
  config.weights.resize(m);
  switch (dist) {
    case SspDist::Exp: {
      for (auto& w : config.weights) w = rng.exponential();
      if (m == 0) break;
      const auto [lo_it, hi_it] = std::minmax_element(config.weights.begin(), config.weights.end());
      const double lo = *lo_it, hi = *hi_it;
      for (auto& w : config.weights)
        w = hi > lo ? 1.0 + (w - lo) / (hi - lo) * (1e5 - 1.0) : 1.0;
      break;
    }
    case SspDist::Norm:
      for (auto& w : config.weights) w = std::abs(rng.normal()) * 1e3 + 1.0;
      break;
    case SspDist::True:
      require(law != nullptr, ErrorKind::Config, "phi_true sampling requires a Weibull edge law");
      validate_law(graph, *law);
      for (std::size_t e = 0; e < m; ++e) config.weights[e] = rng.weibull(law->shape[e], law->scale[e]);
      // A zero draw is possible only through underflow; keep weights positive.
      for (auto& w : config.weights) w = std::max(w, std::numeric_limits<double>::min());
      break;
  }
  return config;
}

std::vector<double> expected_edge_weights(const WeibullEdgeLaw& law) {
  std::vector<double> out(law.shape.size());
  for (std::size_t e = 0; e < out.size(); ++e)
    out[e] = law.scale[e] * std::tgamma(1.0 + 1.0 / law.shape[e]);
  return out;
}

double expected_path_length(const Graph& graph, const SspPath& path, const WeibullEdgeLaw& law) {
  validate_law(graph, law);
  require(path.nodes.size() >= 2, ErrorKind::Feasibility, "path: fewer than two nodes");
  const SspInput x{path.nodes.front(), path.nodes.back()};
  double total = 0.0;
  for (int e : path_edges(graph, x, path))
    total += law.scale[e] * std::tgamma(1.0 + 1.0 / law.shape[e]);
  return total;
}

namespace {

std::int64_t parse_int_field(std::string_view token, int line_no, const char* what) {
  std::int64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    fail(ErrorKind::Parse, "dimacs line " + std::to_string(line_no) + ": " + what +
                               " '" + std::string(token) + "' is not an integer");
  return value;
}

}  // namespace

DimacsGraph parse_dimacs(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::int64_t n = -1;
  std::map<std::pair<int, int>, std::int64_t> arcs;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0] == "c") continue;
    const auto where = "dimacs line " + std::to_string(line_no) + ": ";
    if (tok[0] == "p") {
      require(n < 0, ErrorKind::Parse, where + "duplicate problem line");
      require(tok.size() == 4 && tok[1] == "sp", ErrorKind::Parse,
              where + "expected 'p sp <nodes> <arcs>'");
      n = parse_int_field(tok[2], line_no, "node count");
      parse_int_field(tok[3], line_no, "arc count");
      require(n >= 1 && n <= std::numeric_limits<int>::max(), ErrorKind::Parse,
              where + "node count out of range");
    } else if (tok[0] == "a") {
      require(n >= 0, ErrorKind::Parse, where + "arc before problem line");
      require(tok.size() == 4, ErrorKind::Parse, where + "expected 'a <u> <v> <w>'");
      const auto u = parse_int_field(tok[1], line_no, "tail id");
      const auto v = parse_int_field(tok[2], line_no, "head id");
      const auto w = parse_int_field(tok[3], line_no, "weight");
      require(u >= 1 && u <= n && v >= 1 && v <= n, ErrorKind::Parse,
              where + "node id out of range [1, " + std::to_string(n) + "]");
      if (u == v) continue;
      const std::pair<int, int> key(static_cast<int>(u - 1), static_cast<int>(v - 1));
      auto [it, inserted] = arcs.try_emplace(key, w);
      if (!inserted) it->second = std::min(it->second, w);
    } else {
      fail(ErrorKind::Parse, where + "unknown line type '" + tok[0] + "'");
    }
  }
  require(n >= 0, ErrorKind::Parse, "dimacs: missing problem line");
  std::vector<Edge> edges;
  DimacsGraph out;
  edges.reserve(arcs.size());
  out.weights.reserve(arcs.size());
  for (const auto& [key, w] : arcs) {
    edges.push_back({key.first, key.second});
    out.weights.push_back(w);
  }
  out.graph = Graph(static_cast<int>(n), std::move(edges), true);
  return out;
}

SspPath base_baseline(const Graph& graph, const SspInput& x, std::uint64_t rng_seed) {
  Rng rng(derive_seed(rng_seed, "ssp-base"));
  std::vector<double> weights(graph.edge_count());
  for (auto& w : weights) w = rng.uniform01();
  return dijkstra_oracle(graph, weights, x);
}

Graph desk_graph(std::uint64_t seed, int levels, std::size_t target_edges) {
  require(levels >= 1 && levels <= 20, ErrorKind::Domain, "desk_graph: levels out of range");
  const int n = 1 << levels;
  // Stochastic Kronecker initiator, ball-dropping construction.
  constexpr double theta[2][2] = {{0.9, 0.6}, {0.6, 0.35}};
  const double total = theta[0][0] + theta[0][1] + theta[1][0] + theta[1][1];
  Rng rng(derive_seed(seed, "kronecker"));
  std::vector<std::pair<int, int>> chosen;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  const std::size_t max_edges = static_cast<std::size_t>(n) * (n - 1) / 2;
  target_edges = std::min(target_edges, max_edges);
  for (std::size_t attempt = 0; chosen.size() < target_edges && attempt < 1000 * target_edges; ++attempt) {
    int u = 0, v = 0;
    for (int l = 0; l < levels; ++l) {
      double r = rng.uniform01() * total;
      int a = 1, b = 1;
      if ((r -= theta[0][0]) < 0) a = 0, b = 0;
      else if ((r -= theta[0][1]) < 0) a = 0, b = 1;
      else if ((r -= theta[1][0]) < 0) a = 1, b = 0;
      u = (u << 1) | a;
      v = (v << 1) | b;
    }
    if (u == v || adj[u][v]) continue;
    adj[u][v] = adj[v][u] = 1;
    chosen.emplace_back(std::min(u, v), std::max(u, v));
  }
  // Join components to the one containing node 0.
  std::vector<int> comp(n, -1);
  int comps = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = comps;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b)
        if (adj[a][b] && comp[b] < 0) {
          comp[b] = comps;
          stack.push_back(b);
        }
    }
    if (comps > 0) {
      std::vector<int> main_nodes;
      for (int b = 0; b < n; ++b)
        if (comp[b] == 0) main_nodes.push_back(b);
      const int anchor = main_nodes[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(main_nodes.size()) - 1))];
      adj[s][anchor] = adj[anchor][s] = 1;
      chosen.emplace_back(std::min(s, anchor), std::max(s, anchor));
      for (int b = 0; b < n; ++b)
        if (comp[b] == comps) comp[b] = 0;
    } else {
      ++comps;
      continue;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (auto [u, v] : chosen) edges.push_back({u, v});
  return Graph(n, std::move(edges), false);
}

double SspProblem::objective(const Input& x, const Solution& y, const Payload& c) const {
  return path_length(path_edges(graph_, x, y), c.weights);
}

std::vector<double> SspProblem::batch_objective(
    const Input& x, const Solution& y, std::span<const Configuration<Payload>> configs) const {
  const auto edges = path_edges(graph_, x, y);
  std::vector<double> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(path_length(edges, c.payload.weights));
  return out;
}

void SspProblem::check_feasible(const Input& x, const Solution& y) const {
  validate_input(graph_, x);
  path_edges(graph_, x, y);
}

SspProblem::Scorer SspProblem::make_scorer(std::span<const Configuration<Payload>> configs,
                                           std::span<const double> weights) const {
  return aggregate_edge_weights(configs, weights, graph_.edge_count());
}

SspProblem::Solution SspProblem::solve(const Input& x, const Scorer& edge_weights) const {
  return dijkstra_oracle(graph_, edge_weights, x);
}

std::string SspProblem::encode(const Solution& y) {
  std::string out;
  for (std::size_t i = 0; i < y.nodes.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(y.nodes[i]);
  }
  return out;
}

std::string SspProblem::encode_input(const Input& x) {
  return std::to_string(x.source) + ">" + std::to_string(x.target);
}

}  // namespace usco::ssp
