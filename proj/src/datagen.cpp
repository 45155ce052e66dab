#include "usco/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

namespace usco::datagen {

void validate(const PowerLawSpec& spec) {
  require(spec.exponent > 0.0, ErrorKind::Domain, "power law: exponent must be > 0");
  require(spec.scale > 0.0, ErrorKind::Domain, "power law: scale must be > 0");
  require(spec.min_value <= spec.max_value, ErrorKind::Domain, "power law: min exceeds max");
}

int sample_powerlaw_size(const PowerLawSpec& spec, Rng& rng) {
  const double u = rng.uniform_open01();
  const double raw = std::floor(spec.scale * std::pow(u, 1.0 / spec.exponent));
  const double clamped =
      std::clamp(raw, static_cast<double>(spec.min_value), static_cast<double>(spec.max_value));
  return static_cast<int>(clamped);
}

int sample_powerlaw_size(const PowerLawSpec& spec, std::uint64_t rng_seed) {
  validate(spec);
  Rng rng(rng_seed);
  return sample_powerlaw_size(spec, rng);
}

ssp::WeibullEdgeLaw gen_ssp_instance(const ssp::Graph& graph, std::uint64_t rng_seed) {
  Rng rng(derive_seed(rng_seed, "ssp-law"));
  ssp::WeibullEdgeLaw law;
  law.shape.reserve(graph.edge_count());
  law.scale.reserve(graph.edge_count());
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    law.shape.push_back(static_cast<int>(rng.uniform_int(1, 10)));
    law.scale.push_back(static_cast<int>(rng.uniform_int(1, 10)));
  }
  return law;
}

ssc::EdgeProbLaw gen_ssc_instance(const ssc::CoverGraph& graph, std::uint64_t rng_seed) {
  Rng rng(derive_seed(rng_seed, "ssc-law"));
  ssc::EdgeProbLaw law;
  law.p.reserve(graph.edge_count());
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto a = static_cast<double>(rng.uniform_int(1, 10));
    const auto b = static_cast<double>(rng.uniform_int(1, 10));
    law.p.push_back(a / (a + b));
  }
  return law;
}

sbm::MatchGraph gen_sbm_instance(int n, std::uint64_t rng_seed) {
  require(n >= 1, ErrorKind::Domain, "sbm instance: n must be >= 1");
  Rng rng(derive_seed(rng_seed, "sbm-law"));
  sbm::MatchGraph graph{n, {}};
  graph.mu.resize(static_cast<std::size_t>(n) * n);
  for (double& mu : graph.mu) mu = rng.uniform(1.0, 10.0);
  return graph;
}

namespace {

// Sorted uniform `size`-subset of [0, n) by partial Fisher-Yates.
std::vector<int> uniform_subset(int n, int size, Rng& rng) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  for (int i = 0; i < size; ++i) std::swap(ids[i], ids[rng.uniform_int(i, n - 1)]);
  ids.resize(static_cast<std::size_t>(size));
  std::sort(ids.begin(), ids.end());
  return ids;
}

[[noreturn]] void retry_exhausted(const char* family, std::size_t got, std::size_t wanted) {
  fail(ErrorKind::Domain, std::string(family) + " pairs: only " + std::to_string(got) + " of " +
                              std::to_string(wanted) +
                              " distinct inputs found before the retry cap");
}

}  // namespace

std::vector<SspPair> gen_ssp_pairs(const ssp::Graph& graph, const ssp::WeibullEdgeLaw& law,
                                   std::size_t n_pairs, std::uint64_t rng_seed) {
  ssp::validate_law(graph, law);
  require(graph.node_count() >= 2, ErrorKind::Domain, "ssp pairs: graph needs two nodes");
  const auto weights = ssp::expected_edge_weights(law);
  Rng rng(derive_seed(rng_seed, "ssp-pairs"));
  std::set<std::pair<int, int>> seen;
  std::vector<SspPair> pairs;
  pairs.reserve(n_pairs);
  const std::size_t cap = kRetryFactor * std::max<std::size_t>(n_pairs, 1);
  for (std::size_t attempt = 0; pairs.size() < n_pairs; ++attempt) {
    if (attempt >= cap) retry_exhausted("ssp", pairs.size(), n_pairs);
    const int u = static_cast<int>(rng.uniform_int(0, graph.node_count() - 1));
    const int v = static_cast<int>(rng.uniform_int(0, graph.node_count() - 1));
    if (u == v || !seen.insert({u, v}).second) continue;
    ssp::SspInput x{u, v};
    try {
      auto y = ssp::dijkstra_oracle(graph, weights, x);
      pairs.push_back({x, std::move(y)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoSolution) throw;
    }
  }
  return pairs;
}

std::vector<SscPair> gen_ssc_pairs(const ssc::CoverGraph& graph, const ssc::EdgeProbLaw& law,
                                   std::size_t n_pairs, PowerLawSpec spec, std::uint64_t rng_seed) {
  ssc::validate_law(graph, law);
  spec.max_value = std::min(spec.max_value, graph.right_count());
  spec.min_value = std::min(spec.min_value, spec.max_value);
  validate(spec);
  Rng rng(derive_seed(rng_seed, "ssc-pairs"));
  std::set<std::vector<int>> seen;
  std::vector<SscPair> pairs;
  pairs.reserve(n_pairs);
  const std::size_t cap = kRetryFactor * std::max<std::size_t>(n_pairs, 1);
  for (std::size_t attempt = 0; pairs.size() < n_pairs; ++attempt) {
    if (attempt >= cap) retry_exhausted("ssc", pairs.size(), n_pairs);
    const int size = sample_powerlaw_size(spec, rng);
    auto targets = uniform_subset(graph.right_count(), size, rng);
    if (!seen.insert(targets).second) continue;
    const int budget = std::min(graph.left_count(), std::max(1, size / 10));
    ssc::SscInput x{std::move(targets), budget};
    auto y = ssc::greedy_expected(graph, x, law);
    pairs.push_back({std::move(x), std::move(y)});
  }
  return pairs;
}

std::vector<SbmPair> gen_sbm_pairs(const sbm::MatchGraph& graph, std::size_t n_pairs,
                                   PowerLawSpec spec, std::uint64_t rng_seed) {
  sbm::validate_graph(graph);
  spec.max_value = std::min(spec.max_value, graph.n);
  spec.min_value = std::min(spec.min_value, spec.max_value);
  validate(spec);
  Rng rng(derive_seed(rng_seed, "sbm-pairs"));
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  std::vector<SbmPair> pairs;
  pairs.reserve(n_pairs);
  const std::size_t cap = kRetryFactor * std::max<std::size_t>(n_pairs, 1);
  for (std::size_t attempt = 0; pairs.size() < n_pairs; ++attempt) {
    if (attempt >= cap) retry_exhausted("sbm", pairs.size(), n_pairs);
    const int size = sample_powerlaw_size(spec, rng);
    auto left = uniform_subset(graph.n, size, rng);
    auto right = uniform_subset(graph.n, size, rng);
    if (!seen.insert({left, right}).second) continue;
    sbm::SbmInput x{std::move(left), std::move(right)};
    const sbm::CostMatrix mu{static_cast<std::size_t>(graph.n), static_cast<std::size_t>(graph.n),
                             graph.mu};
    sbm::CostMatrix sub{x.left.size(), x.right.size(), {}};
    sub.values.reserve(sub.rows * sub.cols);
    for (int l : x.left)
      for (int r : x.right) sub.values.push_back(mu(l, r));
    auto y = sbm::hungarian_oracle(sub, x);
    pairs.push_back({std::move(x), std::move(y)});
  }
  return pairs;
}

std::vector<std::uint64_t> draw_pool_ids(std::uint64_t pool_size, std::uint64_t k,
                                         std::uint64_t rng_seed) {
  require(k >= 1, ErrorKind::Domain, "K must be >= 1");
  require(k <= pool_size, ErrorKind::Domain,
          "K = " + std::to_string(k) + " exceeds pool size " + std::to_string(pool_size));
  Rng rng(derive_seed(rng_seed, "pool-draw"));
  // Sparse Fisher-Yates: positions not in the map hold their own index.
  std::unordered_map<std::uint64_t, std::uint64_t> moved;
  auto at = [&](std::uint64_t i) {
    auto it = moved.find(i);
    return it == moved.end() ? i : it->second;
  };
  std::vector<std::uint64_t> ids;
  ids.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::uint64_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool_size - 1)));
    const std::uint64_t vi = at(i), vj = at(j);
    moved[j] = vi;
    moved[i] = vj;
    ids.push_back(vj);
  }
  return ids;
}

}  // namespace usco::datagen
