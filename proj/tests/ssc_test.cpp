#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "usco/datagen.hpp"
#include "usco/ssc.hpp"

using namespace usco;
using namespace usco::ssc;
namespace ts = testing_support;

namespace {

struct RandomCase {
  CoverGraph graph;
  std::vector<SscConfig> configs;
  std::vector<double> weights;
  SscInput x;
};

RandomCase random_case(std::mt19937_64& gen, int max_left, int max_k) {
  std::uniform_int_distribution<int> left(2, max_left), right(3, 12), kd(1, max_k), nconf(1, 4);
  std::uniform_real_distribution<double> w(0.0, 2.0);
  std::bernoulli_distribution edge(0.35), keep(0.6), target(0.7);
  RandomCase c;
  const int l = left(gen), r = right(gen);
  std::vector<CoverEdge> edges;
  for (int a = 0; a < l; ++a)
    for (int b = 0; b < r; ++b)
      if (edge(gen)) edges.push_back({a, b});
  c.graph = CoverGraph(l, r, edges);
  const int k = nconf(gen);
  for (int i = 0; i < k; ++i) {
    std::vector<std::size_t> on;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (keep(gen)) on.push_back(e);
    c.configs.push_back(ts::config_with(edges.size(), on));
    c.weights.push_back(w(gen));
  }
  for (int b = 0; b < r; ++b)
    if (target(gen)) c.x.targets.push_back(b);
  if (c.x.targets.empty()) c.x.targets.push_back(0);
  c.x.budget = std::min(kd(gen), l);
  return c;
}

std::vector<Configuration<SscConfig>> wrap(const std::vector<SscConfig>& cs) {
  std::vector<Configuration<SscConfig>> out;
  for (std::size_t i = 0; i < cs.size(); ++i) out.push_back({i, i, cs[i]});
  return out;
}

double weighted_value(const RandomCase& c, const std::vector<int>& y) {
  double total = 0;
  for (std::size_t i = 0; i < c.configs.size(); ++i)
    total += c.weights[i] * ts::brute_coverage(c.graph, c.configs[i], c.x.targets, y);
  return total;
}

// Left nodes S1={a,b}, S2={b,c}, S3={c} over right nodes a, b, c.
CoverGraph three_sets() { return CoverGraph(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}}); }

}  // namespace

TEST(Coverage, Examples) {
  const CoverGraph g(1, 2, {{0, 0}, {0, 1}});
  const auto c = ts::config_with(2, {0, 1});
  EXPECT_EQ(coverage_value(g, c, {{0, 1}, 1}, SscSolution{{0}}), 2);
  EXPECT_EQ(coverage_value(g, c, {{0, 1}, 1}, SscSolution{{}}), 0);
}

TEST(Coverage, MatchesSetUnion) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 200; ++t) {
    const auto c = random_case(gen, 8, 3);
    std::vector<int> y;
    for (int v = 0; v < c.graph.left_count() && static_cast<int>(y.size()) < c.x.budget; ++v)
      if (gen() % 2) y.push_back(v);
    for (const auto& cfg : c.configs)
      EXPECT_EQ(coverage_value(c.graph, cfg, c.x, SscSolution{y}),
                ts::brute_coverage(c.graph, cfg, c.x.targets, y));
  }
}

TEST(Greedy, HandTrace) {
  const auto g = three_sets();
  const auto configs = wrap({ts::config_with(5, {0, 1, 2, 3, 4})});
  const auto scorer = make_coverage_scorer(g, configs, std::vector<double>{1.0});
  const SscInput x{{0, 1, 2}, 2};
  const auto y = greedy_oracle(g, scorer, x);
  EXPECT_EQ(y.nodes, (std::vector<int>{0, 1}));
  EXPECT_EQ(coverage_value(g, configs[0].payload, x, y), 3);
}

TEST(Greedy, FullBudgetCoversEverything) {
  const auto g = three_sets();
  const auto configs = wrap({ts::config_with(5, {0, 1, 2, 3, 4})});
  const auto scorer = make_coverage_scorer(g, configs, std::vector<double>{1.0});
  const SscInput x{{0, 1, 2}, 3};
  EXPECT_EQ(coverage_value(g, configs[0].payload, x, greedy_oracle(g, scorer, x)), 3);
}

TEST(Greedy, StopsWhenGainsVanish) {
  const auto g = three_sets();
  const auto configs = wrap({ts::config_with(5, {0, 1, 2, 3, 4})});
  const auto scorer = make_coverage_scorer(g, configs, std::vector<double>{0.0});
  EXPECT_TRUE(greedy_oracle(g, scorer, {{0, 1, 2}, 2}).nodes.empty());
}

TEST(Greedy, ApproximationGuaranteeByEnumeration) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 100; ++t) {
    const auto c = random_case(gen, 10, 3);
    const auto configs = wrap(c.configs);
    const auto scorer = make_coverage_scorer(c.graph, configs, c.weights);
    const auto y = greedy_oracle(c.graph, scorer, c.x);
    EXPECT_LE(static_cast<int>(y.nodes.size()), c.x.budget);
    double best = 0;
    ts::for_each_subset(c.graph.left_count(), c.x.budget,
                        [&](const std::vector<int>& s) { best = std::max(best, weighted_value(c, s)); });
    EXPECT_GE(weighted_value(c, y.nodes), kGreedyAlpha * best) << "case " << t;
  }
}

TEST(Greedy, LazyMatchesPlain) {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 300; ++t) {
    const auto c = random_case(gen, 10, 5);
    const auto configs = wrap(c.configs);
    const auto scorer = make_coverage_scorer(c.graph, configs, c.weights);
    EXPECT_EQ(greedy_oracle(c.graph, scorer, c.x), greedy_plain(c.graph, scorer, c.x));
  }
  // Integer weights produce many ties.
  for (int t = 0; t < 300; ++t) {
    auto c = random_case(gen, 10, 5);
    for (auto& w : c.weights) w = std::floor(w + 0.5);
    const auto configs = wrap(c.configs);
    const auto scorer = make_coverage_scorer(c.graph, configs, c.weights);
    EXPECT_EQ(greedy_oracle(c.graph, scorer, c.x), greedy_plain(c.graph, scorer, c.x));
  }
}

TEST(Greedy, ChainIsMonotoneWithShrinkingGains) {
  const auto g = desk_cover_graph(5);
  const auto law = datagen::gen_ssc_instance(g, 6);
  std::vector<Configuration<SscConfig>> configs;
  std::vector<double> w;
  for (std::uint64_t i = 0; i < 40; ++i) {
    configs.push_back({i, i, sample_ssc_config(g, SscDist::True, &law, i)});
    w.push_back(0.5 + static_cast<double>(i % 5));
  }
  const auto scorer = make_coverage_scorer(g, configs, w);
  SscInput x{{}, 20};
  for (int r = 0; r < 500; r += 3) x.targets.push_back(r);
  const auto trace = greedy_trace(g, scorer, x);
  ASSERT_GE(trace.size(), 3u);
  EXPECT_EQ(trace.front(), 0.0);
  for (std::size_t t = 1; t < trace.size(); ++t) {
    EXPECT_GE(trace[t], trace[t - 1]);
    if (t >= 2) {
      EXPECT_LE(trace[t] - trace[t - 1], trace[t - 1] - trace[t - 2] + 1e-9);
    }
  }
}

TEST(ExpectedCoverage, Examples) {
  const CoverGraph one(1, 1, {{0, 0}});
  EXPECT_DOUBLE_EQ(expected_coverage(one, {{0}, 1}, SscSolution{{0}}, {{0.5}}), 0.5);
  const CoverGraph two(2, 1, {{0, 0}, {1, 0}});
  EXPECT_DOUBLE_EQ(expected_coverage(two, {{0}, 2}, SscSolution{{0, 1}}, {{0.5, 0.5}}), 0.75);
}

TEST(ExpectedCoverage, BoundedByTargetCount) {
  const auto g = desk_cover_graph(9, 30, 60, 2, 8);
  const auto law = datagen::gen_ssc_instance(g, 10);
  SscInput x{{}, 10};
  for (int r = 0; r < 60; r += 2) x.targets.push_back(r);
  SscSolution all;
  for (int v = 0; v < 10; ++v) all.nodes.push_back(v);
  EXPECT_LT(expected_coverage(g, x, all, law), static_cast<double>(x.targets.size()));

  // Certain edges cover every target exactly.
  const CoverGraph sure(2, 2, {{0, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(expected_coverage(sure, {{0, 1}, 2}, SscSolution{{0, 1}}, {{1.0, 1.0}}), 2.0);
}

TEST(ExpectedCoverage, MatchesMonteCarlo) {
  constexpr int kDraws = 100000;
  std::mt19937_64 gen(41);
  for (int t = 0; t < 20; ++t) {
    const auto g = desk_cover_graph(gen(), 12, 20, 1, 6);
    const auto law = datagen::gen_ssc_instance(g, gen());
    SscInput x{{}, 4};
    for (int r = 0; r < 20; ++r)
      if (gen() % 2) x.targets.push_back(r);
    if (x.targets.empty()) x.targets.push_back(0);
    SscSolution y;
    for (int v = 0; v < 12; v += 3) y.nodes.push_back(v);
    double sum = 0, sq = 0;
    const std::uint64_t base = gen();
    for (int i = 0; i < kDraws; ++i) {
      const double v =
          coverage_value(g, sample_ssc_config(g, SscDist::True, &law, derive_seed(base, i)), x, y);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / kDraws;
    const double se = std::sqrt((sq / kDraws - mean * mean) / kDraws);
    EXPECT_LE(std::fabs(mean - expected_coverage(g, x, y, law)), 3 * se) << "case " << t;
  }
}

TEST(Sampling, UniformKeepFrequency) {
  constexpr int kDraws = 100000;
  const CoverGraph g(2, 2, {{0, 0}, {0, 1}, {1, 1}});
  std::vector<int> kept(3, 0);
  for (int i = 0; i < kDraws; ++i) {
    const auto c = sample_ssc_config(g, SscDist::Uni, nullptr, static_cast<std::uint64_t>(i));
    for (std::size_t e = 0; e < 3; ++e) kept[e] += c.has(e);
  }
  for (int k : kept)
    EXPECT_NEAR(static_cast<double>(k) / kDraws, 0.1, 3 * std::sqrt(0.09 / kDraws));
}

TEST(Sampling, CertainLawKeepsEverything) {
  const auto g = desk_cover_graph(3, 20, 40);
  const EdgeProbLaw sure{std::vector<double>(g.edge_count(), 1.0)};
  const auto c = sample_ssc_config(g, SscDist::True, &sure, 5);
  for (std::size_t e = 0; e < g.edge_count(); ++e) EXPECT_TRUE(c.has(e));
}

TEST(Sampling, Deterministic) {
  const auto g = desk_cover_graph(3);
  const auto law = datagen::gen_ssc_instance(g, 4);
  EXPECT_EQ(sample_ssc_config(g, SscDist::Uni, nullptr, 1), sample_ssc_config(g, SscDist::Uni, nullptr, 1));
  EXPECT_EQ(sample_ssc_config(g, SscDist::True, &law, 2), sample_ssc_config(g, SscDist::True, &law, 2));
  EXPECT_NE(sample_ssc_config(g, SscDist::True, &law, 2), sample_ssc_config(g, SscDist::True, &law, 3));
}

TEST(RandBaseline, ShapeAndErrors) {
  const auto g = desk_cover_graph(1, 10, 30);
  const SscInput all{{0, 1, 2}, 10};
  auto y = rand_baseline(g, all, 3);
  EXPECT_EQ(y.nodes, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  for (int k = 1; k <= 10; ++k) {
    y = rand_baseline(g, {{0}, k}, static_cast<std::uint64_t>(k));
    EXPECT_EQ(static_cast<int>(y.nodes.size()), k);
    EXPECT_TRUE(std::is_sorted(y.nodes.begin(), y.nodes.end()));
  }
  EXPECT_EQ(rand_baseline(g, {{0}, 4}, 9), rand_baseline(g, {{0}, 4}, 9));
  EXPECT_THROW(rand_baseline(g, {{0}, 11}, 1), Error);
}

TEST(RandBaseline, NoBetterThanGreedyOnTrueConfigs) {
  const auto g = desk_cover_graph(2021);
  const auto law = datagen::gen_ssc_instance(g, 1);
  std::vector<Configuration<SscConfig>> configs;
  for (std::uint64_t i = 0; i < 160; ++i)
    configs.push_back({i, i, sample_ssc_config(g, SscDist::True, &law, i)});
  const auto scorer = make_coverage_scorer(g, configs, std::vector<double>(160, 1.0));
  SscInput x{{}, 10};
  for (int r = 0; r < 500; r += 5) x.targets.push_back(r);
  const double greedy = expected_coverage(g, x, greedy_oracle(g, scorer, x), law);
  double rand = 0;
  for (std::uint64_t s = 0; s < 100; ++s) rand += expected_coverage(g, x, rand_baseline(g, x, s), law);
  EXPECT_LE(rand / 100, greedy);
}

TEST(Validation, InputsAndSolutions) {
  const auto g = three_sets();
  EXPECT_THROW(validate_input(g, {{}, 1}), Error);
  EXPECT_THROW(validate_input(g, {{0, 0}, 1}), Error);
  EXPECT_THROW(validate_input(g, {{0}, 4}), Error);
  EXPECT_THROW(validate_input(g, {{3}, 1}), Error);
  EXPECT_THROW(validate_solution(g, {{0}, 1}, SscSolution{{0, 1}}), Error);
  EXPECT_THROW(validate_solution(g, {{0}, 2}, SscSolution{{1, 0}}), Error);
  EXPECT_NO_THROW(validate_solution(g, {{0}, 2}, SscSolution{{0, 1}}));
  EXPECT_THROW(validate_law(g, {{0.5, 0.5, 0.5, 0.5, 1.0}}), Error);
  EXPECT_THROW(CoverGraph(2, 2, {{0, 0}, {0, 0}}), Error);
}
