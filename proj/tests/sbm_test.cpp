#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "support.hpp"
#include "usco/datagen.hpp"
#include "usco/sbm.hpp"

using namespace usco;
using namespace usco::sbm;
namespace ts = testing_support;

namespace {

CostMatrix random_matrix(std::mt19937_64& gen, std::size_t n, bool integer) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> k(0, 3);
  CostMatrix c{n, n, std::vector<double>(n * n)};
  for (auto& v : c.values) v = integer ? k(gen) : u(gen);
  return c;
}

SbmInput identity_input(int n) {
  SbmInput x;
  for (int i = 0; i < n; ++i) {
    x.left.push_back(i);
    x.right.push_back(i);
  }
  return x;
}

std::vector<Configuration<SbmConfig>> wrap(const std::vector<SbmConfig>& cs) {
  std::vector<Configuration<SbmConfig>> out;
  for (std::size_t i = 0; i < cs.size(); ++i) out.push_back({i, i, cs[i]});
  return out;
}

}  // namespace

TEST(Hungarian, Examples) {
  const CostMatrix diag{2, 2, {1, 2, 2, 1}};
  EXPECT_EQ(min_cost_assignment(diag), (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(ts::assignment_cost(diag, {0, 1}), 2.0);

  const CostMatrix anti{2, 2, {5, 1, 1, 5}};
  EXPECT_EQ(min_cost_assignment(anti), (std::vector<int>{1, 0}));
}

TEST(Hungarian, OracleMapsColumnsToRightIds) {
  const SbmInput x{{1, 4}, {0, 3}};
  const auto y = hungarian_oracle(CostMatrix{2, 2, {5, 1, 1, 5}}, x);
  EXPECT_EQ(y.right_of, (std::vector<int>{3, 0}));
}

TEST(Hungarian, MatchesPermutationEnumeration) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 100; ++t) {
    const auto c = random_matrix(gen, 6, false);
    const auto [best, arg] = ts::brute_assignment(c);
    const auto got = min_cost_assignment(c);
    EXPECT_NEAR(ts::assignment_cost(c, got), best, 1e-9) << "case " << t;
    EXPECT_EQ(got, arg) << "case " << t;
  }
}

TEST(Hungarian, SmallSizesAndTiesAreLexicographic) {
  std::mt19937_64 gen(4);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int t = 0; t < 60; ++t) {
      const auto c = random_matrix(gen, n, true);
      const auto [best, arg] = ts::brute_assignment(c);
      const auto got = min_cost_assignment(c);
      EXPECT_EQ(ts::assignment_cost(c, got), best);
      EXPECT_EQ(got, arg) << "n=" << n << " case " << t;
    }
  }
  const CostMatrix flat{3, 3, std::vector<double>(9, 1.0)};
  EXPECT_EQ(min_cost_assignment(flat), (std::vector<int>{0, 1, 2}));
}

TEST(Hungarian, DomainErrors) {
  EXPECT_THROW(min_cost_assignment(CostMatrix{2, 3, std::vector<double>(6, 1.0)}), Error);
  EXPECT_THROW(min_cost_assignment(CostMatrix{2, 2, {1, NAN, 1, 1}}), Error);
  EXPECT_THROW(min_cost_assignment(CostMatrix{2, 2, {1, INFINITY, 1, 1}}), Error);
  try {
    min_cost_assignment(CostMatrix{2, 3, std::vector<double>(6, 1.0)});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Sampling, QCollapsesToMean) {
  const auto g = datagen::gen_sbm_instance(5, 11);
  const auto c = sample_sbm_config(g, {SbmDist::Q, 1e-12}, 9);
  for (std::size_t e = 0; e < g.mu.size(); ++e) EXPECT_NEAR(c.cost[e], g.mu[e], 1e-10);
}

TEST(Sampling, UniformRangeAndPositivity) {
  const auto g = datagen::gen_sbm_instance(8, 12);
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (double w : sample_sbm_config(g, {SbmDist::Uni}, s).cost) {
      EXPECT_GE(w, 1.0);
      EXPECT_LE(w, 10.0);
    }
    for (double w : sample_sbm_config(g, {SbmDist::Q, 10.0}, s).cost) EXPECT_GE(w, kWeightFloor);
    for (double w : sample_sbm_config(g, {SbmDist::True}, s).cost) EXPECT_GT(w, 0.0);
  }
  EXPECT_THROW(sample_sbm_config(g, {SbmDist::Q, 0.0}, 1), Error);
  EXPECT_THROW(sample_sbm_config(g, {SbmDist::Q, -1.0}, 1), Error);
}

TEST(Sampling, Deterministic) {
  const auto g = datagen::gen_sbm_instance(6, 13);
  EXPECT_EQ(sample_sbm_config(g, {SbmDist::True}, 5), sample_sbm_config(g, {SbmDist::True}, 5));
  EXPECT_NE(sample_sbm_config(g, {SbmDist::True}, 5), sample_sbm_config(g, {SbmDist::True}, 6));
}

TEST(Sampling, TrueLawMeanMatchesMu) {
  constexpr int kDraws = 100000;
  const MatchGraph g{2, {1.0, 4.0, 7.5, 10.0}};
  std::vector<double> sum(4, 0.0);
  for (int i = 0; i < kDraws; ++i) {
    const auto c = sample_sbm_config(g, {SbmDist::True}, derive_seed(77, i));
    for (std::size_t e = 0; e < 4; ++e) sum[e] += c.cost[e];
  }
  for (std::size_t e = 0; e < 4; ++e) {
    const double se = kSigmaRatio * g.mu[e] / std::sqrt(static_cast<double>(kDraws));
    EXPECT_NEAR(sum[e] / kDraws, g.mu[e], 3 * se) << "edge " << e;
  }
}

TEST(ExpectedCost, Examples) {
  const MatchGraph one{1, {4.0}};
  EXPECT_DOUBLE_EQ(expected_matching_cost(one, {{0}, {0}}, {{0}}), 4.0);
  const MatchGraph two{2, {3.0, 9.0, 9.0, 5.0}};
  EXPECT_DOUBLE_EQ(expected_matching_cost(two, {{0, 1}, {0, 1}}, {{0, 1}}), 8.0);
}

TEST(ExpectedCost, RejectsInvalidMatchings) {
  const MatchGraph two{2, {3.0, 9.0, 9.0, 5.0}};
  EXPECT_THROW(expected_matching_cost(two, {{0, 1}, {0, 1}}, {{0, 0}}), Error);
  EXPECT_THROW(expected_matching_cost(two, {{0, 1}, {0, 1}}, {{0}}), Error);
  EXPECT_THROW(expected_matching_cost(two, {{0, 1}, {0}}, {{0, 1}}), Error);
  EXPECT_THROW(validate_graph(MatchGraph{2, {3.0, 9.0, 9.0, 11.0}}), Error);
}

TEST(ExpectedCost, RelabelingInvariance) {
  std::mt19937_64 gen(21);
  const int n = 6;
  const auto g = datagen::gen_sbm_instance(n, 21);
  const SbmInput x{{0, 2, 5}, {1, 3, 4}};
  const SbmMatching y{{4, 1, 3}};
  std::vector<int> pl(n), pr(n);
  std::iota(pl.begin(), pl.end(), 0);
  std::iota(pr.begin(), pr.end(), 0);
  std::shuffle(pl.begin(), pl.end(), gen);
  std::shuffle(pr.begin(), pr.end(), gen);
  MatchGraph h{n, std::vector<double>(g.mu.size())};
  for (int l = 0; l < n; ++l)
    for (int r = 0; r < n; ++r) h.mu[static_cast<std::size_t>(pl[l] * n + pr[r])] = g.mean(l, r);
  // Relabeled pairs, listed in sorted left order as the input requires.
  std::vector<std::pair<int, int>> edges;
  for (std::size_t a = 0; a < 3; ++a) edges.push_back({pl[x.left[a]], pr[y.right_of[a]]});
  std::sort(edges.begin(), edges.end());
  SbmInput hx;
  SbmMatching hy;
  for (auto [l, r] : edges) {
    hx.left.push_back(l);
    hx.right.push_back(r);
    hy.right_of.push_back(r);
  }
  std::sort(hx.right.begin(), hx.right.end());
  EXPECT_NEAR(expected_matching_cost(h, hx, hy), expected_matching_cost(g, x, y), 1e-12);
}

TEST(ExpectedCost, MatchesMonteCarlo) {
  constexpr int kDraws = 100000;
  std::mt19937_64 gen(58);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(gen() % 4);
    const auto g = datagen::gen_sbm_instance(n, gen());
    const auto x = identity_input(n);
    SbmMatching y{x.right};
    std::shuffle(y.right_of.begin(), y.right_of.end(), gen);
    const SbmProblem problem(n);
    double sum = 0, sq = 0;
    const std::uint64_t base = gen();
    for (int i = 0; i < kDraws; ++i) {
      const double v = problem.objective(x, y, sample_sbm_config(g, {SbmDist::True}, derive_seed(base, i)));
      sum += v;
      sq += v * v;
    }
    const double mean = sum / kDraws;
    const double se = std::sqrt((sq / kDraws - mean * mean) / kDraws);
    EXPECT_NEAR(mean, expected_matching_cost(g, x, y), 3 * se) << "case " << t;
  }
}

TEST(RandBaseline, ShapeAndDeterminism) {
  EXPECT_EQ(rand_baseline({{3}, {7}}, 1).right_of, (std::vector<int>{7}));
  const SbmInput x{{0, 1, 2, 3, 4}, {2, 3, 5, 8, 9}};
  std::set<std::vector<int>> seen;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto y = rand_baseline(x, s);
    auto sorted = y.right_of;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, x.right);
    seen.insert(y.right_of);
  }
  EXPECT_GT(seen.size(), 50u);
  EXPECT_EQ(rand_baseline(x, 9), rand_baseline(x, 9));
}

TEST(Predict, AggregatedOracleMatchesBruteForce) {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> wd(0.0, 2.0);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(gen() % 4);
    const auto g = datagen::gen_sbm_instance(n, gen());
    std::vector<SbmConfig> cs;
    WeightVector w;
    for (int k = 0; k < 3; ++k) {
      cs.push_back(sample_sbm_config(g, {SbmDist::Uni}, gen()));
      w.push_back(wd(gen));
    }
    const SbmProblem problem(n);
    ScoreModel<SbmConfig> model{{"phi_uni", 0, wrap(cs)}, w, 1.0, Sense::Minimize};
    const auto x = identity_input(n);
    const auto y = predict(problem, model, x);

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      best = std::min(best, affine_score(problem, model, x, SbmMatching{perm}));
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(affine_score(problem, model, x, y), best, 1e-9) << "case " << t;
  }
}

TEST(Problem, SubsetInputsAndFeasibility) {
  const auto g = datagen::gen_sbm_instance(6, 31);
  const SbmProblem problem(6);
  const auto configs = wrap({sample_sbm_config(g, {SbmDist::Uni}, 1)});
  const auto scorer = problem.make_scorer(configs, std::vector<double>{1.0});
  const SbmInput x{{1, 3}, {0, 5}};
  const auto y = problem.solve(x, scorer);
  problem.check_feasible(x, y);
  const double c00 = scorer(1, 0) + scorer(3, 5), c01 = scorer(1, 5) + scorer(3, 0);
  EXPECT_DOUBLE_EQ(problem.objective(x, y, configs[0].payload), std::min(c00, c01));
  EXPECT_THROW(problem.check_feasible(x, SbmMatching{{0, 0}}), Error);
  EXPECT_THROW(problem.check_feasible(x, SbmMatching{{0, 4}}), Error);
  EXPECT_THROW(problem.check_feasible(SbmInput{{1, 1}, {0, 5}}, SbmMatching{{0, 5}}), Error);
  EXPECT_THROW(problem.make_scorer(configs, std::vector<double>{1.0, 2.0}), Error);
}
