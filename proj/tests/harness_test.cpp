#include <gtest/gtest.h>

#include <set>

#include "usco/harness.hpp"

using namespace usco;
using namespace usco::harness;

namespace {

template <class F>
struct Setup {
  typename F::Instance inst;
  std::vector<typename F::Pair> pairs;
  ExperimentConfig config;
};

template <class F>
Setup<F> small_setup(const Json& params, const std::vector<std::string>& dists, std::uint64_t k) {
  Setup<F> s;
  s.inst = F::gen_instance(params, 1);
  s.pairs = F::gen_pairs(s.inst, 120, 2);
  s.config.dataset = "small";
  s.config.train_size = 40;
  s.config.test_size = 80;
  s.config.runs = 2;
  s.config.ks = {k};
  s.config.master_seed = 3;
  for (const auto& d : dists) s.config.pools.push_back({d, derive_seed(4, hash_tag(d)), 400});
  return s;
}

const ResultRow& row(const ExperimentResult& r, const std::string& dist) {
  for (const auto& x : r.rows)
    if (x.dist == dist) return x;
  throw std::runtime_error("no row " + dist);
}

}  // namespace

TEST(PerformanceRatio, Examples) {
  EXPECT_DOUBLE_EQ(*performance_ratio(Sense::Minimize, 12, 10), 1.2);
  EXPECT_DOUBLE_EQ(*performance_ratio(Sense::Maximize, 8, 10), 1.25);
  EXPECT_DOUBLE_EQ(*performance_ratio(Sense::Minimize, 7, 7), 1.0);
  EXPECT_DOUBLE_EQ(*performance_ratio(Sense::Maximize, 7, 7), 1.0);
  EXPECT_FALSE(performance_ratio(Sense::Maximize, 0, 10).has_value());
  EXPECT_FALSE(performance_ratio(Sense::Minimize, 3, 0).has_value());
  // A prediction may beat an approximate label.
  EXPECT_LT(*performance_ratio(Sense::Maximize, 10.1, 10), 1.0);
}

TEST(Summary, MeanStd) {
  const auto [m, s] = mean_std({1, 2, 3});
  EXPECT_DOUBLE_EQ(m, 2.0);
  EXPECT_DOUBLE_EQ(s, 1.0);
  EXPECT_EQ(mean_std({4}).second, 0.0);
  EXPECT_TRUE(std::isnan(mean_std({}).first));
}

TEST(Summary, CsvLayout) {
  std::vector<ResultRow> rows{{"d", "phi_true", 160, 5, 5, 1.0123456, 0.01, 0, std::nullopt},
                              {"d", "Rand", 0, 0, 5, std::nan(""), std::nan(""), 3, 1.5}};
  EXPECT_EQ(to_csv(rows),
            "dataset,dist,K,runs,mean_ratio,std_ratio,excluded,wall_time_s\n"
            "d,phi_true,160,5,1.012346,0.010000,0,\n"
            "d,Rand,0,0,nan,nan,3,1.500\n");
}

TEST(Split, DisjointDeterministicAndRunSpecific) {
  const auto [tr, te] = split_indices(100, 30, 50, 7, 0);
  EXPECT_EQ(tr.size(), 30u);
  EXPECT_EQ(te.size(), 50u);
  std::set<std::size_t> all(tr.begin(), tr.end());
  all.insert(te.begin(), te.end());
  EXPECT_EQ(all.size(), 80u);
  EXPECT_LT(*all.rbegin(), 100u);
  EXPECT_EQ(split_indices(100, 30, 50, 7, 0), split_indices(100, 30, 50, 7, 0));
  EXPECT_NE(split_indices(100, 30, 50, 7, 0), split_indices(100, 30, 50, 7, 1));
  EXPECT_THROW(split_indices(10, 6, 5, 7, 0), Error);
}

TEST(Config, Validation) {
  auto s = small_setup<SbmFamily>({{"n", 8}}, {"phi_true"}, 16);
  EXPECT_EQ(effective_trainer(s.config, 160).c_reg, 1.6);
  auto c = s.config;
  c.runs = 0;
  EXPECT_THROW(run_experiment<SbmFamily>(s.inst, s.pairs, c), Error);
  c = s.config;
  c.ks = {401};
  EXPECT_THROW(run_experiment<SbmFamily>(s.inst, s.pairs, c), Error);
  c = s.config;
  c.test_size = 81;
  try {
    run_experiment<SbmFamily>(s.inst, s.pairs, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

TEST(Experiment, SingleRunFullPoolIsDeterministic) {
  auto s = small_setup<SbmFamily>({{"n", 8}}, {"phi_1"}, 40);
  s.config.runs = 1;
  s.config.pools[0].size = 40;
  const auto a = run_experiment<SbmFamily>(s.inst, s.pairs, s.config);
  const auto b = run_experiment<SbmFamily>(s.inst, s.pairs, s.config);
  EXPECT_EQ(to_csv(a.rows), to_csv(b.rows));
  ASSERT_EQ(a.rows.size(), 2u);
  EXPECT_EQ(a.rows[0].runs, 1);
  EXPECT_EQ(a.rows[1].dist, "Rand");
  EXPECT_EQ(a.records.size(), 2u);
}

TEST(Experiment, CsvBytesRepeatAcrossFamilies) {
  auto ssp = small_setup<SspFamily>({{"levels", 5}, {"edges", 70}}, {"phi_exp", "phi_true"}, 16);
  EXPECT_EQ(to_csv(run_experiment<SspFamily>(ssp.inst, ssp.pairs, ssp.config).rows),
            to_csv(run_experiment<SspFamily>(ssp.inst, ssp.pairs, ssp.config).rows));
  auto ssc = small_setup<SscFamily>({{"left", 40}, {"right", 100}, {"pair_scale", 60}}, {"phi_true"}, 16);
  EXPECT_EQ(to_csv(run_experiment<SscFamily>(ssc.inst, ssc.pairs, ssc.config).rows),
            to_csv(run_experiment<SscFamily>(ssc.inst, ssc.pairs, ssc.config).rows));
}

TEST(Experiment, ExactFamiliesNeverBeatTheirLabels) {
  auto s = small_setup<SbmFamily>({{"n", 10}}, {"phi_uni"}, 8);
  const auto problem = SbmFamily::make_problem(s.inst);
  const io::PoolRef pool = s.config.pools[0];
  auto sample = io::draw_sample<SbmFamily>(s.inst, pool, datagen::draw_pool_ids(pool.size, 8, 5));
  ScoreModel<SbmFamily::Payload> model{sample, {1, 0.5, 0, 2, 0.1, 3, 1, 1}, 1.0, Sense::Minimize};
  for (const auto& p : s.pairs) {
    const auto y = predict(problem, model, p.x);
    const auto r = performance_ratio(Sense::Minimize, SbmFamily::expected_objective(s.inst, p.x, y),
                                     SbmFamily::expected_objective(s.inst, p.x, p.y_ref));
    ASSERT_TRUE(r);
    EXPECT_GE(*r, 1.0 - 1e-12);
  }

  auto t = small_setup<SspFamily>({{"levels", 5}, {"edges", 70}}, {"phi_true"}, 8);
  const auto sp = SspFamily::make_problem(t.inst);
  auto ss = io::draw_sample<SspFamily>(t.inst, t.config.pools[0], datagen::draw_pool_ids(400, 8, 6));
  ScoreModel<SspFamily::Payload> sm{ss, WeightVector(8, 1.0), 1.0, Sense::Minimize};
  for (const auto& p : t.pairs) {
    const auto y = predict(sp, sm, p.x);
    EXPECT_GE(SspFamily::expected_objective(t.inst, p.x, y),
              SspFamily::expected_objective(t.inst, p.x, p.y_ref) * (1 - 1e-12));
  }
}

TEST(Experiment, TrueLawBeatsBaselines) {
  auto sbm = small_setup<SbmFamily>({{"n", 10}}, {"phi_true"}, 32);
  const auto rb = run_experiment<SbmFamily>(sbm.inst, sbm.pairs, sbm.config);
  EXPECT_LT(row(rb, "phi_true").mean_ratio, row(rb, "Rand").mean_ratio);

  auto ssp = small_setup<SspFamily>({{"levels", 5}, {"edges", 70}}, {"phi_true"}, 32);
  const auto rp = run_experiment<SspFamily>(ssp.inst, ssp.pairs, ssp.config);
  EXPECT_LT(row(rp, "phi_true").mean_ratio, row(rp, "Base").mean_ratio);

  auto ssc = small_setup<SscFamily>({{"left", 40}, {"right", 100}, {"pair_scale", 60}}, {"phi_true"}, 32);
  const auto rc = run_experiment<SscFamily>(ssc.inst, ssc.pairs, ssc.config);
  EXPECT_LT(row(rc, "phi_true").mean_ratio, row(rc, "Rand").mean_ratio);

  for (const auto* r : {&rb, &rp, &rc})
    for (const auto& rec : r->records) EXPECT_EQ(rec.contract_breach, "") << rec.dist;
}

TEST(Experiment, StageFailuresAreRecordedPerRun) {
  auto s = small_setup<SbmFamily>({{"n", 8}}, {"phi_true"}, 8);
  s.config.trainer.qp_max_iter = 1;
  s.config.trainer.qp_tol = 1e-300;
  const auto r = run_experiment<SbmFamily>(s.inst, s.pairs, s.config);
  const auto& bad = row(r, "phi_true");
  EXPECT_EQ(bad.runs, 0);
  EXPECT_EQ(bad.requested_runs, 2);
  EXPECT_TRUE(std::isnan(bad.mean_ratio));
  for (const auto& rec : r.records)
    if (rec.dist == "phi_true") {
      EXPECT_FALSE(rec.error.empty());
    }
}

TEST(Presets, DeskShapes) {
  EXPECT_EQ(preset_for("ssp").instance_params.at("levels"), 6);
  EXPECT_EQ(preset_for("ssc").instance_params.at("left"), 200);
  EXPECT_EQ(preset_for("ssc").instance_params.at("right"), 500);
  EXPECT_EQ(preset_for("sbm").instance_params.at("n"), 32);
  for (const auto* f : {"ssp", "ssc", "sbm"}) {
    const auto p = preset_for(f);
    EXPECT_EQ(p.pool_size, 10000u);
    EXPECT_EQ(p.train_size, 160u);
    EXPECT_EQ(p.runs, 5);
  }
  EXPECT_THROW(preset_for("tsp"), Error);
}
