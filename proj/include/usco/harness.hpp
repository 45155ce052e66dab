#pragma once

// Experiment orchestration: repeated randomized train/test runs over a grid of
// (distribution, K) cells, baselines, and the result table.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usco/family.hpp"
#include "usco/io.hpp"

namespace usco::harness {

struct ExperimentConfig {
  std::string dataset = "desk";
  std::vector<io::PoolRef> pools;
  std::vector<std::uint64_t> ks;
  std::size_t train_size = 160;
  std::size_t test_size = 640;
  int runs = 5;
  TrainerParams trainer;
  bool auto_c_reg = true;  // c_reg = 0.01 * train_size, overriding trainer.c_reg
  std::uint64_t master_seed = 0;
  bool perturb = false;
  bool baselines = true;
  bool timing = false;  // fill wall_time_s; off keeps the table byte-reproducible
};

void validate(const ExperimentConfig& config);

struct RunRecord {
  std::string dist;
  std::uint64_t k = 0;
  int run = 0;
  bool ok = false;
  double mean_ratio = 0.0;
  std::size_t excluded = 0;
  std::string error;
  std::string contract_breach;  // empty when the trainer contract held
  bool converged = false;
  std::size_t working_set_size = 0;
  double seconds = 0.0;
};

struct ResultRow {
  std::string dataset;
  std::string dist;
  std::uint64_t k = 0;  // 0 for baseline rows
  int runs = 0;         // successful runs
  int requested_runs = 0;
  double mean_ratio = std::nan("");
  double std_ratio = std::nan("");
  std::size_t excluded = 0;
  std::optional<double> wall_time_s;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<RunRecord> records;
};

inline constexpr const char* kCsvHeader =
    "dataset,dist,K,runs,mean_ratio,std_ratio,excluded,wall_time_s";

std::string to_csv(const std::vector<ResultRow>& rows);

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Train/test split of run `run`: a seeded permutation of the pair indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t pair_count, std::size_t train_size, std::size_t test_size,
    std::uint64_t master_seed, int run);

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& dist, std::uint64_t k, int run);

/// Trainer parameters after applying the automatic c_reg rule.
TrainerParams effective_trainer(const ExperimentConfig& config, std::size_t m);

/// Mean ground-truth ratio of predictions against labels; undefined ratios are counted.
template <class F>
std::pair<double, std::size_t> evaluate_solutions(const typename F::Instance& inst,
                                                  const std::vector<typename F::Pair>& test,
                                                  const std::vector<typename F::Solution>& pred,
                                                  Sense sense) {
  std::vector<std::optional<double>> ratios(test.size());
  parallel_for(test.size(), [&](std::size_t i) {
    const double f_pred = F::expected_objective(inst, test[i].x, pred[i]);
    const double f_ref = F::expected_objective(inst, test[i].x, test[i].y_ref);
    ratios[i] = performance_ratio(sense, f_pred, f_ref);
  });
  double sum = 0.0;
  std::size_t used = 0, excluded = 0;
  for (const auto& r : ratios) {
    if (r) {
      sum += *r;
      ++used;
    } else {
      ++excluded;
    }
  }
  return {used ? sum / static_cast<double>(used) : std::nan(""), excluded};
}

/// Prediction weights: the seed vector, or its Gaussian perturbation clamped at 0.
template <class F>
WeightVector prediction_weights(const TrainOutcome& outcome, std::size_t m, double alpha,
                                bool perturb, std::uint64_t seed) {
  if (!perturb) return outcome.seed_weights;
  const double beta = compute_beta(outcome.seed_weights, static_cast<std::int64_t>(m), alpha);
  auto w = perturb_weights(outcome.seed_weights, beta, seed);
  for (double& v : w) v = std::max(v, 0.0);
  return w;
}

template <class F>
ExperimentResult run_experiment(const typename F::Instance& inst,
                                const std::vector<typename F::Pair>& pairs,
                                const ExperimentConfig& config) {
  validate(config);
  require(config.train_size + config.test_size <= pairs.size(), ErrorKind::Config,
          "experiment: train_size + test_size = " +
              std::to_string(config.train_size + config.test_size) + " exceeds the " +
              std::to_string(pairs.size()) + " available pairs");
  for (const auto& pool : config.pools)
    for (auto k : config.ks)
      require(k <= pool.size, ErrorKind::Config,
              "experiment: K = " + std::to_string(k) + " exceeds size of pool '" + pool.dist + "'");

  using Clock = std::chrono::steady_clock;
  const auto problem = F::make_problem(inst);
  const Sense sense = problem.sense();
  const double alpha = problem.alpha();
  const TrainerParams trainer = effective_trainer(config, config.train_size);
  const int runs = config.runs;

  std::vector<std::vector<typename F::Pair>> train_sets(runs), test_sets(runs);
  for (int r = 0; r < runs; ++r) {
    const auto [tr, te] =
        split_indices(pairs.size(), config.train_size, config.test_size, config.master_seed, r);
    for (auto i : tr) train_sets[r].push_back(pairs[i]);
    for (auto i : te) test_sets[r].push_back(pairs[i]);
  }

  ExperimentResult result;
  auto summarize = [&](const std::string& dist, std::uint64_t k, const std::vector<RunRecord>& recs,
                       double seconds) {
    ResultRow row{config.dataset, dist, k, 0, runs, std::nan(""), std::nan(""), 0, std::nullopt};
    std::vector<double> means;
    for (const auto& rec : recs) {
      if (!rec.ok) continue;
      means.push_back(rec.mean_ratio);
      row.excluded += rec.excluded;
    }
    row.runs = static_cast<int>(means.size());
    if (!means.empty()) std::tie(row.mean_ratio, row.std_ratio) = mean_std(means);
    if (config.timing) row.wall_time_s = seconds;
    result.rows.push_back(row);
    result.records.insert(result.records.end(), recs.begin(), recs.end());
  };

  for (const auto& pool : config.pools) {
    for (auto k : config.ks) {
      const auto start = Clock::now();
      std::vector<RunRecord> recs(runs);
      parallel_for(static_cast<std::size_t>(runs), [&](std::size_t ri) {
        const int r = static_cast<int>(ri);
        auto& rec = recs[ri];
        rec.dist = pool.dist;
        rec.k = k;
        rec.run = r;
        const auto t0 = Clock::now();
        try {
          const auto seed = cell_seed(config.master_seed, pool.dist, k, r);
          const auto ids = datagen::draw_pool_ids(pool.size, k, seed);
          auto sample = io::draw_sample<F>(inst, pool, ids);
          const auto outcome = train_one_slack(problem, train_sets[r], sample, trainer);
          rec.contract_breach = check_contract(outcome, trainer);
          rec.converged = outcome.converged;
          rec.working_set_size = outcome.working_set_size;
          ScoreModel<typename F::Payload> model{
              std::move(sample),
              prediction_weights<F>(outcome, config.train_size, alpha, config.perturb,
                                    derive_seed(seed, "perturb")),
              alpha, sense};
          const auto& test = test_sets[r];
          std::vector<typename F::Solution> pred(test.size());
          const auto scorer = problem.make_scorer(model.sample.configs, model.weights);
          parallel_for(test.size(), [&](std::size_t i) { pred[i] = problem.solve(test[i].x, scorer); });
          std::tie(rec.mean_ratio, rec.excluded) = evaluate_solutions<F>(inst, test, pred, sense);
          rec.ok = std::isfinite(rec.mean_ratio);
          if (!rec.ok) rec.error = "every ratio undefined";
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
        rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      });
      summarize(pool.dist, k, recs, std::chrono::duration<double>(Clock::now() - start).count());
    }
  }

  if (config.baselines) {
    const auto start = Clock::now();
    const std::string name(F::baseline_name);
    std::vector<RunRecord> recs(runs);
    for (int r = 0; r < runs; ++r) {
      auto& rec = recs[r];
      rec.dist = name;
      rec.run = r;
      try {
        const auto& test = test_sets[r];
        const auto seed = derive_seed(derive_seed(config.master_seed, "baseline"),
                                      static_cast<std::uint64_t>(r));
        std::vector<typename F::Solution> pred(test.size());
        parallel_for(test.size(), [&](std::size_t i) {
          pred[i] = F::baseline(inst, test[i].x, derive_seed(seed, i));
        });
        std::tie(rec.mean_ratio, rec.excluded) = evaluate_solutions<F>(inst, test, pred, sense);
        rec.ok = std::isfinite(rec.mean_ratio);
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
    }
    summarize(name, 0, recs, std::chrono::duration<double>(Clock::now() - start).count());
  }
  return result;
}

// ---------------------------------------------------------------- presets

/// Desk-scale stand-in for one of the paper's result tables.
struct Preset {
  std::string dataset;
  Json instance_params;
  std::uint64_t pool_size = 10000;
  std::vector<std::string> dists;
  std::vector<std::uint64_t> ks;
  std::size_t train_size = 160;
  std::size_t test_size = 640;
  int runs = 5;
};

/// ssp: 64-node Kronecker graph, phi_exp / phi_norm / phi_true.
/// ssc: |L| = 200, |R| = 500 coverage graph, phi_uni / phi_true.
/// sbm: n = 32 complete bipartite graph, phi_uni / phi_true / phi_10 / phi_5 / phi_1 / phi_0.3.
Preset preset_for(std::string_view family);

struct ReproduceOptions {
  std::uint64_t seed = 2021;
  std::vector<std::string> dists;  // empty: preset list
  std::vector<std::uint64_t> ks;   // empty: preset list
  std::optional<int> runs;
  std::optional<std::size_t> train_size;
  std::optional<std::size_t> test_size;
  std::optional<double> c_reg;
  std::optional<double> eta;
  std::optional<double> margin_factor;
  std::optional<double> tol;
  bool perturb = false;
  bool timing = false;
  bool baselines = true;
};

/// Instance, pairs and pools all derive from options.seed; nothing touches disk.
template <class F>
ExperimentResult reproduce(const ReproduceOptions& opt) {
  const Preset preset = preset_for(F::name);
  ExperimentConfig config;
  config.dataset = preset.dataset;
  config.master_seed = derive_seed(opt.seed, "experiment");
  config.runs = opt.runs.value_or(preset.runs);
  config.train_size = opt.train_size.value_or(preset.train_size);
  config.test_size = opt.test_size.value_or(preset.test_size);
  config.ks = opt.ks.empty() ? preset.ks : opt.ks;
  config.perturb = opt.perturb;
  config.timing = opt.timing;
  config.baselines = opt.baselines;
  if (opt.c_reg) {
    config.auto_c_reg = false;
    config.trainer.c_reg = *opt.c_reg;
  }
  if (opt.eta) config.trainer.eta = *opt.eta;
  if (opt.margin_factor) config.trainer.margin_factor = *opt.margin_factor;
  if (opt.tol) config.trainer.tol = *opt.tol;
  validate(config);
  validate(effective_trainer(config, config.train_size));
  for (const auto& d : opt.dists.empty() ? preset.dists : opt.dists) {
    const auto name = F::dist_name(F::parse_dist(d));
    config.pools.push_back({name, derive_seed(derive_seed(opt.seed, "pool"), hash_tag(name)),
                            preset.pool_size});
  }
  const auto inst = F::gen_instance(preset.instance_params, derive_seed(opt.seed, "instance"));
  const auto pairs =
      F::gen_pairs(inst, config.train_size + config.test_size, derive_seed(opt.seed, "pairs"));
  return run_experiment<F>(inst, pairs, config);
}

}  // namespace usco::harness
