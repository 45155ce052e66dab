#include "usco/harness.hpp"

#include <cstdio>
#include <numeric>

namespace usco::harness {

void validate(const ExperimentConfig& c) {
  require(c.runs >= 1, ErrorKind::Config, "experiment: runs must be >= 1");
  require(c.train_size >= 1, ErrorKind::Config, "experiment: train_size must be >= 1");
  require(c.test_size >= 1, ErrorKind::Config, "experiment: test_size must be >= 1");
  require(!c.ks.empty() || c.pools.empty(), ErrorKind::Config, "experiment: empty K list");
  for (auto k : c.ks) require(k >= 1, ErrorKind::Config, "experiment: K must be >= 1");
  for (const auto& p : c.pools) require(p.size >= 1, ErrorKind::Config, "experiment: empty pool");
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (!std::isfinite(v)) return "nan";
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
  };
  for (const auto& r : rows) {
    out += r.dataset + ',' + r.dist + ',' + std::to_string(r.k) + ',' + std::to_string(r.runs) +
           ',' + num(r.mean_ratio) + ',' + num(r.std_ratio) + ',' + std::to_string(r.excluded) + ',';
    if (r.wall_time_s) {
      std::snprintf(buf, sizeof buf, "%.3f", *r.wall_time_s);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t pair_count, std::size_t train_size, std::size_t test_size,
    std::uint64_t master_seed, int run) {
  require(train_size + test_size <= pair_count, ErrorKind::Config,
          "split: not enough pairs for the requested train and test sizes");
  std::vector<std::size_t> order(pair_count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(derive_seed(master_seed, "split"), static_cast<std::uint64_t>(run)));
  for (std::size_t i = 0; i < train_size + test_size; ++i)
    std::swap(order[i], order[static_cast<std::size_t>(
                            rng.uniform_int(static_cast<std::int64_t>(i),
                                            static_cast<std::int64_t>(pair_count - 1)))]);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(train_size),
                                order.begin() + static_cast<std::ptrdiff_t>(train_size + test_size));
  return {std::move(train), std::move(test)};
}

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& dist, std::uint64_t k, int run) {
  std::uint64_t s = derive_seed(master_seed, "cell");
  s = derive_seed(s, hash_tag(dist));
  s = derive_seed(s, k);
  return derive_seed(s, static_cast<std::uint64_t>(run));
}

TrainerParams effective_trainer(const ExperimentConfig& config, std::size_t m) {
  TrainerParams p = config.trainer;
  if (config.auto_c_reg) p.c_reg = 0.01 * static_cast<double>(m);
  return p;
}

Preset preset_for(std::string_view family) {
  Preset p;
  if (family == "ssp") {
    p.dataset = "desk-kron64";
    p.instance_params = {{"levels", 6}, {"edges", 160}};
    p.dists = {"phi_exp", "phi_norm", "phi_true"};
    p.ks = {16, 160, 1600, 3200, 6400};
  } else if (family == "ssc") {
    p.dataset = "desk-cover200x500";
    p.instance_params = {{"left", 200}, {"right", 500}, {"min_degree", 2}, {"max_degree", 14}};
    p.dists = {"phi_uni", "phi_true"};
    p.ks = {8, 16, 160, 320, 640};
  } else if (family == "sbm") {
    p.dataset = "desk-bipartite32";
    p.instance_params = {{"n", 32}};
    p.dists = {"phi_uni", "phi_true", "phi_10", "phi_5", "phi_1", "phi_0.3"};
    p.ks = {16, 160, 320, 640};
  } else {
    fail(ErrorKind::Config, "unknown problem family '" + std::string(family) + "'");
  }
  return p;
}

}  // namespace usco::harness
