#pragma once

// Instance laws, labeled input-solution pairs, and configuration pools.

#include <climits>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "usco/core.hpp"
#include "usco/parallel.hpp"
#include "usco/rng.hpp"
#include "usco/sbm.hpp"
#include "usco/ssc.hpp"
#include "usco/ssp.hpp"
#include "usco/trainer.hpp"

namespace usco::datagen {

/// Sizes drawn as clamp(floor(scale * U^(1/a)), min, max), U uniform on (0,1].
struct PowerLawSpec {
  double exponent = 2.5;
  double scale = 200.0;
  int min_value = 2;
  int max_value = INT_MAX;
};

void validate(const PowerLawSpec& spec);
int sample_powerlaw_size(const PowerLawSpec& spec, std::uint64_t rng_seed);
/// Same draw from an existing stream.
int sample_powerlaw_size(const PowerLawSpec& spec, Rng& rng);

/// Independent uniform (shape, scale) in {1..10} per edge.
ssp::WeibullEdgeLaw gen_ssp_instance(const ssp::Graph& graph, std::uint64_t rng_seed);
/// p_e = a / (a + b) with a, b uniform in {1..10}.
ssc::EdgeProbLaw gen_ssc_instance(const ssc::CoverGraph& graph, std::uint64_t rng_seed);
/// mu_e uniform on [1, 10].
sbm::MatchGraph gen_sbm_instance(int n, std::uint64_t rng_seed);

using SspPair = TrainingPair<ssp::SspInput, ssp::SspPath>;
using SscPair = TrainingPair<ssc::SscInput, ssc::SscSolution>;
using SbmPair = TrainingPair<sbm::SbmInput, sbm::SbmMatching>;

inline constexpr int kRetryFactor = 1000;  // attempts per requested pair

/// Distinct reachable (u, v) inputs labeled by Dijkstra on expected weights.
std::vector<SspPair> gen_ssp_pairs(const ssp::Graph& graph, const ssp::WeibullEdgeLaw& law,
                                   std::size_t n_pairs, std::uint64_t rng_seed);
/// |R*| from the power law (capped at |R|), budget max(1, floor(0.1 |R*|)),
/// labeled by greedy on the exact expected coverage.
std::vector<SscPair> gen_ssc_pairs(const ssc::CoverGraph& graph, const ssc::EdgeProbLaw& law,
                                   std::size_t n_pairs, PowerLawSpec spec, std::uint64_t rng_seed);
/// |L*| = |R*| from the power law (capped at n), labeled by Hungarian on mu.
std::vector<SbmPair> gen_sbm_pairs(const sbm::MatchGraph& graph, std::size_t n_pairs,
                                   PowerLawSpec spec, std::uint64_t rng_seed);

/// Sub-seed of pool entry `id`.
inline std::uint64_t pool_seed(std::uint64_t master_seed, std::uint64_t id) {
  return derive_seed(master_seed, id);
}

/// Materializes the given pool ids; payload i comes from sampler(pool_seed(master, ids[i])).
template <class Payload>
ConfigurationSample<Payload> materialize(const std::string& dist_spec, std::uint64_t master_seed,
                                         const std::vector<std::uint64_t>& ids,
                                         const std::function<Payload(std::uint64_t)>& sampler) {
  ConfigurationSample<Payload> sample{dist_spec, master_seed, {}};
  sample.configs.resize(ids.size());
  parallel_for(ids.size(), [&](std::size_t i) {
    auto& c = sample.configs[i];
    c.id = ids[i];
    c.seed = pool_seed(master_seed, ids[i]);
    c.payload = sampler(c.seed);
  });
  return sample;
}

/// The whole pool 0..pool_size-1.
template <class Payload>
ConfigurationSample<Payload> gen_config_pool(const std::string& dist_spec, std::uint64_t pool_size,
                                             std::uint64_t master_seed,
                                             const std::function<Payload(std::uint64_t)>& sampler) {
  require(pool_size >= 1, ErrorKind::Domain, "pool size must be >= 1");
  std::vector<std::uint64_t> ids(pool_size);
  for (std::uint64_t i = 0; i < pool_size; ++i) ids[i] = i;
  return materialize(dist_spec, master_seed, ids, sampler);
}

/// K distinct ids from [0, pool_size), uniformly without replacement, in draw order.
std::vector<std::uint64_t> draw_pool_ids(std::uint64_t pool_size, std::uint64_t k,
                                         std::uint64_t rng_seed);

}  // namespace usco::datagen
