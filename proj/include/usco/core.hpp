#pragma once

// Problem-agnostic pieces of the solver: configuration samples, the
// configuration kernel, affine scores, margins, the perturbation law for the
// seed vector, and oracle-backed prediction.

#include <concepts>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "usco/error.hpp"

namespace usco {

enum class Sense { Maximize, Minimize };

const char* to_string(Sense sense) noexcept;
Sense parse_sense(const std::string& text);

using WeightVector = std::vector<double>;

/// One sampled realization of the uncertain system.
template <class Payload>
struct Configuration {
  std::uint64_t id = 0;    // index in the pool it was drawn from
  std::uint64_t seed = 0;  // sub-seed that regenerates `payload`
  Payload payload;

  bool operator==(const Configuration&) const = default;
};

template <class Payload>
struct ConfigurationSample {
  std::string dist_spec;
  std::uint64_t master_seed = 0;
  std::vector<Configuration<Payload>> configs;

  std::size_t size() const noexcept { return configs.size(); }
  bool operator==(const ConfigurationSample&) const = default;
};

/// The trained predictor: weights over a configuration sample.
template <class Payload>
struct ScoreModel {
  ConfigurationSample<Payload> sample;
  WeightVector weights;
  double alpha = 1.0;
  Sense sense = Sense::Maximize;

  bool operator==(const ScoreModel&) const = default;
};

/// A problem family plugged into the solver.
///
/// `objective(x, y, c)` is f(x, y, c). `make_scorer` folds a configuration
/// list and nonnegative weights into whatever the oracle consumes (summed edge
/// weights, a summed cost matrix, ...), and `solve` is the alpha-approximation
/// oracle for the weighted objective under `sense()`. `encode` gives the
/// canonical solution encoding used for tie-breaking, caching, and the
/// zero-one loss.
template <class P>
concept UscoProblem =
    requires(const P& p, const typename P::Input& x, const typename P::Solution& y,
             const typename P::Payload& c,
             std::span<const Configuration<typename P::Payload>> configs,
             std::span<const double> w, const typename P::Scorer& scorer) {
      { p.sense() } -> std::same_as<Sense>;
      { p.alpha() } -> std::convertible_to<double>;
      { p.objective(x, y, c) } -> std::convertible_to<double>;
      p.check_feasible(x, y);
      { p.make_scorer(configs, w) } -> std::same_as<typename P::Scorer>;
      { p.solve(x, scorer) } -> std::same_as<typename P::Solution>;
      { P::encode(y) } -> std::convertible_to<std::string>;
      { P::encode_input(x) } -> std::convertible_to<std::string>;
    };

/// Sum of w_i * features_i.
double score(std::span<const double> weights, std::span<const double> features);

/// (f(x, y, c_1), ..., f(x, y, c_K)).
template <UscoProblem P>
std::vector<double> kernel_features(const P& problem, const typename P::Input& x,
                                    const typename P::Solution& y,
                                    const ConfigurationSample<typename P::Payload>& sample) {
  require(sample.size() > 0, ErrorKind::Domain, "kernel_features: empty configuration sample");
  problem.check_feasible(x, y);
  if constexpr (requires { problem.batch_objective(x, y, std::span(sample.configs)); }) {
    return problem.batch_objective(x, y, std::span(sample.configs));
  } else {
    std::vector<double> out;
    out.reserve(sample.size());
    for (const auto& config : sample.configs) out.push_back(problem.objective(x, y, config.payload));
    return out;
  }
}

template <UscoProblem P>
double affine_score(const P& problem, const ScoreModel<typename P::Payload>& model,
                    const typename P::Input& x, const typename P::Solution& y) {
  return score(model.weights, kernel_features(problem, x, y, model.sample));
}

/// alpha * F(x, y1) - F(x, y2) under the model's weights.
template <UscoProblem P>
double margin(const P& problem, const ScoreModel<typename P::Payload>& model,
              const typename P::Input& x, const typename P::Solution& y1,
              const typename P::Solution& y2) {
  return model.alpha * affine_score(problem, model, x, y1) - affine_score(problem, model, x, y2);
}

/// Relaxed-margin membership from the two scores. Maximization: y is inside
/// when factor * F(y_ref) - F(y) <= 0. Minimization swaps the roles of the two
/// scores' orientation: inside when F(y) - factor * F(y_ref) <= 0, matching
/// the minimization training constraint F(y) - factor * F(y_ref) >= loss - xi.
bool in_relaxed_margin(Sense sense, double ref_score, double score, double margin_factor);

template <UscoProblem P>
bool in_relaxed_margin(const P& problem, const ScoreModel<typename P::Payload>& model,
                       const typename P::Input& x, const typename P::Solution& y_ref,
                       const typename P::Solution& y, double margin_factor) {
  return in_relaxed_margin(model.sense, affine_score(problem, model, x, y_ref),
                           affine_score(problem, model, x, y), margin_factor);
}

/// Scale of the perturbation mean: 4 / (min|w_p| alpha^2) * sqrt(2 ln(2mK / |w|^2)).
double compute_beta(std::span<const double> seed_weights, std::int64_t m, double alpha);

struct RequiredKParams {
  double lower = 1.0;       // A, lower bound of f
  double upper = 1.0;       // B, upper bound of f
  double c_ratio = 1.0;     // sup phi_true / phi_em
  double eps = 0.1;
  double delta1 = 0.5;
  double delta2 = 0.1;
  double y_size = 1.0;      // |Y|; real-valued so huge output spaces fit
};

/// Number of configurations sufficient for the approximation guarantee.
std::int64_t required_k(const RequiredKParams& params);

/// Draws from N(beta * w, I); deterministic in rng_seed.
WeightVector perturb_weights(std::span<const double> seed_weights, double beta,
                             std::uint64_t rng_seed);

/// Oracle-backed prediction: argopt of the weighted configuration objective.
template <UscoProblem P>
typename P::Solution predict(const P& problem, const ScoreModel<typename P::Payload>& model,
                             const typename P::Input& x) {
  require(model.weights.size() == model.sample.size(), ErrorKind::Dimension,
          "predict: weight vector length does not match configuration sample");
  for (double w : model.weights)
    require(w >= 0.0, ErrorKind::Domain, "predict: model weights must be nonnegative");
  const auto scorer = problem.make_scorer(model.sample.configs, model.weights);
  return problem.solve(x, scorer);
}

/// Memoized kernel features for one configuration sample, keyed by the
/// canonical (input, solution) encodings. Safe for concurrent use.
class FeatureCache {
 public:
  template <UscoProblem P>
  std::vector<double> get(const P& problem, const typename P::Input& x,
                          const typename P::Solution& y,
                          const ConfigurationSample<typename P::Payload>& sample) {
    std::string key = P::encode_input(x);
    key.push_back('|');
    key += P::encode(y);
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto features = kernel_features(problem, x, y, sample);
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(std::move(key), std::move(features)).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<double>> cache_;
};

}  // namespace usco
