#include "usco/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "usco/parallel.hpp"
#include "usco/rng.hpp"

namespace usco {

const char* to_string(Sense sense) noexcept {
  return sense == Sense::Maximize ? "maximize" : "minimize";
}

Sense parse_sense(const std::string& text) {
  if (text == "maximize") return Sense::Maximize;
  if (text == "minimize") return Sense::Minimize;
  fail(ErrorKind::Format, "unknown optimization sense '" + text + "'");
}

double score(std::span<const double> weights, std::span<const double> features) {
  require(weights.size() == features.size(), ErrorKind::Dimension,
          "score: " + std::to_string(weights.size()) + " weights vs " +
              std::to_string(features.size()) + " features");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * features[i];
  return total;
}

bool in_relaxed_margin(Sense sense, double ref_score, double score, double margin_factor) {
  require(margin_factor > 0.0, ErrorKind::Domain, "margin factor must be positive");
  if (sense == Sense::Maximize) return margin_factor * ref_score - score <= 0.0;
  return score - margin_factor * ref_score <= 0.0;
}

double compute_beta(std::span<const double> seed_weights, std::int64_t m, double alpha) {
  require(!seed_weights.empty(), ErrorKind::Domain, "compute_beta: empty seed vector");
  require(m >= 1, ErrorKind::Domain, "compute_beta: m must be >= 1");
  require(alpha > 0.0 && alpha <= 1.0, ErrorKind::Domain, "compute_beta: alpha must lie in (0,1]");
  double min_abs = std::numeric_limits<double>::infinity();
  double norm_sq = 0.0;
  for (double w : seed_weights) {
    min_abs = std::min(min_abs, std::abs(w));
    norm_sq += w * w;
  }
  require(min_abs > 0.0, ErrorKind::Domain, "compute_beta: seed vector has a zero entry");
  const double k = static_cast<double>(seed_weights.size());
  const double log_arg = 2.0 * static_cast<double>(m) * k / norm_sq;
  require(log_arg > 1.0, ErrorKind::Domain,
          "compute_beta: logarithm argument 2mK/|w|^2 = " + std::to_string(log_arg) + " is not > 1");
  return 4.0 / (min_abs * alpha * alpha) * std::sqrt(2.0 * std::log(log_arg));
}

std::int64_t required_k(const RequiredKParams& p) {
  require(p.lower > 0.0, ErrorKind::Domain, "required_k: A must be > 0");
  require(p.upper >= p.lower, ErrorKind::Domain, "required_k: B must be >= A");
  require(p.c_ratio >= 1.0, ErrorKind::Domain, "required_k: C must be >= 1");
  require(p.eps > 0.0, ErrorKind::Domain, "required_k: eps must be > 0");
  require(p.delta1 > 0.0 && p.delta1 <= 1.0, ErrorKind::Domain, "required_k: delta1 must lie in (0,1]");
  require(p.delta2 > 0.0 && p.delta2 < 1.0, ErrorKind::Domain, "required_k: delta2 must lie in (0,1)");
  require(p.y_size >= 1.0, ErrorKind::Domain, "required_k: |Y| must be >= 1");
  const double lead = 2.0 * p.c_ratio * p.c_ratio * p.upper * p.upper /
                      (p.eps * p.eps * p.delta2 * p.delta2 * p.lower * p.lower);
  const double tail = std::max(0.5, std::log(p.y_size) + std::log(1.0 / p.delta1));
  const double k = std::ceil(lead * tail);
  require(k < 9.0e18, ErrorKind::Domain, "required_k: result overflows a 64-bit count");
  return static_cast<std::int64_t>(k);
}

WeightVector perturb_weights(std::span<const double> seed_weights, double beta,
                             std::uint64_t rng_seed) {
  require(std::isfinite(beta), ErrorKind::Domain, "perturb_weights: beta must be finite");
  Rng rng(derive_seed(rng_seed, "perturb"));
  WeightVector out;
  out.reserve(seed_weights.size());
  for (double w : seed_weights) out.push_back(beta * w + rng.normal());
  return out;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("USCO_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace usco
