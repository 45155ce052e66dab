#pragma once

// Per-family glue used by the file formats, the harness and the C API:
// instance bundles, distribution descriptors, ground-truth expectations,
// baselines, pair generation, and JSON encodings of every value type.
//
// Distribution descriptors:
//   ssp  phi_exp | phi_norm | phi_true
//   ssc  phi_uni | phi_true
//   sbm  phi_uni | phi_true | phi_<q> (also phi_q:<q>), q > 0

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "usco/datagen.hpp"
#include "usco/sbm.hpp"
#include "usco/ssc.hpp"
#include "usco/ssp.hpp"
#include "usco/trainer.hpp"

namespace usco {

using Json = nlohmann::json;

struct SspFamily {
  static constexpr std::string_view name = "ssp";
  static constexpr std::string_view baseline_name = "Base";
  using Problem = ssp::SspProblem;
  using Input = ssp::SspInput;
  using Solution = ssp::SspPath;
  using Payload = ssp::SspConfig;
  using Dist = ssp::SspDist;
  using Pair = TrainingPair<Input, Solution>;

  struct Instance {
    ssp::Graph graph;
    ssp::WeibullEdgeLaw law;
    bool operator==(const Instance&) const = default;
  };

  /// params: {"levels", "edges"} for the Kronecker desk graph, or
  /// {"dimacs": path, "undirected": bool} to read the structure from a file.
  static Instance gen_instance(const Json& params, std::uint64_t seed);
  static void validate(const Instance& inst);
  static Problem make_problem(const Instance& inst) { return Problem(inst.graph); }

  static Dist parse_dist(std::string_view spec);
  static std::string dist_name(const Dist& dist);
  static Payload sample(const Instance& inst, const Dist& dist, std::uint64_t seed);

  static double expected_objective(const Instance& inst, const Input& x, const Solution& y);
  static Solution baseline(const Instance& inst, const Input& x, std::uint64_t seed);
  static std::vector<Pair> gen_pairs(const Instance& inst, std::size_t n, std::uint64_t seed);

  static Json to_json(const Instance& inst);
  static Instance instance_from_json(const Json& j);
  static Json to_json(const Input& x) { return Json::array({x.source, x.target}); }
  static Input input_from_json(const Json& j);
  static Json to_json(const Solution& y) { return y.nodes; }
  static Solution solution_from_json(const Json& j);
  static Json to_json(const Payload& c) { return c.weights; }
  static Payload payload_from_json(const Json& j);
};

struct SscFamily {
  static constexpr std::string_view name = "ssc";
  static constexpr std::string_view baseline_name = "Rand";
  using Problem = ssc::SscProblem;
  using Input = ssc::SscInput;
  using Solution = ssc::SscSolution;
  using Payload = ssc::SscConfig;
  using Dist = ssc::SscDist;
  using Pair = TrainingPair<Input, Solution>;

  struct Instance {
    ssc::CoverGraph graph;
    ssc::EdgeProbLaw law;
    datagen::PowerLawSpec pair_law;
    bool operator==(const Instance& o) const {
      return graph == o.graph && law == o.law && pair_law.exponent == o.pair_law.exponent &&
             pair_law.scale == o.pair_law.scale && pair_law.min_value == o.pair_law.min_value &&
             pair_law.max_value == o.pair_law.max_value;
    }
  };

  /// params: {"left", "right", "min_degree", "max_degree", "pair_scale", "pair_exponent"}.
  static Instance gen_instance(const Json& params, std::uint64_t seed);
  static void validate(const Instance& inst);
  static Problem make_problem(const Instance& inst) { return Problem(inst.graph); }

  static Dist parse_dist(std::string_view spec);
  static std::string dist_name(const Dist& dist);
  static Payload sample(const Instance& inst, const Dist& dist, std::uint64_t seed);

  static double expected_objective(const Instance& inst, const Input& x, const Solution& y);
  static Solution baseline(const Instance& inst, const Input& x, std::uint64_t seed);
  static std::vector<Pair> gen_pairs(const Instance& inst, std::size_t n, std::uint64_t seed);

  static Json to_json(const Instance& inst);
  static Instance instance_from_json(const Json& j);
  static Json to_json(const Input& x) { return {{"targets", x.targets}, {"k", x.budget}}; }
  static Input input_from_json(const Json& j);
  static Json to_json(const Solution& y) { return y.nodes; }
  static Solution solution_from_json(const Json& j);
  /// Present edge ids.
  static Json to_json(const Payload& c);
  static Payload payload_from_json(const Json& j, std::size_t edge_count);
};

struct SbmFamily {
  static constexpr std::string_view name = "sbm";
  static constexpr std::string_view baseline_name = "Rand";
  using Problem = sbm::SbmProblem;
  using Input = sbm::SbmInput;
  using Solution = sbm::SbmMatching;
  using Payload = sbm::SbmConfig;
  using Dist = sbm::SbmDist;
  using Pair = TrainingPair<Input, Solution>;

  struct Instance {
    sbm::MatchGraph graph;
    datagen::PowerLawSpec pair_law;
    bool operator==(const Instance& o) const {
      return graph == o.graph && pair_law.exponent == o.pair_law.exponent &&
             pair_law.scale == o.pair_law.scale && pair_law.min_value == o.pair_law.min_value &&
             pair_law.max_value == o.pair_law.max_value;
    }
  };

  /// params: {"n", "pair_scale", "pair_exponent"}; pair_scale defaults to n.
  static Instance gen_instance(const Json& params, std::uint64_t seed);
  static void validate(const Instance& inst);
  static Problem make_problem(const Instance& inst) { return Problem(inst.graph.n); }

  static Dist parse_dist(std::string_view spec);
  static std::string dist_name(const Dist& dist);
  static Payload sample(const Instance& inst, const Dist& dist, std::uint64_t seed);

  static double expected_objective(const Instance& inst, const Input& x, const Solution& y);
  static Solution baseline(const Instance& inst, const Input& x, std::uint64_t seed);
  static std::vector<Pair> gen_pairs(const Instance& inst, std::size_t n, std::uint64_t seed);

  static Json to_json(const Instance& inst);
  static Instance instance_from_json(const Json& j);
  static Json to_json(const Input& x) { return {{"left", x.left}, {"right", x.right}}; }
  static Input input_from_json(const Json& j);
  static Json to_json(const Solution& y) { return y.right_of; }
  static Solution solution_from_json(const Json& j);
  static Json to_json(const Payload& c) { return c.cost; }
  static Payload payload_from_json(const Json& j);
};

/// Decodes a payload, supplying instance context where the encoding needs it.
template <class F>
typename F::Payload decode_payload(const typename F::Instance& inst, const Json& j) {
  if constexpr (std::is_same_v<F, SscFamily>) {
    return F::payload_from_json(j, inst.graph.edge_count());
  } else {
    (void)inst;
    return F::payload_from_json(j);
  }
}

/// Ratio of ground-truth objectives, oriented so that lower is better:
/// maximization ref / pred, minimization pred / ref. Empty when the
/// denominator is zero.
std::optional<double> performance_ratio(Sense sense, double pred_value, double ref_value);

}  // namespace usco
