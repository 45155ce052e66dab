#include "usco/family.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace usco {

namespace {

datagen::PowerLawSpec pair_law_from(const Json& params, double default_scale) {
  datagen::PowerLawSpec spec;
  spec.exponent = params.value("pair_exponent", spec.exponent);
  spec.scale = params.value("pair_scale", default_scale);
  spec.min_value = params.value("pair_min", spec.min_value);
  return spec;
}

Json pair_law_json(const datagen::PowerLawSpec& spec) {
  return {{"exponent", spec.exponent}, {"scale", spec.scale}, {"min", spec.min_value}};
}

datagen::PowerLawSpec pair_law_parse(const Json& j) {
  datagen::PowerLawSpec spec;
  spec.exponent = j.at("exponent").get<double>();
  spec.scale = j.at("scale").get<double>();
  spec.min_value = j.at("min").get<int>();
  return spec;
}

[[noreturn]] void bad_dist(std::string_view family, std::string_view spec, const char* allowed) {
  fail(ErrorKind::Config, "unknown " + std::string(family) + " distribution '" +
                              std::string(spec) + "' (expected " + allowed + ")");
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::optional<double> performance_ratio(Sense sense, double pred_value, double ref_value) {
  const double num = sense == Sense::Maximize ? ref_value : pred_value;
  const double den = sense == Sense::Maximize ? pred_value : ref_value;
  if (den == 0.0) return std::nullopt;
  return num / den;
}

// ---------------------------------------------------------------- ssp

SspFamily::Instance SspFamily::gen_instance(const Json& params, std::uint64_t seed) {
  ssp::Graph graph;
  if (params.contains("dimacs")) {
    const auto path = params.at("dimacs").get<std::string>();
    std::ifstream in(path);
    require(bool(in), ErrorKind::Io, "cannot open DIMACS file '" + path + "'");
    auto parsed = ssp::parse_dimacs(in);
    graph = std::move(parsed.graph);
    if (params.value("undirected", false)) {
      std::set<std::pair<int, int>> seen;
      std::vector<ssp::Edge> edges;
      for (const auto& e : graph.edges())
        if (seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second) edges.push_back(e);
      graph = ssp::Graph(graph.node_count(), std::move(edges), false);
    }
  } else {
    graph = ssp::desk_graph(derive_seed(seed, "graph"), params.value("levels", 6),
                            params.value("edges", std::size_t{160}));
  }
  auto law = datagen::gen_ssp_instance(graph, seed);
  return {std::move(graph), std::move(law)};
}

void SspFamily::validate(const Instance& inst) { ssp::validate_law(inst.graph, inst.law); }

SspFamily::Dist SspFamily::parse_dist(std::string_view spec) {
  if (spec == "phi_exp") return Dist::Exp;
  if (spec == "phi_norm") return Dist::Norm;
  if (spec == "phi_true") return Dist::True;
  bad_dist(name, spec, "phi_exp, phi_norm or phi_true");
}

std::string SspFamily::dist_name(const Dist& dist) {
  switch (dist) {
    case Dist::Exp: return "phi_exp";
    case Dist::Norm: return "phi_norm";
    case Dist::True: return "phi_true";
  }
  return {};
}

SspFamily::Payload SspFamily::sample(const Instance& inst, const Dist& dist, std::uint64_t seed) {
  return ssp::sample_ssp_config(inst.graph, dist, &inst.law, seed);
}

double SspFamily::expected_objective(const Instance& inst, const Input& x, const Solution& y) {
  ssp::path_edges(inst.graph, x, y);
  return ssp::expected_path_length(inst.graph, y, inst.law);
}

SspFamily::Solution SspFamily::baseline(const Instance& inst, const Input& x, std::uint64_t seed) {
  return ssp::base_baseline(inst.graph, x, seed);
}

std::vector<SspFamily::Pair> SspFamily::gen_pairs(const Instance& inst, std::size_t n,
                                                  std::uint64_t seed) {
  return datagen::gen_ssp_pairs(inst.graph, inst.law, n, seed);
}

Json SspFamily::to_json(const Instance& inst) {
  Json edges = Json::array();
  for (const auto& e : inst.graph.edges()) edges.push_back({e.u, e.v});
  return {{"nodes", inst.graph.node_count()},
          {"directed", inst.graph.directed()},
          {"edges", std::move(edges)},
          {"shape", inst.law.shape},
          {"scale", inst.law.scale}};
}

SspFamily::Instance SspFamily::instance_from_json(const Json& j) {
  std::vector<ssp::Edge> edges;
  for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  Instance inst{ssp::Graph(j.at("nodes").get<int>(), std::move(edges), j.at("directed").get<bool>()),
                {j.at("shape").get<std::vector<int>>(), j.at("scale").get<std::vector<int>>()}};
  validate(inst);
  return inst;
}

SspFamily::Input SspFamily::input_from_json(const Json& j) {
  require(j.is_array() && j.size() == 2, ErrorKind::Format, "ssp input must be [source, target]");
  return {j[0].get<int>(), j[1].get<int>()};
}

SspFamily::Solution SspFamily::solution_from_json(const Json& j) {
  return {j.get<std::vector<int>>()};
}

SspFamily::Payload SspFamily::payload_from_json(const Json& j) {
  return {j.get<std::vector<double>>()};
}

// ---------------------------------------------------------------- ssc

SscFamily::Instance SscFamily::gen_instance(const Json& params, std::uint64_t seed) {
  auto graph = ssc::desk_cover_graph(derive_seed(seed, "graph"), params.value("left", 200),
                                     params.value("right", 500), params.value("min_degree", 2),
                                     params.value("max_degree", 14));
  auto law = datagen::gen_ssc_instance(graph, seed);
  auto pair_law = pair_law_from(params, 200.0);
  pair_law.max_value = graph.right_count();
  Instance inst{std::move(graph), std::move(law), pair_law};
  validate(inst);
  return inst;
}

void SscFamily::validate(const Instance& inst) {
  ssc::validate_law(inst.graph, inst.law);
  datagen::validate(inst.pair_law);
}

SscFamily::Dist SscFamily::parse_dist(std::string_view spec) {
  if (spec == "phi_uni") return Dist::Uni;
  if (spec == "phi_true") return Dist::True;
  bad_dist(name, spec, "phi_uni or phi_true");
}

std::string SscFamily::dist_name(const Dist& dist) {
  return dist == Dist::Uni ? "phi_uni" : "phi_true";
}

SscFamily::Payload SscFamily::sample(const Instance& inst, const Dist& dist, std::uint64_t seed) {
  return ssc::sample_ssc_config(inst.graph, dist, &inst.law, seed);
}

double SscFamily::expected_objective(const Instance& inst, const Input& x, const Solution& y) {
  ssc::validate_solution(inst.graph, x, y);
  return ssc::expected_coverage(inst.graph, x, y, inst.law);
}

SscFamily::Solution SscFamily::baseline(const Instance& inst, const Input& x, std::uint64_t seed) {
  return ssc::rand_baseline(inst.graph, x, seed);
}

std::vector<SscFamily::Pair> SscFamily::gen_pairs(const Instance& inst, std::size_t n,
                                                  std::uint64_t seed) {
  return datagen::gen_ssc_pairs(inst.graph, inst.law, n, inst.pair_law, seed);
}

Json SscFamily::to_json(const Instance& inst) {
  Json edges = Json::array();
  for (const auto& e : inst.graph.edges()) edges.push_back({e.left, e.right});
  return {{"left", inst.graph.left_count()},
          {"right", inst.graph.right_count()},
          {"edges", std::move(edges)},
          {"p", inst.law.p},
          {"pair_law", pair_law_json(inst.pair_law)}};
}

SscFamily::Instance SscFamily::instance_from_json(const Json& j) {
  std::vector<ssc::CoverEdge> edges;
  for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  ssc::CoverGraph graph(j.at("left").get<int>(), j.at("right").get<int>(), std::move(edges));
  auto pair_law = pair_law_parse(j.at("pair_law"));
  pair_law.max_value = graph.right_count();
  Instance inst{std::move(graph), {j.at("p").get<std::vector<double>>()}, pair_law};
  validate(inst);
  return inst;
}

SscFamily::Input SscFamily::input_from_json(const Json& j) {
  return {j.at("targets").get<std::vector<int>>(), j.at("k").get<int>()};
}

SscFamily::Solution SscFamily::solution_from_json(const Json& j) {
  return {j.get<std::vector<int>>()};
}

Json SscFamily::to_json(const Payload& c) {
  Json ids = Json::array();
  for (std::size_t e = 0; e < c.bits.size() * 64; ++e)
    if (c.has(e)) ids.push_back(e);
  return ids;
}

SscFamily::Payload SscFamily::payload_from_json(const Json& j, std::size_t edge_count) {
  Payload c{std::vector<std::uint64_t>((edge_count + 63) / 64, 0)};
  for (const auto& v : j) {
    const auto e = v.get<std::size_t>();
    require(e < edge_count, ErrorKind::Format, "ssc configuration: edge id out of range");
    c.set(e);
  }
  return c;
}

// ---------------------------------------------------------------- sbm

SbmFamily::Instance SbmFamily::gen_instance(const Json& params, std::uint64_t seed) {
  const int n = params.value("n", 32);
  auto graph = datagen::gen_sbm_instance(n, seed);
  auto pair_law = pair_law_from(params, static_cast<double>(n));
  pair_law.max_value = n;
  pair_law.min_value = std::min(pair_law.min_value, n);
  Instance inst{std::move(graph), pair_law};
  validate(inst);
  return inst;
}

void SbmFamily::validate(const Instance& inst) {
  sbm::validate_graph(inst.graph);
  datagen::validate(inst.pair_law);
}

SbmFamily::Dist SbmFamily::parse_dist(std::string_view spec) {
  if (spec == "phi_uni") return {Dist::Uni, 0.0};
  if (spec == "phi_true") return {Dist::True, 0.0};
  std::string_view tail;
  if (spec.starts_with("phi_q:")) {
    tail = spec.substr(6);
  } else if (spec.starts_with("phi_")) {
    tail = spec.substr(4);
  }
  double q = 0.0;
  const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), q);
  if (tail.empty() || res.ec != std::errc() || res.ptr != tail.data() + tail.size() || !(q > 0.0))
    bad_dist(name, spec, "phi_uni, phi_true or phi_<q> with q > 0");
  return {Dist::Q, q};
}

std::string SbmFamily::dist_name(const Dist& dist) {
  switch (dist.kind) {
    case Dist::Uni: return "phi_uni";
    case Dist::True: return "phi_true";
    case Dist::Q: return "phi_" + shortest(dist.q);
  }
  return {};
}

SbmFamily::Payload SbmFamily::sample(const Instance& inst, const Dist& dist, std::uint64_t seed) {
  return sbm::sample_sbm_config(inst.graph, dist, seed);
}

double SbmFamily::expected_objective(const Instance& inst, const Input& x, const Solution& y) {
  sbm::validate_matching(inst.graph, x, y);
  return sbm::expected_matching_cost(inst.graph, x, y);
}

SbmFamily::Solution SbmFamily::baseline(const Instance&, const Input& x, std::uint64_t seed) {
  return sbm::rand_baseline(x, seed);
}

std::vector<SbmFamily::Pair> SbmFamily::gen_pairs(const Instance& inst, std::size_t n,
                                                  std::uint64_t seed) {
  return datagen::gen_sbm_pairs(inst.graph, n, inst.pair_law, seed);
}

Json SbmFamily::to_json(const Instance& inst) {
  return {{"n", inst.graph.n}, {"mu", inst.graph.mu}, {"pair_law", pair_law_json(inst.pair_law)}};
}

SbmFamily::Instance SbmFamily::instance_from_json(const Json& j) {
  Instance inst{{j.at("n").get<int>(), j.at("mu").get<std::vector<double>>()},
                pair_law_parse(j.at("pair_law"))};
  inst.pair_law.max_value = inst.graph.n;
  validate(inst);
  return inst;
}

SbmFamily::Input SbmFamily::input_from_json(const Json& j) {
  return {j.at("left").get<std::vector<int>>(), j.at("right").get<std::vector<int>>()};
}

SbmFamily::Solution SbmFamily::solution_from_json(const Json& j) {
  return {j.get<std::vector<int>>()};
}

SbmFamily::Payload SbmFamily::payload_from_json(const Json& j) {
  return {j.get<std::vector<double>>()};
}

}  // namespace usco
