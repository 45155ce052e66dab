#pragma once

// JSON-lines file formats. Every file opens with a header record
//   {"format": "usco-<kind>", "version": 1, "family": "<ssp|ssc|sbm>"}
// followed by kind-specific records, one JSON value per line:
//
//   instance  {"instance": {...}}
//   pairs     {"instance_checksum": "<hex>", "count": n}, then {"x": ..., "y": ...} per pair
//   pool      {"dist", "master_seed", "size", "inline", "instance_checksum"},
//             then {"id", "seed"[, "payload"]} per configuration
//   model     {"instance": {...}}
//             {"sense", "alpha", "dist", "master_seed", "k", "inline"}
//             {"id", "seed"[, "payload"]} per configuration
//             {"weights": [...]}
//             {"trainer": {...}, "m", "objective_trace_tail": [...], "converged": b}
//             {"probe": {"x", "y", "features"} | null, "checksum": "<hex>"}
//
// Seeds and checksums are written as decimal / hex strings so that 64-bit
// values survive readers that parse numbers as doubles.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "usco/family.hpp"

namespace usco::io {

inline constexpr int kFormatVersion = 1;

struct Header {
  std::string format;
  int version = 0;
  std::string family;
};

/// Lines of a JSON-lines file, with parse errors reported by line number.
class RecordReader {
 public:
  RecordReader(const std::string& path, const std::string& expected_format);
  const Header& header() const noexcept { return header_; }
  bool done() const noexcept { return next_ >= records_.size(); }
  /// Next record; `what` names it in the truncation error.
  const Json& next(const std::string& what);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  Header header_;
  std::vector<Json> records_;
  std::size_t next_ = 0;
};

/// Family named in the header of any usco file.
std::string peek_family(const std::string& path);

class RecordWriter {
 public:
  RecordWriter(const std::string& path, const std::string& format, std::string_view family);
  void write(const Json& record);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(const Json& j, const std::string& field);
std::uint64_t parse_u64(const Json& j, const std::string& field);

template <class F>
std::uint64_t instance_checksum(const typename F::Instance& inst) {
  return hash_tag(F::to_json(inst).dump());
}

template <class F>
std::uint64_t payload_checksum(const ConfigurationSample<typename F::Payload>& sample) {
  std::uint64_t h = hash_tag(sample.dist_spec);
  for (const auto& c : sample.configs) h = derive_seed(h, hash_tag(F::to_json(c.payload).dump()));
  return h;
}

// ---------------------------------------------------------------- instance

template <class F>
void save_instance(const std::string& path, const typename F::Instance& inst) {
  RecordWriter w(path, "usco-instance", F::name);
  w.write({{"instance", F::to_json(inst)}});
  w.close();
}

template <class F>
typename F::Instance load_instance(const std::string& path);

// ---------------------------------------------------------------- pairs

template <class F>
void save_pairs(const std::string& path, const typename F::Instance& inst,
                const std::vector<typename F::Pair>& pairs) {
  RecordWriter w(path, "usco-pairs", F::name);
  w.write({{"instance_checksum", hex64(instance_checksum<F>(inst))}, {"count", pairs.size()}});
  for (const auto& p : pairs) w.write({{"x", F::to_json(p.x)}, {"y", F::to_json(p.y_ref)}});
  w.close();
}

/// Loads and validates every label against `inst`.
template <class F>
std::vector<typename F::Pair> load_pairs(const std::string& path, const typename F::Instance& inst);

// ---------------------------------------------------------------- pool

struct PoolRef {
  std::string dist;  // canonical descriptor
  std::uint64_t master_seed = 0;
  std::uint64_t size = 0;
  bool operator==(const PoolRef&) const = default;
};

template <class F>
void save_pool(const std::string& path, const typename F::Instance& inst, const PoolRef& pool,
               bool inline_payload);

/// Reads the pool header and checks every sub-seed against the master seed.
template <class F>
PoolRef load_pool(const std::string& path, const typename F::Instance& inst);

/// Configurations `ids` of the pool, regenerated from their sub-seeds.
template <class F>
ConfigurationSample<typename F::Payload> draw_sample(const typename F::Instance& inst,
                                                     const PoolRef& pool,
                                                     const std::vector<std::uint64_t>& ids) {
  const auto dist = F::parse_dist(pool.dist);
  for (auto id : ids)
    require(id < pool.size, ErrorKind::Domain, "configuration id beyond pool size");
  return datagen::materialize<typename F::Payload>(
      pool.dist, pool.master_seed, ids,
      [&](std::uint64_t seed) { return F::sample(inst, dist, seed); });
}

// ---------------------------------------------------------------- model

template <class F>
struct ModelArtifact {
  using family_type = F;
  typename F::Instance instance;
  ScoreModel<typename F::Payload> model;
  TrainerParams trainer;
  std::size_t train_size = 0;  // m, needed for the perturbation scale
  std::vector<double> objective_trace_tail;
  bool converged = false;
  std::optional<typename F::Pair> probe;  // (x, y) whose features are checked on load
  bool inline_payload = false;

  bool operator==(const ModelArtifact&) const = default;
};

inline constexpr std::size_t kTraceTail = 10;
inline constexpr double kProbeTolerance = 1e-12;

template <class F>
void save_model(const std::string& path, const ModelArtifact<F>& artifact);

template <class F>
ModelArtifact<F> load_model(const std::string& path);

Json trainer_to_json(const TrainerParams& p);
TrainerParams trainer_from_json(const Json& j);

// ---------------------------------------------------------------- definitions

/// Runs fn, rethrowing JSON access errors as format errors that name the file.
template <class Fn>
auto with_file_context(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    fail(ErrorKind::Format, path + ": malformed record: " + e.what());
  }
}

template <class F>
typename F::Instance load_instance(const std::string& path) {
  return with_file_context(path, [&] {
    RecordReader r(path, "usco-instance");
    require(r.header().family == F::name, ErrorKind::Format,
            path + ": family is '" + r.header().family + "', expected '" + std::string(F::name) + "'");
    return F::instance_from_json(r.next("instance record").at("instance"));
  });
}

template <class F>
std::vector<typename F::Pair> load_pairs(const std::string& path,
                                         const typename F::Instance& inst) {
  return with_file_context(path, [&] {
    RecordReader r(path, "usco-pairs");
    require(r.header().family == F::name, ErrorKind::Format, path + ": family mismatch");
    const auto& meta = r.next("pairs summary record");
    require(parse_hex64(meta.at("instance_checksum"), "instance_checksum") ==
                instance_checksum<F>(inst),
            ErrorKind::Format, path + ": field 'instance_checksum' does not match the instance");
    const auto count = meta.at("count").get<std::size_t>();
    const auto problem = F::make_problem(inst);
    std::vector<typename F::Pair> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& rec = r.next("pair " + std::to_string(i));
      typename F::Pair p{F::input_from_json(rec.at("x")), F::solution_from_json(rec.at("y"))};
      try {
        problem.check_feasible(p.x, p.y_ref);
      } catch (const Error& e) {
        fail(e.kind(), path + ": pair " + std::to_string(i) + ": " + e.what());
      }
      pairs.push_back(std::move(p));
    }
    return pairs;
  });
}

template <class F>
void save_pool(const std::string& path, const typename F::Instance& inst, const PoolRef& pool,
               bool inline_payload) {
  const auto dist = F::parse_dist(pool.dist);
  RecordWriter w(path, "usco-pool", F::name);
  w.write({{"dist", F::dist_name(dist)},
           {"master_seed", std::to_string(pool.master_seed)},
           {"size", pool.size},
           {"inline", inline_payload},
           {"instance_checksum", hex64(instance_checksum<F>(inst))}});
  const std::uint64_t chunk = 1024;
  for (std::uint64_t start = 0; start < pool.size; start += chunk) {
    std::vector<std::uint64_t> ids;
    for (std::uint64_t i = start; i < std::min(pool.size, start + chunk); ++i) ids.push_back(i);
    if (inline_payload) {
      const auto sample = draw_sample<F>(inst, pool, ids);
      for (const auto& c : sample.configs)
        w.write({{"id", c.id}, {"seed", std::to_string(c.seed)}, {"payload", F::to_json(c.payload)}});
    } else {
      for (auto id : ids)
        w.write({{"id", id}, {"seed", std::to_string(datagen::pool_seed(pool.master_seed, id))}});
    }
  }
  w.close();
}

template <class F>
PoolRef load_pool(const std::string& path, const typename F::Instance& inst) {
  return with_file_context(path, [&] {
    RecordReader r(path, "usco-pool");
    require(r.header().family == F::name, ErrorKind::Format, path + ": family mismatch");
    const auto& meta = r.next("pool summary record");
    require(parse_hex64(meta.at("instance_checksum"), "instance_checksum") ==
                instance_checksum<F>(inst),
            ErrorKind::Format, path + ": field 'instance_checksum' does not match the instance");
    PoolRef pool{F::dist_name(F::parse_dist(meta.at("dist").get<std::string>())),
                 parse_u64(meta.at("master_seed"), "master_seed"), meta.at("size").get<std::uint64_t>()};
    require(pool.size >= 1, ErrorKind::Format, path + ": empty pool");
    for (std::uint64_t i = 0; i < pool.size; ++i) {
      const auto& rec = r.next("configuration " + std::to_string(i));
      require(rec.at("id").get<std::uint64_t>() == i, ErrorKind::Format,
              path + ": configuration ids must be 0..size-1 in order");
      require(parse_u64(rec.at("seed"), "seed") == datagen::pool_seed(pool.master_seed, i),
              ErrorKind::Format,
              path + ": field 'seed' of configuration " + std::to_string(i) +
                  " does not derive from master_seed");
    }
    return pool;
  });
}

template <class F>
void save_model(const std::string& path, const ModelArtifact<F>& a) {
  const auto& sample = a.model.sample;
  require(a.model.weights.size() == sample.size(), ErrorKind::Dimension,
          "save_model: weight vector length does not match configuration sample");
  const auto problem = F::make_problem(a.instance);
  RecordWriter w(path, "usco-model", F::name);
  w.write({{"instance", F::to_json(a.instance)}});
  w.write({{"sense", to_string(a.model.sense)},
           {"alpha", a.model.alpha},
           {"dist", sample.dist_spec},
           {"master_seed", std::to_string(sample.master_seed)},
           {"k", sample.size()},
           {"inline", a.inline_payload}});
  for (const auto& c : sample.configs) {
    Json rec{{"id", c.id}, {"seed", std::to_string(c.seed)}};
    if (a.inline_payload) rec["payload"] = F::to_json(c.payload);
    w.write(rec);
  }
  w.write({{"weights", a.model.weights}});
  w.write({{"trainer", trainer_to_json(a.trainer)},
           {"m", a.train_size},
           {"objective_trace_tail", a.objective_trace_tail},
           {"converged", a.converged}});
  Json probe = nullptr;
  if (a.probe) {
    probe = {{"x", F::to_json(a.probe->x)},
             {"y", F::to_json(a.probe->y_ref)},
             {"features", kernel_features(problem, a.probe->x, a.probe->y_ref, sample)}};
  }
  w.write({{"probe", probe}, {"checksum", hex64(payload_checksum<F>(sample))}});
  w.close();
}

template <class F>
ModelArtifact<F> load_model(const std::string& path) {
  return with_file_context(path, [&] {
    RecordReader r(path, "usco-model");
    require(r.header().family == F::name, ErrorKind::Format, path + ": family mismatch");
    ModelArtifact<F> a;
    a.instance = F::instance_from_json(r.next("instance record").at("instance"));
    const auto problem = F::make_problem(a.instance);
    const auto& meta = r.next("model summary record");
    a.model.sense = parse_sense(meta.at("sense").get<std::string>());
    require(a.model.sense == problem.sense(), ErrorKind::Format,
            path + ": field 'sense' does not match the family");
    a.model.alpha = meta.at("alpha").get<double>();
    a.model.sample.dist_spec = meta.at("dist").get<std::string>();
    a.model.sample.master_seed = parse_u64(meta.at("master_seed"), "master_seed");
    a.inline_payload = meta.at("inline").get<bool>();
    const auto k = meta.at("k").get<std::size_t>();
    const auto dist = F::parse_dist(a.model.sample.dist_spec);
    a.model.sample.configs.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& rec = r.next("configuration " + std::to_string(i));
      auto& c = a.model.sample.configs[i];
      c.id = rec.at("id").get<std::uint64_t>();
      c.seed = parse_u64(rec.at("seed"), "seed");
      require(c.seed == datagen::pool_seed(a.model.sample.master_seed, c.id), ErrorKind::Format,
              path + ": field 'seed' of configuration " + std::to_string(i) +
                  " does not derive from master_seed");
      if (a.inline_payload) c.payload = decode_payload<F>(a.instance, rec.at("payload"));
    }
    if (!a.inline_payload) {
      parallel_for(k, [&](std::size_t i) {
        auto& c = a.model.sample.configs[i];
        c.payload = F::sample(a.instance, dist, c.seed);
      });
    }
    a.model.weights = r.next("weights record").at("weights").get<std::vector<double>>();
    require(a.model.weights.size() == k, ErrorKind::Format,
            path + ": field 'weights' has " + std::to_string(a.model.weights.size()) +
                " entries for " + std::to_string(k) + " configurations");
    const auto& tr = r.next("trainer record");
    a.trainer = trainer_from_json(tr.at("trainer"));
    a.train_size = tr.at("m").get<std::size_t>();
    a.objective_trace_tail = tr.at("objective_trace_tail").get<std::vector<double>>();
    a.converged = tr.at("converged").get<bool>();
    const auto& tail = r.next("checksum record");
    require(parse_hex64(tail.at("checksum"), "checksum") == payload_checksum<F>(a.model.sample),
            ErrorKind::Format, path + ": field 'checksum' does not match regenerated configurations");
    if (!tail.at("probe").is_null()) {
      const auto& pj = tail.at("probe");
      typename F::Pair probe{F::input_from_json(pj.at("x")), F::solution_from_json(pj.at("y"))};
      const auto stored = pj.at("features").get<std::vector<double>>();
      const auto fresh = kernel_features(problem, probe.x, probe.y_ref, a.model.sample);
      require(stored.size() == fresh.size(), ErrorKind::Format,
              path + ": field 'probe.features' has the wrong length");
      for (std::size_t i = 0; i < stored.size(); ++i)
        require(std::abs(stored[i] - fresh[i]) <= kProbeTolerance * std::max(1.0, std::abs(stored[i])),
                ErrorKind::Format,
                path + ": field 'probe.features' differs from regenerated features at index " +
                    std::to_string(i));
      a.probe = std::move(probe);
    }
    require(r.done(), ErrorKind::Format, path + ": trailing records after checksum");
    return a;
  });
}

}  // namespace usco::io
