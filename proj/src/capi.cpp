#include "usco/usco.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <new>
#include <stdexcept>
#include <string>
#include <variant>

#include "usco/harness.hpp"
#include "usco/io.hpp"

using namespace usco;

struct usco_model {
  std::variant<io::ModelArtifact<SspFamily>, io::ModelArtifact<SscFamily>,
               io::ModelArtifact<SbmFamily>>
      artifact;
};

namespace {

thread_local std::string last_error;

/// A NULL pointer or otherwise unusable argument from the caller.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

usco_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return USCO_ERR_DOMAIN;
    case ErrorKind::Dimension: return USCO_ERR_DIMENSION;
    case ErrorKind::Feasibility: return USCO_ERR_FEASIBILITY;
    case ErrorKind::NoSolution: return USCO_ERR_NO_SOLUTION;
    case ErrorKind::Parse: return USCO_ERR_PARSE;
    case ErrorKind::Io: return USCO_ERR_IO;
    case ErrorKind::Convergence: return USCO_ERR_CONVERGENCE;
    case ErrorKind::Config: return USCO_ERR_CONFIG;
    case ErrorKind::Format: return USCO_ERR_FORMAT;
  }
  return USCO_ERR_INTERNAL;
}

template <class Fn>
usco_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return USCO_OK;
  } catch (const InvalidArgument& e) {
    last_error = e.what();
    return USCO_ERR_INVALID_ARGUMENT;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const Json::exception& e) {
    // File readers report their own JSON errors as format errors; what is
    // left here came from caller-supplied options or inputs.
    last_error = std::string("invalid option or input value: ") + e.what();
    return USCO_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return USCO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return USCO_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return USCO_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json parse_options(const char* text, std::initializer_list<const char*> allowed) {
  if (!text || !*text) return Json::object();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("options: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Config, "options must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    require(ok, ErrorKind::Config, "unknown option '" + key + "'");
  }
  return j;
}

template <class Fn>
void dispatch(std::string_view family, Fn&& fn) {
  if (family == "ssp") return fn(SspFamily{});
  if (family == "ssc") return fn(SscFamily{});
  if (family == "sbm") return fn(SbmFamily{});
  fail(ErrorKind::Config, "unknown problem family '" + std::string(family) +
                              "' (expected ssp, ssc or sbm)");
}

TrainerParams trainer_from_options(const Json& opt, std::size_t m) {
  TrainerParams p;
  p.c_reg = opt.value("c_reg", 0.01 * static_cast<double>(m));
  p.eta = opt.value("eta", p.eta);
  p.margin_factor = opt.value("margin_factor", p.margin_factor);
  p.tol = opt.value("tol", p.tol);
  p.max_outer_iter = opt.value("max_outer_iter", p.max_outer_iter);
  validate(p);
  return p;
}

Json run_report(const harness::ExperimentResult& result) {
  Json runs = Json::array();
  for (const auto& r : result.records)
    runs.push_back({{"dist", r.dist},
                    {"k", r.k},
                    {"run", r.run},
                    {"ok", r.ok},
                    {"mean_ratio", r.ok ? Json(r.mean_ratio) : Json(nullptr)},
                    {"excluded", r.excluded},
                    {"error", r.error},
                    {"contract_breach", r.contract_breach},
                    {"converged", r.converged},
                    {"working_set_size", r.working_set_size}});
  Json rows = Json::array();
  for (const auto& row : result.rows)
    rows.push_back({{"dist", row.dist},
                    {"k", row.k},
                    {"runs", row.runs},
                    {"requested_runs", row.requested_runs}});
  return {{"csv", harness::to_csv(result.rows)}, {"rows", std::move(rows)}, {"runs", std::move(runs)}};
}

}  // namespace

extern "C" {

const char* usco_version(void) { return "1.0.0"; }

const char* usco_last_error(void) { return last_error.c_str(); }

const char* usco_status_name(usco_status status) {
  switch (status) {
    case USCO_OK: return "ok";
    case USCO_ERR_DOMAIN: return "domain error";
    case USCO_ERR_DIMENSION: return "dimension error";
    case USCO_ERR_FEASIBILITY: return "feasibility error";
    case USCO_ERR_NO_SOLUTION: return "no solution";
    case USCO_ERR_PARSE: return "parse error";
    case USCO_ERR_IO: return "i/o error";
    case USCO_ERR_CONVERGENCE: return "convergence error";
    case USCO_ERR_CONFIG: return "configuration error";
    case USCO_ERR_FORMAT: return "format error";
    case USCO_ERR_INVALID_ARGUMENT: return "invalid argument";
    case USCO_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void usco_string_free(char* s) { std::free(s); }

usco_status usco_gen_instance(const char* family, const char* params_json, uint64_t seed,
                              const char* out_path) {
  return guarded([&] {
    need(family, "family");
    need(out_path, "out_path");
    const Json params = parse_options(params_json, {"levels", "edges", "dimacs", "undirected", "left",
                                                    "right", "min_degree", "max_degree", "n",
                                                    "pair_scale", "pair_exponent", "pair_min"});
    dispatch(family, [&](auto fam) {
      using F = decltype(fam);
      io::save_instance<F>(out_path, F::gen_instance(params, seed));
    });
  });
}

usco_status usco_gen_pool(const char* instance_path, const char* dist, uint64_t pool_size,
                          uint64_t seed, int inline_payload, const char* out_path) {
  return guarded([&] {
    need(instance_path, "instance_path");
    need(dist, "dist");
    need(out_path, "out_path");
    require(pool_size >= 1, ErrorKind::Config, "pool size must be >= 1");
    dispatch(io::peek_family(instance_path), [&](auto fam) {
      using F = decltype(fam);
      const auto inst = io::load_instance<F>(instance_path);
      const io::PoolRef pool{F::dist_name(F::parse_dist(dist)), seed, pool_size};
      io::save_pool<F>(out_path, inst, pool, inline_payload != 0);
    });
  });
}

usco_status usco_gen_pairs(const char* instance_path, uint64_t count, uint64_t seed,
                           const char* out_path) {
  return guarded([&] {
    need(instance_path, "instance_path");
    need(out_path, "out_path");
    require(count >= 1, ErrorKind::Config, "pair count must be >= 1");
    dispatch(io::peek_family(instance_path), [&](auto fam) {
      using F = decltype(fam);
      const auto inst = io::load_instance<F>(instance_path);
      io::save_pairs<F>(out_path, inst, F::gen_pairs(inst, count, seed));
    });
  });
}

usco_status usco_train(const char* instance_path, const char* pool_path, const char* pairs_path,
                       const char* options_json, usco_model** out_model) {
  return guarded([&] {
    need(instance_path, "instance_path");
    need(pool_path, "pool_path");
    need(pairs_path, "pairs_path");
    need(out_model, "out_model");
    *out_model = nullptr;
    const Json opt = parse_options(options_json, {"k", "seed", "train_size", "c_reg", "eta",
                                                  "margin_factor", "tol", "max_outer_iter",
                                                  "inline", "log_path"});
    dispatch(io::peek_family(instance_path), [&](auto fam) {
      using F = decltype(fam);
      io::ModelArtifact<F> a;
      a.instance = io::load_instance<F>(instance_path);
      const auto pool = io::load_pool<F>(pool_path, a.instance);
      auto pairs = io::load_pairs<F>(pairs_path, a.instance);
      const auto m = opt.value("train_size", pairs.size());
      require(m >= 1 && m <= pairs.size(), ErrorKind::Config,
              "train_size must lie in [1, " + std::to_string(pairs.size()) + "]");
      pairs.resize(m);
      const auto k = opt.value("k", std::min<std::uint64_t>(160, pool.size));
      require(k >= 1 && k <= pool.size, ErrorKind::Config,
              "K = " + std::to_string(k) + " must lie in [1, pool size " + std::to_string(pool.size) + "]");
      const auto seed = opt.value("seed", std::uint64_t{0});
      a.trainer = trainer_from_options(opt, m);
      a.train_size = m;
      a.inline_payload = opt.value("inline", false);
      const auto problem = F::make_problem(a.instance);
      auto sample = io::draw_sample<F>(a.instance, pool, datagen::draw_pool_ids(pool.size, k, seed));
      const auto outcome = train_one_slack(problem, pairs, sample, a.trainer);
      if (opt.contains("log_path")) {
        const auto path = opt.at("log_path").get<std::string>();
        std::ofstream log(path);
        require(bool(log), ErrorKind::Io, "cannot open '" + path + "' for writing");
        write_training_log(log, outcome.log);
      }
      a.model = {std::move(sample), outcome.seed_weights, problem.alpha(), problem.sense()};
      const auto& trace = outcome.objective_trace;
      const auto tail = trace.size() > io::kTraceTail ? trace.size() - io::kTraceTail : 0;
      a.objective_trace_tail.assign(trace.begin() + static_cast<std::ptrdiff_t>(tail), trace.end());
      a.converged = outcome.converged;
      a.probe = pairs.front();
      *out_model = new usco_model{std::move(a)};
    });
  });
}

usco_status usco_model_save(const usco_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    std::visit([&](const auto& a) { io::save_model(path, a); }, model->artifact);
  });
}

usco_status usco_model_load(const char* path, usco_model** out_model) {
  return guarded([&] {
    need(path, "path");
    need(out_model, "out_model");
    *out_model = nullptr;
    dispatch(io::peek_family(path), [&](auto fam) {
      using F = decltype(fam);
      *out_model = new usco_model{io::load_model<F>(path)};
    });
  });
}

void usco_model_free(usco_model* model) { delete model; }

usco_status usco_model_info(const usco_model* model, char** out_json) {
  return guarded([&] {
    need(model, "model");
    need(out_json, "out_json");
    std::visit(
        [&](const auto& a) {
          using F = typename std::remove_cvref_t<decltype(a)>::family_type;
          const Json info{{"family", std::string(F::name)},
                          {"sense", to_string(a.model.sense)},
                          {"alpha", a.model.alpha},
                          {"dist", a.model.sample.dist_spec},
                          {"k", a.model.sample.size()},
                          {"train_size", a.train_size},
                          {"converged", a.converged},
                          {"weights", a.model.weights}};
          *out_json = dup_string(info.dump());
        },
        model->artifact);
  });
}

usco_status usco_predict(const usco_model* model, const char* input_json, int perturb,
                         uint64_t seed, char** out_solution_json) {
  return guarded([&] {
    need(model, "model");
    need(input_json, "input_json");
    need(out_solution_json, "out_solution_json");
    Json input;
    try {
      input = Json::parse(input_json);
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::Parse, std::string("input: ") + e.what());
    }
    std::visit(
        [&](const auto& a) {
          using F = typename std::remove_cvref_t<decltype(a)>::family_type;
          const auto problem = F::make_problem(a.instance);
          const auto x = F::input_from_json(input);
          auto scoring = a.model;
          if (perturb) {
            const double beta = compute_beta(a.model.weights,
                                             static_cast<std::int64_t>(a.train_size), a.model.alpha);
            scoring.weights = perturb_weights(a.model.weights, beta, seed);
            for (double& w : scoring.weights) w = std::max(w, 0.0);
          }
          *out_solution_json = dup_string(F::to_json(predict(problem, scoring, x)).dump());
        },
        model->artifact);
  });
}

usco_status usco_eval(const char* config_json, char** out_csv) {
  return guarded([&] {
    need(out_csv, "out_csv");
    const Json cfg = parse_options(config_json, {"instance", "pairs", "pools", "k", "train_size",
                                                 "test_size", "runs", "seed", "c_reg", "eta",
                                                 "margin_factor", "tol", "perturb", "timing",
                                                 "baselines", "dataset", "report"});
    require(cfg.contains("instance") && cfg.contains("pairs"), ErrorKind::Config,
            "eval: 'instance' and 'pairs' are required");
    const auto instance_path = cfg.at("instance").get<std::string>();
    dispatch(io::peek_family(instance_path), [&](auto fam) {
      using F = decltype(fam);
      const auto inst = io::load_instance<F>(instance_path);
      const auto pairs = io::load_pairs<F>(cfg.at("pairs").get<std::string>(), inst);
      harness::ExperimentConfig config;
      config.dataset = cfg.value("dataset", std::string("custom"));
      for (const auto& p : cfg.value("pools", Json::array()))
        config.pools.push_back(io::load_pool<F>(p.get<std::string>(), inst));
      config.ks = cfg.value("k", std::vector<std::uint64_t>{160});
      config.train_size = cfg.value("train_size", config.train_size);
      config.test_size = cfg.value("test_size", pairs.size() > config.train_size
                                                     ? pairs.size() - config.train_size
                                                     : std::size_t{1});
      config.runs = cfg.value("runs", config.runs);
      config.master_seed = cfg.value("seed", std::uint64_t{0});
      if (cfg.contains("c_reg")) {
        config.auto_c_reg = false;
        config.trainer.c_reg = cfg.at("c_reg").get<double>();
      }
      config.trainer.eta = cfg.value("eta", config.trainer.eta);
      config.trainer.margin_factor = cfg.value("margin_factor", config.trainer.margin_factor);
      config.trainer.tol = cfg.value("tol", config.trainer.tol);
      config.perturb = cfg.value("perturb", false);
      config.timing = cfg.value("timing", false);
      config.baselines = cfg.value("baselines", true);
      validate(harness::effective_trainer(config, config.train_size));
      const auto result = harness::run_experiment<F>(inst, pairs, config);
      *out_csv = dup_string(cfg.value("report", false) ? run_report(result).dump()
                                                       : harness::to_csv(result.rows));
    });
  });
}

usco_status usco_reproduce(const char* family, const char* options_json, char** out) {
  return guarded([&] {
    need(family, "family");
    need(out, "out");
    const Json o = parse_options(options_json, {"seed", "dist", "k", "runs", "train_size",
                                                "test_size", "c_reg", "eta", "margin_factor", "tol",
                                                "perturb", "timing", "baselines", "report"});
    harness::ReproduceOptions opt;
    opt.seed = o.value("seed", opt.seed);
    opt.dists = o.value("dist", std::vector<std::string>{});
    opt.ks = o.value("k", std::vector<std::uint64_t>{});
    if (o.contains("runs")) opt.runs = o.at("runs").get<int>();
    if (o.contains("train_size")) opt.train_size = o.at("train_size").get<std::size_t>();
    if (o.contains("test_size")) opt.test_size = o.at("test_size").get<std::size_t>();
    if (o.contains("c_reg")) opt.c_reg = o.at("c_reg").get<double>();
    if (o.contains("eta")) opt.eta = o.at("eta").get<double>();
    if (o.contains("margin_factor")) opt.margin_factor = o.at("margin_factor").get<double>();
    if (o.contains("tol")) opt.tol = o.at("tol").get<double>();
    opt.perturb = o.value("perturb", false);
    opt.timing = o.value("timing", false);
    opt.baselines = o.value("baselines", true);
    dispatch(family, [&](auto fam) {
      using F = decltype(fam);
      const auto result = harness::reproduce<F>(opt);
      *out = dup_string(o.value("report", false) ? run_report(result).dump()
                                                 : harness::to_csv(result.rows));
    });
  });
}

usco_status usco_compute_beta(const double* seed_weights, size_t count, int64_t m, double alpha,
                              double* out_beta) {
  return guarded([&] {
    need(out_beta, "out_beta");
    if (!seed_weights && count != 0) throw InvalidArgument("seed_weights must not be NULL");
    *out_beta = compute_beta(std::span<const double>(seed_weights, count), m, alpha);
  });
}

usco_status usco_required_k(double lower, double upper, double c_ratio, double eps, double delta1,
                            double delta2, double y_size, int64_t* out_k) {
  return guarded([&] {
    need(out_k, "out_k");
    *out_k = required_k({lower, upper, c_ratio, eps, delta1, delta2, y_size});
  });
}

}  // extern "C"
