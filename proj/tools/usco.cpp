// Command-line front end. Everything goes through the C API in libusco.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "usco/usco.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code(usco_status s) {
  switch (s) {
    case USCO_ERR_CONFIG:
    case USCO_ERR_INVALID_ARGUMENT:
    case USCO_ERR_PARSE:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

void check(usco_status s) {
  if (s != USCO_OK)
    throw Failure{exit_code(s), std::string(usco_status_name(s)) + ": " + usco_last_error()};
}

// Owns a string handed out by the library.
std::string take(char* p) {
  std::string s = p ? p : "";
  usco_string_free(p);
  return s;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Failure{kExitRuntime, "cannot open '" + out + "' for writing"};
  f << text;
  if (!f) throw Failure{kExitRuntime, "write to '" + out + "' failed"};
}

// key=value; value is read as JSON when it parses, else as a string.
Json parse_params(const std::vector<std::string>& items) {
  Json params = Json::object();
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Failure{kExitConfig, "--set expects key=value, got '" + item + "'"};
    const auto key = item.substr(0, eq);
    const auto raw = item.substr(eq + 1);
    Json v = Json::parse(raw, nullptr, false);
    params[key] = v.is_discarded() ? Json(raw) : v;
  }
  return params;
}

struct TrainerFlags {
  std::optional<double> c_reg, eta, margin_factor, tol;

  void attach(CLI::App* app) {
    app->add_option("--c-reg", c_reg, "Regularization constant C (default 0.01 * train size)");
    app->add_option("--eta", eta, "Loss scale");
    app->add_option("--margin-factor", margin_factor, "Margin factor on the reference score");
    app->add_option("--tol", tol, "Cutting-plane tolerance");
  }

  void fill(Json& j) const {
    if (c_reg) j["c_reg"] = *c_reg;
    if (eta) j["eta"] = *eta;
    if (margin_factor) j["margin_factor"] = *margin_factor;
    if (tol) j["tol"] = *tol;
  }
};

struct ExperimentFlags {
  std::vector<std::uint64_t> ks;
  std::optional<std::size_t> train_size, test_size;
  std::optional<int> runs;
  bool perturb = false;
  bool timing = false;
  bool no_baselines = false;
  TrainerFlags trainer;

  void attach(CLI::App* app) {
    app->add_option("--k", ks, "Configuration counts to sweep")->delimiter(',');
    app->add_option("--train-size", train_size, "Training pairs per run");
    app->add_option("--test-size", test_size, "Test pairs per run");
    app->add_option("--runs", runs, "Repetitions per cell")->check(CLI::PositiveNumber);
    app->add_flag("--perturb", perturb, "Predict with perturbed weights");
    app->add_flag("--timing", timing, "Fill the wall_time_s column");
    app->add_flag("--no-baselines", no_baselines, "Skip the Base/Rand rows");
    trainer.attach(app);
  }

  void fill(Json& j) const {
    if (!ks.empty()) j["k"] = ks;
    if (train_size) j["train_size"] = *train_size;
    if (test_size) j["test_size"] = *test_size;
    if (runs) j["runs"] = *runs;
    j["perturb"] = perturb;
    j["timing"] = timing;
    j["baselines"] = !no_baselines;
    trainer.fill(j);
  }
};

// Unwraps a report document, printing diagnostics for short rows.
std::string finish_report(const std::string& doc) {
  const Json report = Json::parse(doc);
  std::map<std::pair<std::string, std::uint64_t>, std::vector<std::string>> errors;
  for (const auto& r : report.at("runs")) {
    const auto key = std::make_pair(r.at("dist").get<std::string>(), r.at("k").get<std::uint64_t>());
    if (!r.at("ok").get<bool>())
      errors[key].push_back("run " + std::to_string(r.at("run").get<int>()) + ": " +
                            r.at("error").get<std::string>());
    const auto breach = r.at("contract_breach").get<std::string>();
    if (!breach.empty())
      std::cerr << "warning: " << key.first << " K=" << key.second << " run "
                << r.at("run").get<int>() << ": trainer contract: " << breach << '\n';
  }
  for (const auto& row : report.at("rows")) {
    const auto runs = row.at("runs").get<int>();
    const auto requested = row.at("requested_runs").get<int>();
    if (runs >= requested) continue;
    const auto key =
        std::make_pair(row.at("dist").get<std::string>(), row.at("k").get<std::uint64_t>());
    std::cerr << "warning: " << key.first << " K=" << key.second << ": " << runs << " of "
              << requested << " runs succeeded\n";
    for (const auto& e : errors[key]) std::cerr << "  " << e << '\n';
  }
  return report.at("csv").get<std::string>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured prediction for stochastic combinatorial optimization"};
  app.set_version_flag("--version", std::string(usco_version()));
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out;

  // gen-instance
  auto* gi = app.add_subcommand("gen-instance", "Generate a problem instance");
  std::string gi_family;
  std::vector<std::string> gi_set;
  std::string gi_dimacs;
  bool gi_undirected = false;
  gi->add_option("family", gi_family, "ssp, ssc or sbm")->required();
  gi->add_option("--set", gi_set, "Generator parameter key=value (repeatable)");
  gi->add_option("--dimacs", gi_dimacs, "Load an SSP graph from a DIMACS .gr file")
      ->check(CLI::ExistingFile);
  gi->add_flag("--undirected", gi_undirected, "Treat DIMACS arcs as undirected");
  gi->add_option("--seed", seed, "Random seed");
  gi->add_option("--out", out, "Output path")->required();

  // gen-pool
  auto* gp = app.add_subcommand("gen-pool", "Sample a configuration pool");
  std::string gp_instance, gp_dist;
  std::uint64_t gp_size = 10000;
  bool gp_inline = false;
  gp->add_option("--instance", gp_instance, "Instance file")->required()->check(CLI::ExistingFile);
  gp->add_option("--dist", gp_dist, "Configuration distribution")->required();
  gp->add_option("--size", gp_size, "Pool size")->capture_default_str();
  gp->add_flag("--inline", gp_inline, "Store payloads, not just seeds");
  gp->add_option("--seed", seed, "Master seed");
  gp->add_option("--out", out, "Output path")->required();

  // gen-pairs
  auto* gs = app.add_subcommand("gen-pairs", "Generate labelled input/solution pairs");
  std::string gs_instance;
  std::uint64_t gs_count = 800;
  gs->add_option("--instance", gs_instance, "Instance file")->required()->check(CLI::ExistingFile);
  gs->add_option("--count", gs_count, "Number of pairs")->capture_default_str();
  gs->add_option("--seed", seed, "Random seed");
  gs->add_option("--out", out, "Output path")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train a model on a configuration sample");
  std::string tr_instance, tr_pool, tr_pairs, tr_log;
  std::optional<std::uint64_t> tr_k;
  std::optional<std::size_t> tr_train_size;
  std::optional<int> tr_max_iter;
  bool tr_inline = false;
  TrainerFlags tr_flags;
  tr->add_option("--instance", tr_instance, "Instance file")->required()->check(CLI::ExistingFile);
  tr->add_option("--pool", tr_pool, "Pool file")->required()->check(CLI::ExistingFile);
  tr->add_option("--pairs", tr_pairs, "Pairs file")->required()->check(CLI::ExistingFile);
  tr->add_option("--k", tr_k, "Configurations drawn from the pool (default min(160, pool))");
  tr->add_option("--train-size", tr_train_size, "Use the first N pairs (default all)");
  tr->add_option("--max-iter", tr_max_iter, "Cutting-plane iteration cap");
  tr->add_option("--log", tr_log, "Write the per-iteration CSV log here");
  tr->add_flag("--inline", tr_inline, "Embed configuration payloads in the model");
  tr_flags.attach(tr);
  tr->add_option("--seed", seed, "Seed for drawing configurations");
  tr->add_option("--out", out, "Model output path")->required();

  // predict
  auto* pr = app.add_subcommand("predict", "Predict solutions with a trained model");
  std::string pr_model, pr_input, pr_inputs;
  bool pr_perturb = false;
  pr->add_option("--model", pr_model, "Model file")->required()->check(CLI::ExistingFile);
  auto* pr_one = pr->add_option("--input", pr_input, "Input as JSON, e.g. '[0,5]' for ssp");
  pr->add_option("--inputs", pr_inputs, "File with one JSON input per line")
      ->check(CLI::ExistingFile)
      ->excludes(pr_one);
  pr->add_flag("--perturb", pr_perturb, "Sample weights around the trained ones");
  pr->add_option("--seed", seed, "Seed for --perturb");
  pr->add_option("--out", out, "Output path (default stdout)");

  // eval
  auto* ev = app.add_subcommand("eval", "Run an experiment on existing files");
  std::string ev_instance, ev_pairs, ev_dataset = "custom";
  std::vector<std::string> ev_pools;
  ExperimentFlags ev_flags;
  ev->add_option("--instance", ev_instance, "Instance file")->required()->check(CLI::ExistingFile);
  ev->add_option("--pairs", ev_pairs, "Pairs file")->required()->check(CLI::ExistingFile);
  ev->add_option("--pool", ev_pools, "Pool file (repeatable)")->check(CLI::ExistingFile);
  ev->add_option("--dataset", ev_dataset, "Dataset label for the CSV")->capture_default_str();
  ev_flags.attach(ev);
  ev->add_option("--seed", seed, "Master seed");
  ev->add_option("--out", out, "CSV output path (default stdout)");

  // reproduce
  auto* rp = app.add_subcommand("reproduce", "Run a desk-scale preset end to end");
  std::string rp_family;
  std::vector<std::string> rp_dists;
  ExperimentFlags rp_flags;
  std::uint64_t rp_seed = 2021;
  rp->add_option("family", rp_family, "ssp, ssc or sbm")
      ->required()
      ->check(CLI::IsMember({"ssp", "ssc", "sbm"}));
  rp->add_option("--dist", rp_dists, "Distributions to include")->delimiter(',');
  rp_flags.attach(rp);
  rp->add_option("--seed", rp_seed, "Master seed")->capture_default_str();
  rp->add_option("--out", out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gi) {
      Json params = parse_params(gi_set);
      if (!gi_dimacs.empty()) params["dimacs"] = gi_dimacs;
      if (gi_undirected) params["undirected"] = true;
      check(usco_gen_instance(gi_family.c_str(), params.dump().c_str(), seed, out.c_str()));
    } else if (*gp) {
      check(usco_gen_pool(gp_instance.c_str(), gp_dist.c_str(), gp_size, seed, gp_inline,
                          out.c_str()));
    } else if (*gs) {
      check(usco_gen_pairs(gs_instance.c_str(), gs_count, seed, out.c_str()));
    } else if (*tr) {
      Json opt = Json::object();
      if (tr_k) opt["k"] = *tr_k;
      if (tr_train_size) opt["train_size"] = *tr_train_size;
      if (tr_max_iter) opt["max_outer_iter"] = *tr_max_iter;
      if (!tr_log.empty()) opt["log_path"] = tr_log;
      opt["seed"] = seed;
      opt["inline"] = tr_inline;
      tr_flags.fill(opt);
      usco_model* model = nullptr;
      check(usco_train(tr_instance.c_str(), tr_pool.c_str(), tr_pairs.c_str(),
                       opt.dump().c_str(), &model));
      const usco_status s = usco_model_save(model, out.c_str());
      char* info = nullptr;
      if (s == USCO_OK && usco_model_info(model, &info) == USCO_OK) {
        const Json j = Json::parse(take(info));
        if (!j.at("converged").get<bool>())
          std::cerr << "warning: training stopped at the iteration cap before converging\n";
      }
      usco_model_free(model);
      check(s);
    } else if (*pr) {
      if (pr_input.empty() && pr_inputs.empty())
        throw Failure{kExitConfig, "predict: one of --input or --inputs is required"};
      usco_model* model = nullptr;
      check(usco_model_load(pr_model.c_str(), &model));
      std::string text;
      try {
        auto one = [&](const std::string& in) {
          char* sol = nullptr;
          check(usco_predict(model, in.c_str(), pr_perturb, seed, &sol));
          text += take(sol) + '\n';
        };
        if (!pr_input.empty()) {
          one(pr_input);
        } else {
          std::ifstream f(pr_inputs);
          std::string line;
          while (std::getline(f, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos) one(line);
        }
      } catch (...) {
        usco_model_free(model);
        throw;
      }
      usco_model_free(model);
      emit(text, out);
    } else if (*ev) {
      Json cfg{{"instance", ev_instance}, {"pairs", ev_pairs}, {"pools", ev_pools},
               {"seed", seed},            {"dataset", ev_dataset}, {"report", true}};
      ev_flags.fill(cfg);
      char* doc = nullptr;
      check(usco_eval(cfg.dump().c_str(), &doc));
      emit(finish_report(take(doc)), out);
    } else if (*rp) {
      Json opt{{"seed", rp_seed}, {"report", true}};
      if (!rp_dists.empty()) opt["dist"] = rp_dists;
      rp_flags.fill(opt);
      char* doc = nullptr;
      check(usco_reproduce(rp_family.c_str(), opt.dump().c_str(), &doc));
      emit(finish_report(take(doc)), out);
    }
  } catch (const Failure& f) {
    std::cerr << "usco: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "usco: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
