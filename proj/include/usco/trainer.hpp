#pragma once

// One-slack cutting-plane training of the seed vector.
//
// Each outer iteration runs loss-augmented inference on every training pair
// under the current weights, folds the per-pair constraints into a single
// aggregated one-slack constraint, and re-solves the restricted QP when that
// constraint is violated by more than the current slack plus `tol`.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "usco/core.hpp"
#include "usco/parallel.hpp"
#include "usco/qp.hpp"

namespace usco {

struct TrainerParams {
  double c_reg = 1.0;
  double eta = 1.0;
  double margin_factor = 1.0;
  double tol = 1e-4;
  int max_outer_iter = 200;
  double qp_tol = 1e-8;
  std::int64_t qp_max_iter = 100000;
  int prune_after = 50;  // drop constraints inactive for this many iterations
  /// Divide every feature by the mean |f| over the reference features, so that
  /// c_reg means the same thing whatever the objective's units.
  bool normalize_features = true;

  bool operator==(const TrainerParams&) const = default;
};

void validate(const TrainerParams& params);

template <class Input, class Solution>
struct TrainingPair {
  Input x;
  Solution y_ref;

  bool operator==(const TrainingPair&) const = default;
};

/// One line of the training log.
struct IterationRecord {
  int iteration = 0;
  double primal_objective = 0.0;  // 1/2|w|^2 + c_reg * slack at this iterate
  double slack = 0.0;
  std::size_t working_set_size = 0;
  double max_violation = 0.0;     // violation of the fresh aggregated constraint
  double restricted_objective = 0.0;  // optimum of the restricted QP after the update
};

struct TrainOutcome {
  /// Weights over the (scaled) features; predictions are invariant to the scale.
  WeightVector seed_weights;
  double feature_scale = 1.0;  // features were divided by this during training
  double slack = 0.0;  // slack of seed_weights against every recorded constraint
  /// Best primal objective seen so far, one entry per outer iteration after the first QP solve.
  std::vector<double> objective_trace;
  /// Restricted-QP optimum after each re-solve; nondecreasing as cuts are added.
  std::vector<double> restricted_trace;
  std::vector<IterationRecord> log;
  std::vector<WorkingConstraint> working_set;
  std::size_t working_set_size = 0;
  bool converged = false;
};

/// Empty when the outcome honours the trainer contract: nonnegative weights,
/// every kept constraint satisfied within slack + tol, and a nonincreasing
/// objective trace (within qp_tol). Otherwise a description of the first breach.
std::string check_contract(const TrainOutcome& outcome, const TrainerParams& params);

void write_training_log(std::ostream& out, const std::vector<IterationRecord>& log);

/// 0 iff the canonical encodings agree.
template <UscoProblem P>
double zero_one_loss(const typename P::Solution& y_ref, const typename P::Solution& y) {
  return P::encode(y_ref) == P::encode(y) ? 0.0 : 1.0;
}

/// Orientation of a constraint direction: the reference must out-score y by
/// the loss. Maximization: factor*K(y_ref) - K(y); minimization: K(y) - factor*K(y_ref).
inline std::vector<double> constraint_direction(Sense sense, std::span<const double> ref_features,
                                                std::span<const double> features,
                                                double margin_factor) {
  std::vector<double> d(features.size());
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] = sense == Sense::Maximize ? margin_factor * ref_features[k] - features[k]
                                    : features[k] - margin_factor * ref_features[k];
  return d;
}

template <class Solution>
struct LossAugmentedResult {
  Solution y;
  double violation = 0.0;
  double loss = 0.0;
};

/// With the zero-one loss the loss term is constant over y != y_ref, so the
/// oracle's optimizer of the score alone is returned.
template <UscoProblem P>
LossAugmentedResult<typename P::Solution> loss_augmented_inference(
    const P& problem, const ScoreModel<typename P::Payload>& model,
    const TrainingPair<typename P::Input, typename P::Solution>& pair, double eta,
    double margin_factor = 1.0) {
  auto y = predict(problem, model, pair.x);
  const double loss = zero_one_loss<P>(pair.y_ref, y);
  const double ref_score = affine_score(problem, model, pair.x, pair.y_ref);
  const double y_score = affine_score(problem, model, pair.x, y);
  const double separation = model.sense == Sense::Maximize ? margin_factor * ref_score - y_score
                                                           : y_score - margin_factor * ref_score;
  return {std::move(y), eta * loss - separation, loss};
}

template <UscoProblem P>
TrainOutcome train_one_slack(
    const P& problem,
    const std::vector<TrainingPair<typename P::Input, typename P::Solution>>& pairs,
    const ConfigurationSample<typename P::Payload>& sample, const TrainerParams& params) {
  validate(params);
  require(!pairs.empty(), ErrorKind::Domain, "train: no training pairs");
  require(sample.size() > 0, ErrorKind::Domain, "train: empty configuration sample");
  const std::size_t m = pairs.size();
  const std::size_t dim = sample.size();
  const Sense sense = problem.sense();
  const double inv_m = 1.0 / static_cast<double>(m);

  FeatureCache cache;
  std::vector<std::vector<double>> ref_features(m);
  for (std::size_t i = 0; i < m; ++i) {
    try {
      ref_features[i] = cache.get(problem, pairs[i].x, pairs[i].y_ref, sample);
    } catch (const Error& e) {
      fail(e.kind(), "train: pair " + std::to_string(i) + ": " + e.what());
    }
  }
  double scale = 1.0;
  if (params.normalize_features) {
    double total = 0.0;
    for (const auto& f : ref_features)
      for (double v : f) total += std::abs(v);
    if (total > 0.0 && std::isfinite(total)) scale = total / static_cast<double>(m * dim);
  }
  const double inv_scale = 1.0 / scale;

  TrainOutcome out;
  out.feature_scale = scale;
  std::vector<WorkingConstraint> working;
  std::vector<double> multipliers;
  std::vector<int> idle;
  WeightVector w(dim, 0.0);
  WeightVector best_w = w;
  double best_primal = std::numeric_limits<double>::infinity();
  double best_violation = 0.0;

  std::vector<typename P::Solution> predicted(m);
  std::vector<double> losses(m);
  for (int iter = 1; iter <= params.max_outer_iter; ++iter) {
    const auto scorer = problem.make_scorer(sample.configs, w);
    parallel_for(m, [&](std::size_t i) {
      try {
        predicted[i] = problem.solve(pairs[i].x, scorer);
      } catch (const Error& e) {
        fail(e.kind(), "train: oracle failed on pair " + std::to_string(i) + ": " + e.what());
      }
      losses[i] = zero_one_loss<P>(pairs[i].y_ref, predicted[i]);
    });
    std::vector<std::vector<double>> features(m);
    parallel_for(m, [&](std::size_t i) {
      features[i] = losses[i] == 0.0 ? ref_features[i]
                                     : cache.get(problem, pairs[i].x, predicted[i], sample);
    });

    WorkingConstraint cut{std::vector<double>(dim, 0.0), 0.0};
    for (std::size_t i = 0; i < m; ++i) {
      const auto d = constraint_direction(sense, ref_features[i], features[i], params.margin_factor);
      for (std::size_t k = 0; k < dim; ++k) cut.direction[k] += inv_m * inv_scale * d[k];
      cut.loss += params.eta * inv_m * losses[i];
    }

    double wd = 0.0, wnorm = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      wd += w[k] * cut.direction[k];
      wnorm += w[k] * w[k];
    }
    const double violation = cut.loss - wd;
    double slack = 0.0;
    for (const auto& c : working) {
      double s = c.loss;
      for (std::size_t k = 0; k < dim; ++k) s -= w[k] * c.direction[k];
      slack = std::max(slack, s);
    }
    const double primal = 0.5 * wnorm + params.c_reg * std::max(slack, violation);
    // The all-zero start ties every solution, so only QP iterates compete.
    if (!out.restricted_trace.empty()) {
      if (primal < best_primal) {
        best_primal = primal;
        best_w = w;
        best_violation = violation;
      }
      out.objective_trace.push_back(best_primal);
    }

    IterationRecord rec{iter, primal, slack, working.size(), violation, 0.0};
    if (violation <= slack + params.tol) {
      out.converged = true;
      rec.restricted_objective = out.restricted_trace.empty() ? 0.0 : out.restricted_trace.back();
      out.log.push_back(rec);
      break;
    }

    working.push_back(std::move(cut));
    multipliers.push_back(0.0);
    idle.push_back(0);
    const auto qp = solve_restricted_qp(working, dim, params.c_reg, params.qp_tol,
                                        params.qp_max_iter, multipliers);
    w = qp.weights;
    multipliers = qp.multipliers;
    out.restricted_trace.push_back(qp.primal_objective);
    rec.restricted_objective = qp.primal_objective;
    rec.working_set_size = working.size();
    out.log.push_back(rec);

    for (std::size_t j = 0; j < working.size(); ++j) idle[j] = multipliers[j] > 0.0 ? 0 : idle[j] + 1;
    for (std::size_t j = working.size(); j-- > 0;) {
      if (idle[j] >= params.prune_after) {
        working.erase(working.begin() + static_cast<std::ptrdiff_t>(j));
        multipliers.erase(multipliers.begin() + static_cast<std::ptrdiff_t>(j));
        idle.erase(idle.begin() + static_cast<std::ptrdiff_t>(j));
      }
    }
  }

  out.seed_weights = best_w;
  double slack = std::max(0.0, best_violation);
  for (const auto& c : working) {
    double s = c.loss;
    for (std::size_t k = 0; k < dim; ++k) s -= best_w[k] * c.direction[k];
    slack = std::max(slack, s);
  }
  out.slack = slack;
  out.working_set_size = working.size();
  out.working_set = std::move(working);
  return out;
}

}  // namespace usco
