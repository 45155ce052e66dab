#include "usco/trainer.hpp"

#include <iomanip>

namespace usco {

void validate(const TrainerParams& p) {
  require(p.c_reg > 0.0, ErrorKind::Config, "trainer: c_reg must be positive");
  require(p.eta > 0.0, ErrorKind::Config, "trainer: eta must be positive");
  require(p.margin_factor > 0.0, ErrorKind::Config, "trainer: margin_factor must be positive");
  require(p.tol > 0.0, ErrorKind::Config, "trainer: tol must be positive");
  require(p.max_outer_iter >= 1, ErrorKind::Config, "trainer: max_outer_iter must be >= 1");
  require(p.qp_tol > 0.0, ErrorKind::Config, "trainer: qp_tol must be positive");
  require(p.qp_max_iter >= 1, ErrorKind::Config, "trainer: qp_max_iter must be >= 1");
  require(p.prune_after >= 1, ErrorKind::Config, "trainer: prune_after must be >= 1");
}

std::string check_contract(const TrainOutcome& out, const TrainerParams& params) {
  for (std::size_t k = 0; k < out.seed_weights.size(); ++k)
    if (!(out.seed_weights[k] >= 0.0)) return "negative weight at index " + std::to_string(k);
  for (std::size_t j = 0; j < out.working_set.size(); ++j) {
    const auto& c = out.working_set[j];
    double wd = 0.0;
    for (std::size_t k = 0; k < c.direction.size(); ++k) wd += out.seed_weights[k] * c.direction[k];
    if (wd < c.loss - out.slack - params.tol)
      return "working constraint " + std::to_string(j) + " violated beyond slack + tol";
  }
  for (std::size_t t = 1; t < out.objective_trace.size(); ++t)
    if (out.objective_trace[t] > out.objective_trace[t - 1] + params.qp_tol)
      return "objective trace increases at iteration " + std::to_string(t + 1);
  return {};
}

void write_training_log(std::ostream& out, const std::vector<IterationRecord>& log) {
  out << "iteration,primal_objective,slack,working_set_size,max_violation\n";
  out << std::setprecision(10);
  for (const auto& r : log)
    out << r.iteration << ',' << r.primal_objective << ',' << r.slack << ','
        << r.working_set_size << ',' << r.max_violation << '\n';
}

}  // namespace usco
