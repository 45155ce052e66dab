#pragma once

// Restricted one-slack quadratic program
//
//   min_{w >= 0, xi >= 0}  1/2 |w|^2 + c_reg * xi
//   s.t.                   w . d_j >= loss_j - xi   for every working constraint j
//
// solved in the dual. With multipliers lambda_j >= 0, sum_j lambda_j <= c_reg,
// the primal weights are w = max(0, sum_j lambda_j d_j). The budget constraint
// is turned into an equality with a slack multiplier (d = 0, loss = 0), and
// the dual is maximized by pairwise coordinate ascent with an exact line
// search along each piecewise-quadratic direction.

#include <cstdint>
#include <span>
#include <vector>

#include "usco/core.hpp"

namespace usco {

struct WorkingConstraint {
  std::vector<double> direction;  // aggregated feature difference, length K
  double loss = 0.0;              // aggregated loss term, >= 0
};

struct QpResult {
  WeightVector weights;
  double slack = 0.0;
  std::vector<double> multipliers;  // one per working constraint
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double kkt_residual = 0.0;  // max-violating-pair gap at exit
  std::int64_t iterations = 0;
};

/// `warm_start`, when nonempty, holds one feasible multiplier per constraint.
QpResult solve_restricted_qp(std::span<const WorkingConstraint> working_set, std::size_t dim,
                             double c_reg, double qp_tol, std::int64_t qp_max_iter,
                             std::span<const double> warm_start = {});

}  // namespace usco
