#include "usco/qp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace usco {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// argmax over t in [0, t_max] of  t*a - 1/2 |max(0, z + t*delta)|^2.
double pair_step(std::span<const double> z, std::span<const double> delta, double a, double t_max) {
  struct Event {
    double t;
    std::size_t k;
  };
  double intercept = a;  // derivative at the segment start is intercept - t * slope
  double slope = 0.0;
  std::vector<Event> events;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double dk = delta[k];
    if (dk == 0.0) continue;
    const bool active = z[k] > 0.0 || (z[k] == 0.0 && dk > 0.0);
    if (active) {
      intercept -= dk * z[k];
      slope += dk * dk;
    }
    const double t = -z[k] / dk;
    if (t > 0.0 && t < t_max) events.push_back({t, k});
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.t < y.t; });
  double t_prev = 0.0;
  for (const auto& ev : events) {
    if (slope > 0.0) {
      const double root = intercept / slope;
      if (root <= ev.t) return std::clamp(root, t_prev, t_max);
    } else if (intercept <= 0.0) {
      return t_prev;
    }
    // Coordinate k crosses zero at ev.t.
    const double dk = delta[ev.k];
    if (dk > 0.0) {
      intercept -= dk * z[ev.k];
      slope += dk * dk;
    } else {
      intercept += dk * z[ev.k];
      slope -= dk * dk;
      slope = std::max(slope, 0.0);
    }
    t_prev = ev.t;
  }
  if (slope > 0.0) return std::clamp(intercept / slope, t_prev, t_max);
  return intercept > 0.0 ? t_max : t_prev;
}

}  // namespace

QpResult solve_restricted_qp(std::span<const WorkingConstraint> working_set, std::size_t dim,
                             double c_reg, double qp_tol, std::int64_t qp_max_iter,
                             std::span<const double> warm_start) {
  require(c_reg > 0.0, ErrorKind::Domain, "qp: c_reg must be positive");
  require(qp_tol > 0.0, ErrorKind::Domain, "qp: tolerance must be positive");
  const std::size_t n = working_set.size();
  for (const auto& c : working_set) {
    require(c.direction.size() == dim, ErrorKind::Dimension, "qp: constraint dimension mismatch");
    require(c.loss >= 0.0, ErrorKind::Domain, "qp: negative loss term");
  }
  // Index 0 is the budget slack; constraint j lives at index j + 1.
  std::vector<double> lambda(n + 1, 0.0);
  if (!warm_start.empty()) {
    require(warm_start.size() == n, ErrorKind::Dimension, "qp: warm start size mismatch");
    double used = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      lambda[j + 1] = std::max(0.0, warm_start[j]);
      used += lambda[j + 1];
    }
    if (used > c_reg) {
      for (std::size_t j = 1; j <= n; ++j) lambda[j] *= c_reg / used;
      used = c_reg;
    }
    lambda[0] = c_reg - used;
  } else {
    lambda[0] = c_reg;
  }

  std::vector<double> z(dim, 0.0), w(dim, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    if (lambda[j + 1] > 0.0)
      for (std::size_t k = 0; k < dim; ++k) z[k] += lambda[j + 1] * working_set[j].direction[k];

  auto loss_of = [&](std::size_t i) { return i == 0 ? 0.0 : working_set[i - 1].loss; };
  std::vector<double> grad(n + 1, 0.0);
  auto refresh = [&] {
    for (std::size_t k = 0; k < dim; ++k) w[k] = std::max(0.0, z[k]);
    grad[0] = 0.0;
    for (std::size_t j = 0; j < n; ++j) grad[j + 1] = working_set[j].loss - dot(working_set[j].direction, w);
  };
  refresh();

  QpResult result;
  std::vector<double> delta(dim);
  double gap = 0.0;
  for (;;) {
    std::size_t up = 0, down = n + 1;
    for (std::size_t i = 1; i <= n; ++i)
      if (grad[i] > grad[up]) up = i;
    for (std::size_t i = 0; i <= n; ++i)
      if (lambda[i] > 0.0 && (down == n + 1 || grad[i] < grad[down])) down = i;
    gap = down == n + 1 ? 0.0 : grad[up] - grad[down];
    if (gap <= qp_tol) break;
    if (result.iterations >= qp_max_iter) {
      std::ostringstream msg;
      msg << "qp: no convergence within " << qp_max_iter << " iterations (pair gap " << gap
          << ", tolerance " << qp_tol << ")";
      fail(ErrorKind::Convergence, msg.str());
    }
    ++result.iterations;
    for (std::size_t k = 0; k < dim; ++k) {
      const double du = up == 0 ? 0.0 : working_set[up - 1].direction[k];
      const double dd = down == 0 ? 0.0 : working_set[down - 1].direction[k];
      delta[k] = du - dd;
    }
    const double t = pair_step(z, delta, loss_of(up) - loss_of(down), lambda[down]);
    if (t <= 0.0) {
      // No progress possible along this pair at double precision.
      break;
    }
    lambda[up] += t;
    lambda[down] = t >= lambda[down] ? 0.0 : lambda[down] - t;
    for (std::size_t k = 0; k < dim; ++k) z[k] += t * delta[k];
    refresh();
  }

  result.weights = w;
  result.multipliers.assign(lambda.begin() + 1, lambda.end());
  double max_grad = 0.0;
  for (std::size_t j = 1; j <= n; ++j) max_grad = std::max(max_grad, grad[j]);
  result.slack = max_grad;
  const double wnorm = dot(w, w);
  double lambda_loss = 0.0;
  for (std::size_t j = 0; j < n; ++j) lambda_loss += lambda[j + 1] * working_set[j].loss;
  result.primal_objective = 0.5 * wnorm + c_reg * result.slack;
  result.dual_objective = lambda_loss - 0.5 * wnorm;
  result.kkt_residual = gap;
  return result;
}

}  // namespace usco
