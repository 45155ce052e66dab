#include "usco/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "usco/rng.hpp"

namespace usco::sbm {

void validate_graph(const MatchGraph& graph) {
  require(graph.n >= 1, ErrorKind::Domain, "match graph: n must be >= 1");
  require(graph.mu.size() == static_cast<std::size_t>(graph.n) * graph.n, ErrorKind::Dimension,
          "match graph: mean matrix must be n x n");
  for (double m : graph.mu)
    require(m >= 1.0 && m <= 10.0, ErrorKind::Domain, "match graph: mean outside [1, 10]");
}

namespace {

void check_id_set(const std::vector<int>& ids, int n, const char* what) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    require(ids[i] >= 0 && ids[i] < n, ErrorKind::Domain,
            std::string("sbm input: ") + what + " id out of range");
    require(i == 0 || ids[i - 1] < ids[i], ErrorKind::Domain,
            std::string("sbm input: ") + what + " ids must be sorted and unique");
  }
}

}  // namespace

void validate_input(const MatchGraph& graph, const SbmInput& x) {
  require(!x.left.empty() && x.left.size() == x.right.size(), ErrorKind::Domain,
          "sbm input: |L*| and |R*| must be equal and nonzero");
  check_id_set(x.left, graph.n, "L*");
  check_id_set(x.right, graph.n, "R*");
}

namespace {

void check_matching(int n, const SbmInput& x, const SbmMatching& y) {
  require(y.right_of.size() == x.left.size(), ErrorKind::Feasibility,
          "matching: must assign every node of L*");
  std::vector<int> image = y.right_of;
  std::sort(image.begin(), image.end());
  require(image == x.right, ErrorKind::Feasibility, "matching: image is not a bijection onto R*");
  (void)n;
}

}  // namespace

void validate_matching(const MatchGraph& graph, const SbmInput& x, const SbmMatching& y) {
  validate_input(graph, x);
  check_matching(graph.n, x, y);
}

std::vector<int> min_cost_assignment(const CostMatrix& costs) {
  require(costs.rows == costs.cols, ErrorKind::Domain, "hungarian: cost matrix must be square");
  require(costs.values.size() == costs.rows * costs.cols, ErrorKind::Dimension,
          "hungarian: cost matrix storage size mismatch");
  double scale = 1.0;
  for (double c : costs.values) {
    require(std::isfinite(c), ErrorKind::Domain, "hungarian: non-finite cost");
    scale = std::max(scale, std::abs(c));
  }
  const std::size_t n = costs.rows;
  if (n == 0) return {};

  // Shortest augmenting paths with potentials; 1-based, column 0 is a sentinel.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = costs(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_of(n), row_of(n);
  for (std::size_t j = 1; j <= n; ++j) {
    col_of[owner[j] - 1] = static_cast<int>(j - 1);
    row_of[j - 1] = static_cast<int>(owner[j] - 1);
  }

  // Every optimal assignment uses only zero-reduced-cost edges under these
  // potentials; pick the lexicographically smallest perfect matching there.
  const double tol = 1e-10 * scale * static_cast<double>(n);
  std::vector<std::vector<int>> tight(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (costs(i, j) - u[i + 1] - v[j + 1] <= tol) tight[i].push_back(static_cast<int>(j));

  std::vector<int> parent_col(n), parent_row(n);
  std::vector<char> seen(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int freed = col_of[i];
    for (int j : tight[i]) {
      if (j >= freed) break;
      const int r = row_of[j];
      if (r < static_cast<int>(i)) continue;
      // Row r gives up column j; search an alternating path over rows > i
      // that ends in the column i is leaving.
      std::fill(seen.begin(), seen.end(), 0);
      std::vector<int> queue{r};
      seen[r] = 1;
      int found_row = -1;
      for (std::size_t head = 0; head < queue.size() && found_row < 0; ++head) {
        const int a = queue[head];
        for (int c : tight[a]) {
          if (c == j) continue;
          if (c == freed) {
            found_row = a;
            parent_col[a] = c;
            break;
          }
          const int b = row_of[c];
          if (b <= static_cast<int>(i) || seen[b]) continue;
          seen[b] = 1;
          parent_row[b] = a;
          parent_col[b] = c;  // column b holds, to be taken by its parent
          queue.push_back(b);
        }
      }
      if (found_row < 0) continue;
      // Shift: found_row takes `freed`; each row on the path takes the column
      // its child held.
      int a = found_row;
      int take = freed;
      while (true) {
        const int held = col_of[a];
        col_of[a] = take;
        row_of[take] = a;
        if (a == r) break;
        take = held;
        a = parent_row[a];
      }
      col_of[i] = j;
      row_of[j] = static_cast<int>(i);
      break;
    }
  }
  return col_of;
}

SbmMatching hungarian_oracle(const CostMatrix& costs, const SbmInput& x) {
  require(costs.rows == x.left.size() && costs.cols == x.right.size(), ErrorKind::Domain,
          "hungarian: cost matrix shape does not match |L*| x |R*|");
  const auto cols = min_cost_assignment(costs);
  SbmMatching y;
  y.right_of.reserve(cols.size());
  for (int c : cols) y.right_of.push_back(x.right[static_cast<std::size_t>(c)]);
  return y;
}

double matching_cost(const CostMatrix& full_costs, int n, const SbmInput& x, const SbmMatching& y) {
  require(full_costs.rows == static_cast<std::size_t>(n) && full_costs.cols == full_costs.rows,
          ErrorKind::Dimension, "matching_cost: cost matrix must be n x n");
  double total = 0.0;
  for (std::size_t a = 0; a < x.left.size(); ++a)
    total += full_costs(static_cast<std::size_t>(x.left[a]), static_cast<std::size_t>(y.right_of[a]));
  return total;
}

SbmConfig sample_sbm_config(const MatchGraph& graph, SbmDist dist, std::uint64_t rng_seed) {
  validate_graph(graph);
  if (dist.kind == SbmDist::Q)
    require(dist.q > 0.0 && std::isfinite(dist.q), ErrorKind::Config, "phi_q requires q > 0");
  Rng rng(rng_seed);
  SbmConfig config;
  config.cost.resize(graph.mu.size());
  for (std::size_t e = 0; e < graph.mu.size(); ++e) {
    const double mu = graph.mu[e];
    double w = 0.0;
    switch (dist.kind) {
      case SbmDist::Uni: w = rng.uniform(1.0, 10.0); break;
      case SbmDist::Q: w = rng.uniform(mu - dist.q * mu, mu + dist.q * mu); break;
      case SbmDist::True: w = mu + kSigmaRatio * mu * rng.normal(); break;
    }
    config.cost[e] = std::max(w, kWeightFloor);
  }
  return config;
}

double expected_matching_cost(const MatchGraph& graph, const SbmInput& x, const SbmMatching& y) {
  validate_matching(graph, x, y);
  double total = 0.0;
  for (std::size_t a = 0; a < x.left.size(); ++a) total += graph.mean(x.left[a], y.right_of[a]);
  return total;
}

SbmMatching rand_baseline(const SbmInput& x, std::uint64_t rng_seed) {
  Rng rng(derive_seed(rng_seed, "sbm-rand"));
  SbmMatching y{x.right};
  for (std::size_t i = y.right_of.size(); i > 1; --i) {
    const auto j = rng.uniform_int(0, static_cast<std::int64_t>(i) - 1);
    std::swap(y.right_of[i - 1], y.right_of[static_cast<std::size_t>(j)]);
  }
  return y;
}

double SbmProblem::objective(const Input& x, const Solution& y, const Payload& c) const {
  double total = 0.0;
  for (std::size_t a = 0; a < x.left.size(); ++a)
    total += c.cost[static_cast<std::size_t>(x.left[a]) * n_ + y.right_of[a]];
  return total;
}

std::vector<double> SbmProblem::batch_objective(
    const Input& x, const Solution& y, std::span<const Configuration<Payload>> configs) const {
  std::vector<std::size_t> cells;
  cells.reserve(x.left.size());
  for (std::size_t a = 0; a < x.left.size(); ++a)
    cells.push_back(static_cast<std::size_t>(x.left[a]) * n_ + y.right_of[a]);
  std::vector<double> out;
  out.reserve(configs.size());
  for (const auto& c : configs) {
    double total = 0.0;
    for (std::size_t cell : cells) total += c.payload.cost[cell];
    out.push_back(total);
  }
  return out;
}

void SbmProblem::check_feasible(const Input& x, const Solution& y) const {
  require(!x.left.empty() && x.left.size() == x.right.size(), ErrorKind::Feasibility,
          "sbm input: |L*| and |R*| must be equal and nonzero");
  check_id_set(x.left, n_, "L*");
  check_id_set(x.right, n_, "R*");
  check_matching(n_, x, y);
}

SbmProblem::Scorer SbmProblem::make_scorer(std::span<const Configuration<Payload>> configs,
                                           std::span<const double> weights) const {
  require(configs.size() == weights.size(), ErrorKind::Dimension,
          "sbm scorer: " + std::to_string(weights.size()) + " weights for " +
              std::to_string(configs.size()) + " configurations");
  const auto cells = static_cast<std::size_t>(n_) * n_;
  CostMatrix total{static_cast<std::size_t>(n_), static_cast<std::size_t>(n_),
                   std::vector<double>(cells, 0.0)};
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const auto& c = configs[i].payload.cost;
    require(c.size() == cells, ErrorKind::Dimension, "sbm scorer: configuration size mismatch");
    for (std::size_t e = 0; e < cells; ++e) total.values[e] += w * c[e];
  }
  return total;
}

SbmProblem::Solution SbmProblem::solve(const Input& x, const Scorer& costs) const {
  require(!x.left.empty() && x.left.size() == x.right.size(), ErrorKind::Domain,
          "sbm input: |L*| and |R*| must be equal and nonzero");
  const std::size_t m = x.left.size();
  CostMatrix sub{m, m, std::vector<double>(m * m)};
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      sub.values[a * m + b] =
          costs(static_cast<std::size_t>(x.left[a]), static_cast<std::size_t>(x.right[b]));
  return hungarian_oracle(sub, x);
}

std::string SbmProblem::encode(const Solution& y) {
  std::string out;
  for (std::size_t i = 0; i < y.right_of.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(y.right_of[i]);
  }
  return out;
}

std::string SbmProblem::encode_input(const Input& x) {
  std::string out;
  for (int l : x.left) out += std::to_string(l) + ",";
  out.push_back('/');
  for (int r : x.right) out += std::to_string(r) + ",";
  return out;
}

}  // namespace usco::sbm
