#include <cmath>
#include <limits>
#include <string>

#include "pact/error.hpp"
#include "pact/solver.hpp"

namespace pact {

// Expected revenue under binding prices telescopes into a sum over adjacent
// steps: sum_k theta_k * P(type >= k) * (v(q_k) - v(q_{k-1})). Profit is thus
// a chain over consecutive q values, and the search over all nondecreasing
// grid vectors is carried out exactly by dynamic programming on that chain.
SolveResult brute_force_second_best(const TypeSet& types, const ValuationSpec& v,
                                    const CostCurve& curve, double grid_step) {
  const std::size_t n = types.size();
  if (n > kBruteForceMaxTypes)
    throw ValidationError("brute force supports at most " + std::to_string(kBruteForceMaxTypes) +
                          " types");
  if (!(grid_step > 0.0 && grid_step <= 0.5))
    throw ValidationError("must lie in (0, 0.5]", "grid_step");
  v.validate();

  std::vector<double> grid;
  for (long long j = 0;; ++j) {
    const double q = static_cast<double>(j) * grid_step;
    if (q >= 1.0 - 1e-12) break;
    grid.push_back(q);
  }
  grid.push_back(1.0);
  const std::size_t g = grid.size();

  std::vector<double> val(g);
  std::vector<double> cost(g);
  for (std::size_t j = 0; j < g; ++j) {
    val[j] = v(grid[j]);
    cost[j] = grid[j] > 0.0 ? curve.value(grid[j]) : 0.0;
  }

  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) tail[k] = tail[k + 1] + types.prob(k);

  // best[j]: best partial profit with the current type at grid[j].
  // from[k][j]: grid index of type k-1 on that best path.
  std::vector<double> best(g);
  std::vector<std::vector<std::size_t>> from(n, std::vector<std::size_t>(g, 0));
  const double r0 = types.theta(0) * tail[0];
  for (std::size_t j = 0; j < g; ++j) best[j] = r0 * val[j] - types.prob(0) * cost[j];

  for (std::size_t k = 1; k < n; ++k) {
    const double rk = types.theta(k) * tail[k];
    std::vector<double> next(g);
    double run = -std::numeric_limits<double>::infinity();
    std::size_t run_at = 0;
    for (std::size_t j = 0; j < g; ++j) {
      const double candidate = best[j] - rk * val[j];
      if (candidate > run) {
        run = candidate;
        run_at = j;
      }
      next[j] = run + rk * val[j] - types.prob(k) * cost[j];
      from[k][j] = run_at;
    }
    best.swap(next);
  }

  std::size_t at = 0;
  for (std::size_t j = 1; j < g; ++j)
    if (best[j] > best[at]) at = j;
  std::vector<double> qs(n);
  for (std::size_t k = n; k-- > 0;) {
    qs[k] = grid[at];
    at = from[k][at];
  }
  return evaluate_allocation(qs, types, v, curve);
}

}  // namespace pact
