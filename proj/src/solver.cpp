#include "pact/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "pact/error.hpp"
#include "pact/scalar_search.hpp"

namespace pact {

namespace {

// argmax over [0, 1] of weight * v(q) - mass * C(q), C taken as the
// continuous fitted curve (no null-contract discount at 0).
double maximize_surplus(double weight, double mass, const ValuationSpec& v,
                        const CostCurve& curve, const SolverOptions& opts) {
  if (weight <= 0.0) return 0.0;
  if (mass <= 0.0) return 1.0;

  auto objective = [&](double q) { return weight * v(q) - mass * curve.value(q); };

  if (curve.convex()) {
    // Concave objective: locate the root of its derivative.
    auto slope = [&](double q) { return weight * v.derivative(q) - mass * curve.derivative(q); };
    const auto opt = bisect_stationary_point(slope, 0.0, 1.0, opts.scalar_tolerance);
    if (!opt.converged) throw SolverError("inner maximization over q did not converge");
    return opt.x;
  }

  // Not guaranteed unimodal: scan the grid, then refine around the best cell.
  const int cells = static_cast<int>(std::ceil(1.0 / opts.grid_step));
  int best = 0;
  double best_value = objective(0.0);
  for (int i = 1; i <= cells; ++i) {
    const double value = objective(std::min(1.0, i * opts.grid_step));
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  const double lo = std::max(0.0, (best - 1) * opts.grid_step);
  const double hi = std::min(1.0, (best + 1) * opts.grid_step);
  const auto opt = golden_section_maximize(objective, lo, hi, opts.scalar_tolerance);
  if (!opt.converged) throw SolverError("inner maximization over q did not converge");
  return opt.x;
}

struct Block {
  std::size_t first;
  std::size_t last;
  double weight;
  double mass;
  double q;
};

// Separable maximization with pooled-adjacent-violators ironing over the
// type range [first, K). Returns the merged ranges.
std::vector<std::pair<std::size_t, std::size_t>> iron(std::size_t first,
                                                      std::span<const double> weights,
                                                      const TypeSet& types, const ValuationSpec& v,
                                                      const CostCurve& curve,
                                                      const SolverOptions& opts,
                                                      std::vector<double>& qs) {
  std::vector<Block> stack;
  for (std::size_t k = first; k < types.size(); ++k) {
    stack.push_back({k, k, weights[k], types.prob(k),
                     maximize_surplus(weights[k], types.prob(k), v, curve, opts)});
    while (stack.size() >= 2 && stack[stack.size() - 2].q > stack.back().q) {
      const Block top = stack.back();
      stack.pop_back();
      Block& below = stack.back();
      below.last = top.last;
      below.weight += top.weight;
      below.mass += top.mass;
      below.q = maximize_surplus(below.weight, below.mass, v, curve, opts);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& block : stack) {
    for (std::size_t k = block.first; k <= block.last; ++k) qs[k] = block.q;
    if (block.last > block.first) merged.emplace_back(block.first, block.last);
  }
  return merged;
}

double welfare_term(double prob, const TypeOutcome& t) { return prob * (t.user_utility + t.margin); }

}  // namespace

void SolverOptions::validate() const {
  if (!(scalar_tolerance > 0.0)) throw ValidationError("must be > 0", "scalar_tolerance");
  if (!(grid_step > 0.0 && grid_step <= 0.5))
    throw ValidationError("must lie in (0, 0.5]", "grid_step");
}

std::vector<double> virtual_weights(const TypeSet& types) {
  const std::size_t n = types.size();
  std::vector<double> upper_tail(n + 1, 0.0);  // sum of pmf over indices >= k
  for (std::size_t k = n; k-- > 0;) upper_tail[k] = upper_tail[k + 1] + types.prob(k);

  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rent =
        k + 1 < n ? upper_tail[k + 1] * (types.theta(k + 1) - types.theta(k)) : 0.0;
    w[k] = types.prob(k) * types.theta(k) - rent;
  }
  return w;
}

std::vector<double> prices_from_binding(std::span<const double> qs, const TypeSet& types,
                                        const ValuationSpec& v) {
  if (qs.size() != types.size())
    throw ValidationError("allocation length must equal the number of types", "q");
  for (std::size_t k = 0; k < qs.size(); ++k) {
    if (!(qs[k] >= 0.0 && qs[k] <= 1.0)) throw ValidationError("must lie in [0, 1]", "q");
    if (k > 0 && qs[k] < qs[k - 1])
      throw ValidationError("allocation must be nondecreasing in type", "q");
  }
  std::vector<double> p(qs.size());
  p[0] = types.theta(0) * v(qs[0]);
  for (std::size_t k = 1; k < qs.size(); ++k)
    p[k] = p[k - 1] + types.theta(k) * (v(qs[k]) - v(qs[k - 1]));
  return p;
}

SolveResult evaluate_allocation(std::span<const double> qs, const TypeSet& types,
                                const ValuationSpec& v, const CostCurve& curve) {
  const auto prices = prices_from_binding(qs, types, v);
  const std::size_t n = types.size();

  SolveResult out;
  out.menu.items.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.menu.items.push_back({qs[k], prices[k]});

  int block = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& item = out.menu.items[k];
    if (k > 0 && (item.q != out.menu.items[k - 1].q || item.p != out.menu.items[k - 1].p)) ++block;
    TypeOutcome t;
    t.theta = types.theta(k);
    t.q = item.q;
    t.p = item.p;
    t.user_utility = user_utility(t.theta, v, item);
    t.margin = item.p - effective_cost(curve, item.q);
    t.block_id = block;
    out.per_type.push_back(t);
    if (item.q == 0.0) ++out.excluded;
  }

  out.expected_profit = sp_expected_profit(out.menu, types, curve);
  for (std::size_t k = 0; k < n; ++k) {
    out.mean_user_utility += types.prob(k) * out.per_type[k].user_utility;
    out.social_welfare += welfare_term(types.prob(k), out.per_type[k]);
  }

  out.ir_bottom_binds = std::abs(out.per_type[0].user_utility) <= kFeasibilityTolerance;
  for (std::size_t k = 1; k < n; ++k) {
    const double mimic = user_utility(types.theta(k), v, out.menu.items[k - 1]);
    out.adjacent_ic_binds.push_back(std::abs(out.per_type[k].user_utility - mimic) <=
                                    kFeasibilityTolerance);
    out.strictly_increasing.push_back(qs[k - 1] < qs[k]);
  }
  return out;
}

SolveResult solve_second_best(const TypeSet& types, const ValuationSpec& v,
                              const CostCurve& curve, const SolverOptions& opts) {
  opts.validate();
  v.validate();
  if (!admissible_on_unit_interval(curve))
    throw SolverError("cost curve is not nondecreasing and nonnegative on [0, 1]");

  const auto weights = virtual_weights(types);
  const std::size_t n = types.size();

  // With monotone q the excluded types form a prefix. Enumerating its length
  // keeps the fixed cost C(0) > 0 of served types out of the ironing, which
  // only sees the continuous curve.
  std::optional<SolveResult> best;
  for (std::size_t excluded = 0; excluded <= n; ++excluded) {
    std::vector<double> qs(n, 0.0);
    auto segments = iron(excluded, weights, types, v, curve, opts, qs);
    auto candidate = evaluate_allocation(qs, types, v, curve);
    if (!best || candidate.expected_profit > best->expected_profit) {
      candidate.ironed_segments = std::move(segments);
      best = std::move(candidate);
    }
  }
  best->virtual_weights = weights;

  const auto report = verify_feasibility(best->menu, types, v);
  if (!report.feasible)
    throw SolverError("solved menu violates IR/IC constraints by " +
                      std::to_string(report.max_violation));
  return *std::move(best);
}

SolveResult solve_first_best(const TypeSet& types, const ValuationSpec& v,
                             const CostCurve& curve, const SolverOptions& opts) {
  opts.validate();
  v.validate();
  if (!admissible_on_unit_interval(curve))
    throw SolverError("cost curve is not nondecreasing and nonnegative on [0, 1]");

  SolveResult out;
  const std::size_t n = types.size();
  int block = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = types.theta(k);
    double q = maximize_surplus(theta, 1.0, v, curve, opts);
    if (q > 0.0 && theta * v(q) - curve.value(q) <= 0.0) q = 0.0;  // null beats serving

    TypeOutcome t;
    t.theta = theta;
    t.q = q;
    t.p = theta * v(q);
    t.user_utility = theta * v(q) - t.p;
    t.margin = t.p - effective_cost(curve, q);
    if (k > 0 && (t.q != out.per_type.back().q || t.p != out.per_type.back().p)) ++block;
    t.block_id = block;
    out.menu.items.push_back({t.q, t.p});
    out.per_type.push_back(t);
    if (q == 0.0) ++out.excluded;
  }
  out.expected_profit = sp_expected_profit(out.menu, types, curve);
  for (std::size_t k = 0; k < n; ++k) {
    out.mean_user_utility += types.prob(k) * out.per_type[k].user_utility;
    out.social_welfare += welfare_term(types.prob(k), out.per_type[k]);
  }
  out.ir_bottom_binds = true;
  return out;
}

}  // namespace pact
