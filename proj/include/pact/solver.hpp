#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "pact/contract_core.hpp"
#include "pact/cost_model.hpp"

namespace pact {

struct SolverOptions {
  double scalar_tolerance = 1e-10;  // bracket width for the inner 1-D search on q
  double grid_step = 1e-3;          // oracle grid and non-concave coarse scan

  void validate() const;
};

struct TypeOutcome {
  double theta = 0.0;
  double q = 0.0;
  double p = 0.0;
  double user_utility = 0.0;
  double margin = 0.0;  // p - C_eff(q)
  int block_id = 0;     // consecutive types sharing one item share an id
};

struct SolveResult {
  ContractMenu menu;
  std::vector<TypeOutcome> per_type;
  double expected_profit = 0.0;
  double mean_user_utility = 0.0;
  double social_welfare = 0.0;
  std::vector<double> virtual_weights;  // empty for the first-best benchmark
  // Index ranges [first, last] merged by ironing (size > 1 only).
  std::vector<std::pair<std::size_t, std::size_t>> ironed_segments;
  std::size_t excluded = 0;  // types given the null contract
  bool ir_bottom_binds = false;
  std::vector<bool> adjacent_ic_binds;    // entry k-1 for the pair (k-1, k)
  std::vector<bool> strictly_increasing;  // entry k-1: q_{k-1} < q_k
};

/// Coefficient of v(q_k) in expected profit once the bottom IR and the
/// adjacent downward ICs bind.
std::vector<double> virtual_weights(const TypeSet& types);

/// Prices that make IR bind for the lowest type and every adjacent downward
/// IC bind. `qs` must be nondecreasing within [0, 1].
std::vector<double> prices_from_binding(std::span<const double> qs, const TypeSet& types,
                                        const ValuationSpec& v);

/// Prices the allocation with binding constraints and fills in diagnostics.
SolveResult evaluate_allocation(std::span<const double> qs, const TypeSet& types,
                                const ValuationSpec& v, const CostCurve& curve);

/// Profit-maximizing IC/IR menu under asymmetric information.
SolveResult solve_second_best(const TypeSet& types, const ValuationSpec& v,
                              const CostCurve& curve, const SolverOptions& opts = {});

/// Full-information benchmark: per-type surplus maximization, full extraction.
SolveResult solve_first_best(const TypeSet& types, const ValuationSpec& v,
                             const CostCurve& curve, const SolverOptions& opts = {});

inline constexpr std::size_t kBruteForceMaxTypes = 4;

/// Exhaustive search over every nondecreasing q vector on the grid
/// {0, step, ..., 1}, priced by binding constraints. Test oracle.
SolveResult brute_force_second_best(const TypeSet& types, const ValuationSpec& v,
                                    const CostCurve& curve, double grid_step = 1e-3);

}  // namespace pact
