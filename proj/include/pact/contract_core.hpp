#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pact/cost_model.hpp"

namespace pact {

/// Ordered user types with their probabilities. Construction validates:
/// thetas strictly ascending and positive, pmf nonnegative summing to 1.
class TypeSet {
 public:
  TypeSet() : TypeSet({1.0}, {1.0}) {}
  TypeSet(std::vector<double> thetas, std::vector<double> pmf);
  static TypeSet uniform(std::vector<double> thetas);

  std::size_t size() const { return thetas_.size(); }
  std::span<const double> thetas() const { return thetas_; }
  std::span<const double> pmf() const { return pmf_; }
  double theta(std::size_t k) const { return thetas_[k]; }
  double prob(std::size_t k) const { return pmf_[k]; }

 private:
  std::vector<double> thetas_;
  std::vector<double> pmf_;
};

enum class ValuationFamily {
  log,    // a ln(1 + q)
  sqrt,   // a sqrt(q)
  power,  // a q^b, 0 < b < 1
};

std::string_view to_string(ValuationFamily family);
ValuationFamily parse_valuation_family(std::string_view name);

/// Concave increasing valuation of QoS with v(0) = 0.
struct ValuationSpec {
  ValuationFamily family = ValuationFamily::log;
  double scale = 1.0;
  double exponent = 0.5;  // power family only

  void validate() const;
  double operator()(double q) const;
  /// v'(q); +inf at q = 0 for the sqrt and power families.
  double derivative(double q) const;
};

struct ContractItem {
  double q = 0.0;
  double p = 0.0;
};

/// One item per type, index-aligned with a TypeSet.
struct ContractMenu {
  std::vector<ContractItem> items;

  std::size_t size() const { return items.size(); }
};

struct ConstraintViolation {
  std::size_t type = 0;   // 0-based type index
  std::size_t other = 0;  // item the type deviates to (IC); equals `type` for IR
  double slack = 0.0;     // negative when violated
};

struct FeasibilityReport {
  std::vector<ConstraintViolation> ir_violations;
  std::vector<ConstraintViolation> ic_violations;
  double max_violation = 0.0;
  std::size_t constraints_checked = 0;
  bool feasible = true;
};

struct BestResponse {
  std::size_t index = 0;  // 0-based
  double utility = 0.0;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

double user_utility(double theta, const ValuationSpec& v, const ContractItem& item);

/// Provider cost of serving q: zero for the null contract q = 0.
double effective_cost(const CostCurve& curve, double q);

double sp_expected_profit(const ContractMenu& menu, const TypeSet& types, const CostCurve& curve);

inline constexpr double kTieTolerance = 1e-12;

/// Utility-maximizing item. Utilities within `tie_tolerance` (scaled by
/// max(1, |best|)) of the best are ties, resolved toward the higher index.
BestResponse best_response(double theta, const ValuationSpec& v, const ContractMenu& menu,
                           double tie_tolerance = kTieTolerance);

/// Checks every IR constraint and every pairwise IC constraint.
FeasibilityReport verify_feasibility(const ContractMenu& menu, const TypeSet& types,
                                     const ValuationSpec& v,
                                     double tolerance = kFeasibilityTolerance);

}  // namespace pact
