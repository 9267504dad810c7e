#include "pact/contract_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pact/error.hpp"

namespace pact {

namespace {

constexpr double kPmfTolerance = 1e-12;

void check_item(const ContractItem& item) {
  if (!(item.q >= 0.0 && item.q <= 1.0)) throw ValidationError("q must lie in [0, 1]", "q");
  if (!(std::isfinite(item.p) && item.p >= 0.0)) throw ValidationError("p must be >= 0", "p");
}

void check_aligned(const ContractMenu& menu, const TypeSet& types) {
  if (menu.size() != types.size())
    throw ValidationError("menu has " + std::to_string(menu.size()) + " items but there are " +
                          std::to_string(types.size()) + " types");
}

}  // namespace

TypeSet::TypeSet(std::vector<double> thetas, std::vector<double> pmf)
    : thetas_(std::move(thetas)), pmf_(std::move(pmf)) {
  if (thetas_.empty()) throw ValidationError("at least one type is required", "thetas");
  if (pmf_.size() != thetas_.size())
    throw ValidationError("pmf length must equal the number of types", "pmf");
  for (std::size_t k = 0; k < thetas_.size(); ++k) {
    if (!(std::isfinite(thetas_[k]) && thetas_[k] > 0.0))
      throw ValidationError("types must be positive", "thetas");
    if (k > 0 && !(thetas_[k] > thetas_[k - 1]))
      throw ValidationError("types must be strictly ascending (theta_1 < ... < theta_K)",
                            "thetas");
  }
  for (double p : pmf_)
    if (!(std::isfinite(p) && p >= 0.0))
      throw ValidationError("probabilities must be >= 0", "pmf");
  const double total = std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
  if (std::abs(total - 1.0) > kPmfTolerance)
    throw ValidationError("probabilities must sum to 1 (got " + std::to_string(total) + ")",
                          "pmf");
}

TypeSet TypeSet::uniform(std::vector<double> thetas) {
  std::vector<double> pmf(thetas.size(), thetas.empty() ? 0.0 : 1.0 / thetas.size());
  return TypeSet(std::move(thetas), std::move(pmf));
}

std::string_view to_string(ValuationFamily family) {
  switch (family) {
    case ValuationFamily::log:
      return "log";
    case ValuationFamily::sqrt:
      return "sqrt";
    case ValuationFamily::power:
      return "power";
  }
  return "unknown";
}

ValuationFamily parse_valuation_family(std::string_view name) {
  if (name == "log") return ValuationFamily::log;
  if (name == "sqrt") return ValuationFamily::sqrt;
  if (name == "power") return ValuationFamily::power;
  throw ValidationError("unknown valuation family '" + std::string(name) + "'");
}

void ValuationSpec::validate() const {
  if (!(std::isfinite(scale) && scale > 0.0)) throw ValidationError("must be > 0", "a");
  if (family == ValuationFamily::power && !(exponent > 0.0 && exponent < 1.0))
    throw ValidationError("power exponent must lie in (0, 1)", "b");
}

double ValuationSpec::operator()(double q) const {
  switch (family) {
    case ValuationFamily::log:
      return scale * std::log1p(q);
    case ValuationFamily::sqrt:
      return scale * std::sqrt(q);
    case ValuationFamily::power:
      return scale * std::pow(q, exponent);
  }
  return 0.0;
}

double ValuationSpec::derivative(double q) const {
  switch (family) {
    case ValuationFamily::log:
      return scale / (1.0 + q);
    case ValuationFamily::sqrt:
      return q > 0.0 ? scale / (2.0 * std::sqrt(q)) : std::numeric_limits<double>::infinity();
    case ValuationFamily::power:
      return q > 0.0 ? scale * exponent * std::pow(q, exponent - 1.0)
                     : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double user_utility(double theta, const ValuationSpec& v, const ContractItem& item) {
  if (!(std::isfinite(theta) && theta > 0.0)) throw ValidationError("must be > 0", "theta");
  check_item(item);
  return theta * v(item.q) - item.p;
}

double effective_cost(const CostCurve& curve, double q) {
  return q > 0.0 ? cost_at(curve, q) : 0.0;
}

double sp_expected_profit(const ContractMenu& menu, const TypeSet& types, const CostCurve& curve) {
  check_aligned(menu, types);
  double total = 0.0;
  for (std::size_t k = 0; k < menu.size(); ++k) {
    const auto& item = menu.items[k];
    total += types.prob(k) * (item.p - effective_cost(curve, item.q));
  }
  return total;
}

BestResponse best_response(double theta, const ValuationSpec& v, const ContractMenu& menu,
                           double tie_tolerance) {
  if (menu.items.empty()) throw ValidationError("menu is empty", "menu");
  std::vector<double> utilities(menu.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < menu.size(); ++i) {
    utilities[i] = user_utility(theta, v, menu.items[i]);
    top = std::max(top, utilities[i]);
  }
  // Binding IC constraints make neighbours tie up to rounding; those count as ties.
  const double tie = tie_tolerance * std::max(1.0, std::abs(top));
  for (std::size_t i = menu.size(); i-- > 0;)
    if (utilities[i] >= top - tie) return {i, utilities[i]};
  return {0, utilities[0]};
}

FeasibilityReport verify_feasibility(const ContractMenu& menu, const TypeSet& types,
                                     const ValuationSpec& v, double tolerance) {
  check_aligned(menu, types);
  FeasibilityReport report;
  const std::size_t n = menu.size();

  std::vector<double> own(n);
  for (std::size_t k = 0; k < n; ++k) {
    own[k] = user_utility(types.theta(k), v, menu.items[k]);
    ++report.constraints_checked;
    if (own[k] < 0.0) report.max_violation = std::max(report.max_violation, -own[k]);
    if (own[k] < -tolerance) report.ir_violations.push_back({k, k, own[k]});
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      ++report.constraints_checked;
      const double slack = own[k] - user_utility(types.theta(k), v, menu.items[j]);
      if (slack < 0.0) report.max_violation = std::max(report.max_violation, -slack);
      if (slack < -tolerance) report.ic_violations.push_back({k, j, slack});
    }
  }
  report.feasible = report.max_violation <= tolerance;
  return report;
}

}  // namespace pact
