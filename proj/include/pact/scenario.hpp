#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pact/contract_core.hpp"
#include "pact/cost_model.hpp"
#include "pact/qos_model.hpp"
#include "pact/solver.hpp"

namespace pact {

struct Scenario {
  std::string task_label;
  Environment environment;
  std::vector<ServiceConfig> services;
  // Reference QoS per service (optional `expected_q`), reported against.
  std::vector<std::optional<double>> expected_q;
  CostParams cost_params;
  TypeSet types;
  ValuationSpec valuation;
  CurveFamily cost_fit = CurveFamily::quadratic;
  SolverOptions solver;
  bool liability_enabled = false;
};

/// Parses and validates a JSON scenario document. Unknown keys are rejected.
/// Errors carry the offending field path, e.g. "services[3].satisfaction".
Scenario load_scenario(std::string_view document);
Scenario load_scenario_file(const std::filesystem::path& path);

struct QosRow {
  ServiceConfig service;
  QosLevel level;
  std::optional<double> expected_q;
  std::optional<double> deviation;  // level.q - expected_q
};

struct QosReport {
  std::vector<QosRow> rows;
  QosTable table;
  double gamma_calibration = 1.0;
  double max_abs_deviation = 0.0;
  bool latency_warning = false;
};

QosReport run_qos(const Scenario& scenario);

/// (q_k, C(q_k)) per service; liability scaled by `liability_multiplier`
/// when included.
std::vector<CostPoint> cost_points(const Scenario& scenario, bool with_liability,
                                   double liability_multiplier = 1.0);

enum class SolveMode { second_best, first_best };

std::string_view to_string(SolveMode mode);

struct SolveRun {
  SolveMode mode = SolveMode::second_best;
  bool liability = false;
  std::vector<CostPoint> points;
  CostCurve curve;
  SolveResult result;
  FeasibilityReport feasibility;
};

/// Fits C(q) and solves. `liability` overrides the scenario flag when set.
SolveRun run_solve(const Scenario& scenario, SolveMode mode,
                   std::optional<bool> liability = std::nullopt);

struct SweepRow {
  double multiplier = 0.0;
  double expected_profit = 0.0;
  double mean_q = 0.0;  // pmf-weighted
  double mean_p = 0.0;  // pmf-weighted
  double social_welfare = 0.0;
};

/// Second-best solve per liability multiplier (applied to every service's
/// base liability; the scenario's liability flag is ignored).
std::vector<SweepRow> run_sweep_liability(const Scenario& scenario,
                                          std::span<const double> multipliers);

inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

struct SimulationOutcome {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> counts;  // draws that selected each menu item
  double empirical_profit = 0.0;
  double mean_user_utility = 0.0;
  double social_welfare = 0.0;
};

/// Draws n types i.i.d. from the pmf (mt19937_64, 53-bit uniforms, inverse
/// CDF) and lets each pick its best response. Rejects menus infeasible at
/// `tolerance`; utilities within it count as ties.
SimulationOutcome simulate_population(const TypeSet& types, const ValuationSpec& v,
                                      const CostCurve& curve, const ContractMenu& menu,
                                      std::size_t n, std::uint64_t seed,
                                      double tolerance = kFeasibilityTolerance);

/// Same, with the cost curve fitted from the scenario.
SimulationOutcome simulate_population(const Scenario& scenario, const ContractMenu& menu,
                                      std::size_t n, std::uint64_t seed,
                                      double tolerance = kFeasibilityTolerance);

}  // namespace pact
