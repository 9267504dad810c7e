#include "pact/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pact/error.hpp"

namespace pact {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
  if (!obj.is_object()) throw ValidationError("expected an object", path);
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key))
      throw ValidationError("unknown key '" + key + "'", path.empty() ? key : path + "." + key);
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <typename T>
void read(const json& obj, const std::string& key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("wrong value type", join(path, key));
  }
}

template <typename T>
void read_required(const json& obj, const std::string& key, T& out, const std::string& path) {
  if (!obj.contains(key)) throw ValidationError("missing required key", join(path, key));
  read(obj, key, out, path);
}

Environment parse_environment(const json& j) {
  const std::string path = "environment";
  reject_unknown(j, {"rate_bps", "alpha_tok", "alpha_detok", "tokens_per_kb_in",
                     "tokens_per_kb_out", "delta", "gamma_calibration"},
                 path);
  Environment env;
  read(j, "rate_bps", env.rate_bps, path);
  read(j, "alpha_tok", env.alpha_tok, path);
  read(j, "alpha_detok", env.alpha_detok, path);
  read(j, "tokens_per_kb_in", env.tokens_per_kb_in, path);
  read(j, "tokens_per_kb_out", env.tokens_per_kb_out, path);
  read(j, "delta", env.delta, path);
  read(j, "gamma_calibration", env.gamma_calibration, path);
  try {
    env.validate();
  } catch (const ValidationError& e) {
    throw e.nested(path);
  }
  return env;
}

ServiceConfig parse_service(const json& j, const std::string& path,
                            std::optional<double>& expected_q) {
  reject_unknown(j, {"id", "d_in", "d_out", "beta", "n_layer", "n_ctx", "n_attn", "satisfaction",
                     "gamma_gflops", "liability", "model_label", "expected_q"},
                 path);
  ServiceConfig cfg;
  read_required(j, "id", cfg.id, path);
  read_required(j, "d_in", cfg.d_in, path);
  read_required(j, "d_out", cfg.d_out, path);
  read_required(j, "beta", cfg.beta, path);
  read_required(j, "n_layer", cfg.n_layer, path);
  read_required(j, "n_ctx", cfg.n_ctx, path);
  read_required(j, "n_attn", cfg.n_attn, path);
  read_required(j, "satisfaction", cfg.satisfaction, path);
  read_required(j, "gamma_gflops", cfg.gamma_gflops, path);
  read(j, "liability", cfg.liability, path);
  read(j, "model_label", cfg.model_label, path);
  if (j.contains("expected_q")) {
    double q = 0.0;
    read(j, "expected_q", q, path);
    expected_q = q;
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw e.nested(path);
  }
  return cfg;
}

CostParams parse_cost_params(const json& j) {
  const std::string path = "cost_params";
  reject_unknown(j, {"flop_price", "hw_fee", "model_fee"}, path);
  CostParams params;
  read(j, "flop_price", params.flop_price, path);
  read(j, "hw_fee", params.hw_fee, path);
  read(j, "model_fee", params.model_fee, path);
  try {
    params.validate();
  } catch (const ValidationError& e) {
    throw e.nested(path);
  }
  return params;
}

TypeSet parse_types(const json& j) {
  const std::string path = "types";
  reject_unknown(j, {"thetas", "pmf"}, path);
  std::vector<double> thetas;
  read_required(j, "thetas", thetas, path);
  try {
    if (!j.contains("pmf")) return TypeSet::uniform(std::move(thetas));
    std::vector<double> pmf;
    read(j, "pmf", pmf, path);
    return TypeSet(std::move(thetas), std::move(pmf));
  } catch (const ValidationError& e) {
    throw e.nested(path);
  }
}

ValuationSpec parse_valuation(const json& j) {
  const std::string path = "valuation";
  reject_unknown(j, {"family", "a", "b"}, path);
  ValuationSpec v;
  if (j.contains("family")) {
    std::string family;
    read(j, "family", family, path);
    try {
      v.family = parse_valuation_family(family);
    } catch (const ValidationError& e) {
      throw e.nested(join(path, "family"));
    }
  }
  read(j, "a", v.scale, path);
  read(j, "b", v.exponent, path);
  try {
    v.validate();
  } catch (const ValidationError& e) {
    throw e.nested(path);
  }
  return v;
}

SolverOptions parse_solver(const json& j) {
  const std::string path = "solver";
  reject_unknown(j, {"scalar_tolerance", "grid_step"}, path);
  SolverOptions opts;
  read(j, "scalar_tolerance", opts.scalar_tolerance, path);
  read(j, "grid_step", opts.grid_step, path);
  try {
    opts.validate();
  } catch (const ValidationError& e) {
    throw e.nested(path);
  }
  return opts;
}

Scenario with_liability_scaled(const Scenario& scenario, double multiplier) {
  Scenario out = scenario;
  for (auto& s : out.services) s.liability *= multiplier;
  return out;
}

double weighted_mean(const TypeSet& types, const SolveResult& result, double TypeOutcome::*field) {
  double total = 0.0;
  for (std::size_t k = 0; k < types.size(); ++k)
    total += types.prob(k) * (result.per_type[k].*field);
  return total;
}

}  // namespace

Scenario load_scenario(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("parse error: ") + e.what());
  }
  reject_unknown(root, {"task_label", "environment", "services", "cost_params", "types",
                        "valuation", "cost_fit", "solver", "liability_enabled"},
                 "");

  Scenario sc;
  read(root, "task_label", sc.task_label, "");
  if (root.contains("environment")) sc.environment = parse_environment(root.at("environment"));
  sc.environment.task_label = sc.task_label;

  if (!root.contains("services")) throw ValidationError("missing required key", "services");
  const json& services = root.at("services");
  if (!services.is_array() || services.empty())
    throw ValidationError("must be a nonempty array", "services");
  for (std::size_t i = 0; i < services.size(); ++i) {
    std::optional<double> expected;
    sc.services.push_back(
        parse_service(services[i], "services[" + std::to_string(i) + "]", expected));
    sc.expected_q.push_back(expected);
  }

  if (root.contains("cost_params")) sc.cost_params = parse_cost_params(root.at("cost_params"));
  if (!root.contains("types")) throw ValidationError("missing required key", "types");
  sc.types = parse_types(root.at("types"));
  if (root.contains("valuation")) sc.valuation = parse_valuation(root.at("valuation"));
  if (root.contains("cost_fit")) {
    const json& fit = root.at("cost_fit");
    reject_unknown(fit, {"family"}, "cost_fit");
    std::string family = "quadratic";
    read(fit, "family", family, "cost_fit");
    try {
      sc.cost_fit = parse_curve_family(family);
    } catch (const ValidationError& e) {
      throw e.nested("cost_fit.family");
    }
  }
  if (root.contains("solver")) sc.solver = parse_solver(root.at("solver"));
  read(root, "liability_enabled", sc.liability_enabled, "");
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

QosReport run_qos(const Scenario& scenario) {
  QosReport report;
  report.table = qos_table(scenario.services, scenario.environment);
  report.gamma_calibration = scenario.environment.gamma_calibration;
  for (std::size_t i = 0; i < scenario.services.size(); ++i) {
    QosRow row;
    row.service = scenario.services[i];
    row.level = report.table.levels[i];
    row.expected_q = scenario.expected_q[i];
    if (row.expected_q) {
      row.deviation = row.level.q - *row.expected_q;
      report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(*row.deviation));
    }
    report.latency_warning = report.latency_warning || row.level.latency_exceeds_unit;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<CostPoint> cost_points(const Scenario& scenario, bool with_liability,
                                   double liability_multiplier) {
  std::vector<CostPoint> points;
  for (const auto& svc : scenario.services) {
    ServiceConfig cfg = svc;
    cfg.liability = with_liability ? svc.liability * liability_multiplier : 0.0;
    points.push_back({qos_score(cfg, scenario.environment).q,
                      service_cost(cfg, scenario.environment, scenario.cost_params).total});
  }
  return points;
}

std::string_view to_string(SolveMode mode) {
  return mode == SolveMode::second_best ? "second-best" : "first-best";
}

SolveRun run_solve(const Scenario& scenario, SolveMode mode, std::optional<bool> liability) {
  SolveRun run;
  run.mode = mode;
  run.liability = liability.value_or(scenario.liability_enabled);
  run.points = cost_points(scenario, run.liability);
  run.curve = fit_cost_curve(run.points, scenario.cost_fit);
  run.result = mode == SolveMode::second_best
                   ? solve_second_best(scenario.types, scenario.valuation, run.curve,
                                       scenario.solver)
                   : solve_first_best(scenario.types, scenario.valuation, run.curve,
                                      scenario.solver);
  run.feasibility = verify_feasibility(run.result.menu, scenario.types, scenario.valuation);
  return run;
}

std::vector<SweepRow> run_sweep_liability(const Scenario& scenario,
                                          std::span<const double> multipliers) {
  std::vector<SweepRow> rows;
  for (double m : multipliers) {
    if (!(std::isfinite(m) && m >= 0.0))
      throw ValidationError("liability multipliers must be >= 0", "multipliers");
    const auto run =
        run_solve(with_liability_scaled(scenario, m), SolveMode::second_best, true);
    SweepRow row;
    row.multiplier = m;
    row.expected_profit = run.result.expected_profit;
    row.mean_q = weighted_mean(scenario.types, run.result, &TypeOutcome::q);
    row.mean_p = weighted_mean(scenario.types, run.result, &TypeOutcome::p);
    row.social_welfare = run.result.social_welfare;
    rows.push_back(row);
  }
  return rows;
}

SimulationOutcome simulate_population(const TypeSet& types, const ValuationSpec& v,
                                      const CostCurve& curve, const ContractMenu& menu,
                                      std::size_t n, std::uint64_t seed, double tolerance) {
  if (n < 1) throw ValidationError("draw count must be >= 1", "n");
  const auto report = verify_feasibility(menu, types, v, tolerance);
  if (!report.feasible)
    throw InfeasibleMenuError("menu violates IR/IC constraints by " +
                              std::to_string(report.max_violation));

  const std::size_t k_types = types.size();
  std::vector<double> cdf(k_types);
  double acc = 0.0;
  for (std::size_t k = 0; k < k_types; ++k) cdf[k] = acc += types.prob(k);
  cdf.back() = 1.0;

  // Every draw of a given type makes the same choice.
  std::vector<std::size_t> choice(k_types);
  std::vector<double> utility(k_types);
  std::vector<double> margin(k_types);
  for (std::size_t k = 0; k < k_types; ++k) {
    const auto br = best_response(types.theta(k), v, menu, tolerance);
    choice[k] = br.index;
    utility[k] = br.utility;
    margin[k] = menu.items[br.index].p - effective_cost(curve, menu.items[br.index].q);
  }

  SimulationOutcome out;
  out.n = n;
  out.seed = seed;
  out.counts.assign(menu.size(), 0);
  std::vector<std::size_t> drawn(k_types, 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                            cdf.begin());
    ++drawn[std::min(k, k_types - 1)];
  }
  // Aggregate per type in index order so sums do not depend on draw order.
  double profit = 0.0;
  double util = 0.0;
  for (std::size_t k = 0; k < k_types; ++k) {
    out.counts[choice[k]] += drawn[k];
    profit += static_cast<double>(drawn[k]) * margin[k];
    util += static_cast<double>(drawn[k]) * utility[k];
  }
  out.empirical_profit = profit / static_cast<double>(n);
  out.mean_user_utility = util / static_cast<double>(n);
  out.social_welfare = out.empirical_profit + out.mean_user_utility;
  return out;
}

SimulationOutcome simulate_population(const Scenario& scenario, const ContractMenu& menu,
                                      std::size_t n, std::uint64_t seed, double tolerance) {
  const auto curve =
      fit_cost_curve(cost_points(scenario, scenario.liability_enabled), scenario.cost_fit);
  return simulate_population(scenario.types, scenario.valuation, curve, menu, n, seed,
                             tolerance);
}

}  // namespace pact
