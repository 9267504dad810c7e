#include "pact/qos_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pact/error.hpp"

namespace pact {

namespace {

constexpr double kBitsPerKB = 8000.0;
constexpr double kDuplicateTolerance = 1e-9;

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void ServiceConfig::validate() const {
  if (!finite_nonneg(d_in)) throw ValidationError("must be >= 0", "d_in");
  if (!finite_nonneg(d_out)) throw ValidationError("must be >= 0", "d_out");
  if (!finite_nonneg(beta)) throw ValidationError("must be >= 0", "beta");
  if (n_layer < 0) throw ValidationError("must be >= 0", "n_layer");
  if (n_ctx < 0) throw ValidationError("must be >= 0", "n_ctx");
  if (n_attn < 0) throw ValidationError("must be >= 0", "n_attn");
  if (!(satisfaction >= 0.0 && satisfaction <= 1.0))
    throw ValidationError("must lie in [0, 1]", "satisfaction");
  if (!(std::isfinite(gamma_gflops) && gamma_gflops > 0.0))
    throw ValidationError("must be > 0", "gamma_gflops");
  if (!finite_nonneg(liability)) throw ValidationError("must be >= 0", "liability");
}

void Environment::validate() const {
  if (!(std::isfinite(rate_bps) && rate_bps > 0.0))
    throw ValidationError("must be > 0", "rate_bps");
  if (!finite_nonneg(alpha_tok)) throw ValidationError("must be >= 0", "alpha_tok");
  if (!finite_nonneg(alpha_detok)) throw ValidationError("must be >= 0", "alpha_detok");
  if (!finite_nonneg(tokens_per_kb_in))
    throw ValidationError("must be >= 0", "tokens_per_kb_in");
  if (!finite_nonneg(tokens_per_kb_out))
    throw ValidationError("must be >= 0", "tokens_per_kb_out");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ValidationError("must lie in [0, 1]", "delta");
  if (!(std::isfinite(gamma_calibration) && gamma_calibration > 0.0))
    throw ValidationError("must be > 0", "gamma_calibration");
}

double transmission_time(const ServiceConfig& cfg, const Environment& env) {
  cfg.validate();
  env.validate();
  return kBitsPerKB * (cfg.d_in + cfg.d_out) / env.rate_bps;
}

double tokenization_time(const ServiceConfig& cfg, const Environment& env) {
  cfg.validate();
  env.validate();
  return env.alpha_tok * cfg.d_in + env.alpha_detok * cfg.d_out;
}

double flops_per_token(const ServiceConfig& cfg) {
  cfg.validate();
  const double shape = static_cast<double>(cfg.n_layer) * static_cast<double>(cfg.n_ctx) *
                       static_cast<double>(cfg.n_attn);
  return 2.0 * (cfg.beta * 1e9) + 2.0 * shape;
}

double token_count(const ServiceConfig& cfg, const Environment& env) {
  return env.tokens_per_kb_in * cfg.d_in + env.tokens_per_kb_out * cfg.d_out;
}

double inference_time(const ServiceConfig& cfg, const Environment& env) {
  cfg.validate();
  env.validate();
  const double throughput = cfg.gamma_gflops * 1e9 * env.gamma_calibration;
  return token_count(cfg, env) * flops_per_token(cfg) / throughput;
}

LatencyBreakdown total_latency(const ServiceConfig& cfg, const Environment& env) {
  LatencyBreakdown out;
  out.t_tran = transmission_time(cfg, env);
  out.t_tok = tokenization_time(cfg, env);
  out.t_inf = inference_time(cfg, env);
  out.t_total = out.t_tran + out.t_tok + out.t_inf;
  return out;
}

QosLevel qos_score(const ServiceConfig& cfg, const Environment& env) {
  QosLevel level;
  level.id = cfg.id;
  level.latency = total_latency(cfg, env);
  level.satisfaction = cfg.satisfaction;
  level.q_raw = env.delta * cfg.satisfaction + (1.0 - env.delta) * (1.0 - level.latency.t_total);
  level.q = std::clamp(level.q_raw, 0.0, 1.0);
  level.latency_exceeds_unit = level.latency.t_total > 1.0;
  return level;
}

QosTable qos_table(const std::vector<ServiceConfig>& configs, const Environment& env) {
  if (configs.empty()) throw ValidationError("at least one service is required", "services");

  QosTable table;
  table.levels.reserve(configs.size());
  for (const auto& cfg : configs) table.levels.push_back(qos_score(cfg, env));

  table.sorted = table.levels;
  std::stable_sort(table.sorted.begin(), table.sorted.end(),
                   [](const QosLevel& a, const QosLevel& b) { return a.q < b.q; });

  // Near-equal q values are adjacent once sorted; group maximal runs.
  std::size_t i = 0;
  while (i < table.sorted.size()) {
    std::size_t j = i + 1;
    while (j < table.sorted.size() &&
           table.sorted[j].q - table.sorted[j - 1].q <= kDuplicateTolerance)
      ++j;
    if (j - i > 1) {
      std::vector<int> ids;
      for (std::size_t k = i; k < j; ++k) ids.push_back(table.sorted[k].id);
      table.duplicates.push_back(std::move(ids));
    }
    i = j;
  }
  return table;
}

}  // namespace pact
