#pragma once

#include <string>
#include <vector>

namespace pact {

/// One deployable LLM service option.
///
/// Sizes are in KB, `beta` is the parameter count in units of 1e9 and
/// `gamma_gflops` is the nominal server throughput.
struct ServiceConfig {
  int id = 0;
  double d_in = 0.0;
  double d_out = 0.0;
  double beta = 0.0;
  long long n_layer = 0;
  long long n_ctx = 0;
  long long n_attn = 0;
  double satisfaction = 0.0;
  double gamma_gflops = 1.0;
  double liability = 0.0;
  std::string model_label;

  void validate() const;
};

/// Physical and task constants shared by every service of a scenario.
struct Environment {
  double rate_bps = 2.0e7;
  double alpha_tok = 5.0e-4;    // s per KB of input
  double alpha_detok = 5.0e-4;  // s per KB of output
  double tokens_per_kb_in = 4.0;
  double tokens_per_kb_out = 4.0;
  double delta = 0.5;
  // Multiplier on the nominal GFLOPS figure. 10 reconciles the reference
  // configuration table's throughput and QoS columns.
  double gamma_calibration = 10.0;
  std::string task_label;

  void validate() const;
};

struct LatencyBreakdown {
  double t_tran = 0.0;
  double t_tok = 0.0;
  double t_inf = 0.0;
  double t_total = 0.0;
};

struct QosLevel {
  int id = 0;
  double q_raw = 0.0;
  double q = 0.0;  // q_raw clamped to [0, 1]
  LatencyBreakdown latency;
  double satisfaction = 0.0;
  // Set when t_total > 1 s, i.e. the latency term of the score is negative.
  bool latency_exceeds_unit = false;
};

struct QosTable {
  std::vector<QosLevel> levels;  // input order
  std::vector<QosLevel> sorted;  // ascending in q, stable on ties
  // Groups of ids whose q values agree within 1e-9.
  std::vector<std::vector<int>> duplicates;
};

double transmission_time(const ServiceConfig& cfg, const Environment& env);
double tokenization_time(const ServiceConfig& cfg, const Environment& env);
double flops_per_token(const ServiceConfig& cfg);
/// Input plus output token count under the environment's linear token maps.
double token_count(const ServiceConfig& cfg, const Environment& env);
double inference_time(const ServiceConfig& cfg, const Environment& env);
LatencyBreakdown total_latency(const ServiceConfig& cfg, const Environment& env);
QosLevel qos_score(const ServiceConfig& cfg, const Environment& env);
QosTable qos_table(const std::vector<ServiceConfig>& configs, const Environment& env);

}  // namespace pact
