#pragma once

#include <array>
#include <vector>

#include "pact/qos_model.hpp"

namespace pact::testing {

// Reference configuration table: sizes, model shape, satisfaction, nominal
// GFLOPS, per-family liability, and the published q column.
struct Table1Row {
  ServiceConfig cfg;
  double published_q;
};

inline std::vector<Table1Row> table1() {
  auto row = [](int id, double d_in, double d_out, double beta, long long layer, long long ctx,
                long long attn, double a, double gflops, double liability, double q) {
    ServiceConfig cfg;
    cfg.id = id;
    cfg.d_in = d_in;
    cfg.d_out = d_out;
    cfg.beta = beta;
    cfg.n_layer = layer;
    cfg.n_ctx = ctx;
    cfg.n_attn = attn;
    cfg.satisfaction = a;
    cfg.gamma_gflops = gflops;
    cfg.liability = liability;
    return Table1Row{cfg, q};
  };
  return {
      row(1, 20, 20, 0.12, 12, 1024, 12, 0.10, 8100, 0.7, 0.531),
      row(2, 100, 20, 0.12, 12, 1024, 12, 0.22, 8100, 0.7, 0.555),
      row(3, 100, 100, 0.12, 12, 1024, 12, 0.35, 15800, 0.7, 0.584),
      row(4, 20, 20, 2.7, 32, 2048, 32, 0.35, 15800, 0.5, 0.655),
      row(5, 100, 20, 2.7, 32, 2048, 32, 0.50, 19500, 0.5, 0.691),
      row(6, 100, 100, 2.7, 32, 2048, 32, 0.65, 19500, 0.5, 0.728),
      row(7, 100, 20, 7.0, 28, 8192, 16, 0.75, 31200, 0.2, 0.814),
      row(8, 100, 100, 7.0, 28, 8192, 16, 0.90, 31200, 0.2, 0.848),
  };
}

inline std::vector<ServiceConfig> table1_services() {
  std::vector<ServiceConfig> out;
  for (const auto& r : table1()) out.push_back(r.cfg);
  return out;
}

// Environment defaults match the reference experiment: 20 Mbps, 0.5 ms/KB,
// 4 tokens/KB, delta 0.5, throughput calibration x10.
inline Environment reference_env() { return Environment{}; }

}  // namespace pact::testing
