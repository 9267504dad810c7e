#include "pact/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "pact/error.hpp"

namespace pact::csv {

namespace {

// Half-ulp of a 9-digit decimal, relative.
constexpr double kRelativeRounding = 5e-9;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, const std::string& column) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ValidationError("not a number: '" + text + "'", "menu." + column);
  return value;
}

std::string join(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_qos(std::ostream& out, const QosReport& report) {
  out << "k,d_in,d_out,t_tran,t_tok,t_inf,t_total,A,q_raw,q\n";
  for (const auto& row : report.rows) {
    const auto& lat = row.level.latency;
    out << join({std::to_string(row.service.id), format_number(row.service.d_in),
                 format_number(row.service.d_out), format_number(lat.t_tran),
                 format_number(lat.t_tok), format_number(lat.t_inf), format_number(lat.t_total),
                 format_number(row.level.satisfaction), format_number(row.level.q_raw),
                 format_number(row.level.q)})
        << '\n';
  }
}

void write_menu(std::ostream& out, const SolveResult& result) {
  out << "type_index,theta,q,p,user_utility,margin,pooled_block_id\n";
  for (std::size_t k = 0; k < result.per_type.size(); ++k) {
    const auto& t = result.per_type[k];
    out << join({std::to_string(k + 1), format_number(t.theta), format_number(t.q),
                 format_number(t.p), format_number(t.user_utility), format_number(t.margin),
                 std::to_string(t.block_id)})
        << '\n';
  }
}

void write_summary(std::ostream& out, const SolveRun& run) {
  const auto& r = run.result;
  out << "key,value\n";
  out << "mode," << to_string(run.mode) << '\n';
  out << "liability," << (run.liability ? "on" : "off") << '\n';
  out << "curve_family," << to_string(run.curve.family) << '\n';
  out << "curve_a," << format_number(run.curve.a) << '\n';
  out << "curve_b," << format_number(run.curve.b) << '\n';
  out << "curve_c0," << format_number(run.curve.c0) << '\n';
  out << "curve_rmse," << format_number(run.curve.fit_residual) << '\n';
  out << "curve_shape_constrained," << (run.curve.shape_constrained ? 1 : 0) << '\n';
  out << "expected_profit," << format_number(r.expected_profit) << '\n';
  out << "mean_user_utility," << format_number(r.mean_user_utility) << '\n';
  out << "social_welfare," << format_number(r.social_welfare) << '\n';
  out << "excluded_types," << r.excluded << '\n';
  out << "ironed_segments," << r.ironed_segments.size() << '\n';
  out << "feasible," << (run.feasibility.feasible ? 1 : 0) << '\n';
  out << "max_violation," << format_number(run.feasibility.max_violation) << '\n';
}

void write_sweep(std::ostream& out, std::span<const SweepRow> rows) {
  out << "multiplier,expected_profit,mean_q,mean_p,social_welfare\n";
  for (const auto& row : rows)
    out << join({format_number(row.multiplier), format_number(row.expected_profit),
                 format_number(row.mean_q), format_number(row.mean_p),
                 format_number(row.social_welfare)})
        << '\n';
}

void write_simulation(std::ostream& out, const SimulationOutcome& outcome) {
  out << "# rng=" << kRngAlgorithm << " seed=" << outcome.seed << " n=" << outcome.n
      << " empirical_profit=" << format_number(outcome.empirical_profit)
      << " mean_user_utility=" << format_number(outcome.mean_user_utility)
      << " social_welfare=" << format_number(outcome.social_welfare) << '\n';
  out << "type_index,count,empirical_share\n";
  for (std::size_t k = 0; k < outcome.counts.size(); ++k)
    out << join({std::to_string(k + 1), std::to_string(outcome.counts[k]),
                 format_number(static_cast<double>(outcome.counts[k]) /
                               static_cast<double>(outcome.n))})
        << '\n';
}

ContractMenu read_menu(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw ValidationError("empty menu file", "menu");

  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError("missing column '" + name + "'", "menu");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t idx_col = column("type_index");
  const std::size_t q_col = column("q");
  const std::size_t p_col = column("p");

  std::map<long long, ContractItem> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ValidationError("row has " + std::to_string(cells.size()) + " cells, expected " +
                                std::to_string(header.size()),
                            "menu");
    const auto index = static_cast<long long>(parse_double(cells[idx_col], "type_index"));
    ContractItem item{parse_double(cells[q_col], "q"), parse_double(cells[p_col], "p")};
    if (!rows.emplace(index, item).second)
      throw ValidationError("duplicate type_index " + std::to_string(index), "menu");
  }
  ContractMenu menu;
  long long expected = 1;
  for (const auto& [index, item] : rows) {
    if (index != expected++) throw ValidationError("type_index must run 1..K", "menu");
    menu.items.push_back(item);
  }
  if (menu.items.empty()) throw ValidationError("menu has no rows", "menu");
  return menu;
}

double rounding_allowance(const ContractMenu& menu, const TypeSet& types,
                          const ValuationSpec& v) {
  // For the supported families q v'(q) <= v(q), so a relative error e in q
  // moves theta v(q) by at most e theta v(q).
  double scale = 1.0;
  for (const auto& item : menu.items) scale = std::max(scale, item.p);
  for (double theta : types.thetas()) scale = std::max(scale, theta * v(1.0));
  return 4.0 * kRelativeRounding * scale;
}

}  // namespace pact::csv
