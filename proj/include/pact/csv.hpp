#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "pact/scenario.hpp"

namespace pact::csv {

/// '.' decimal separator, 9 significant digits, negative zero printed as 0.
std::string format_number(double x);

void write_qos(std::ostream& out, const QosReport& report);
void write_menu(std::ostream& out, const SolveResult& result);
void write_summary(std::ostream& out, const SolveRun& run);
void write_sweep(std::ostream& out, std::span<const SweepRow> rows);
void write_simulation(std::ostream& out, const SimulationOutcome& outcome);

/// Reads the `q` and `p` columns of a menu.csv, ordered by `type_index`.
ContractMenu read_menu(std::istream& in);

/// Largest utility error a 9-significant-digit menu can carry for these
/// types and valuation (q and p each rounded, two items per comparison).
double rounding_allowance(const ContractMenu& menu, const TypeSet& types,
                          const ValuationSpec& v);

}  // namespace pact::csv
