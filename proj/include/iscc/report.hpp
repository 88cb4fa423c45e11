#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "iscc/optimizer.hpp"
#include "iscc/oracles.hpp"

namespace iscc {

// scenario_id, origin, l, Q, rho, P_S, P_C, nu_e, E_sen, E_comp, E_comm, E_total, T_total, feasible, iters
std::string csv_header();
std::string csv_row(std::size_t scenario_id, const Solution& s);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

nlohmann::json to_json(const Solution& s);
Solution solution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OracleReport& r);
nlohmann::json to_json(const FeasibilityReport& r);

// Recomputes the cost breakdown of a stored allocation.
CostBreakdown recost(const Solution& s, const NetworkModel& net, const Scenario& sc);

void write_text(const std::string& path, const std::string& text);

}  // namespace iscc
