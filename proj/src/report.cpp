#include "iscc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "iscc/config.hpp"

namespace iscc {

using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON has no infinities; map them to null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string csv_header() {
  return "scenario_id,origin,l,Q,rho,P_S,P_C,nu_e,E_sen,E_comp,E_comm,E_total,T_total,feasible,iters";
}

std::string csv_row(std::size_t scenario_id, const Solution& s) {
  const auto& a = s.alloc;
  const auto& c = s.cost;
  std::string row = std::to_string(scenario_id) + "," + to_string(s.origin) + ",";
  row += std::to_string(a.split) + "," + std::to_string(a.bits) + ",";
  for (double x : {a.rho, a.sensing_power, a.comm_power, a.edge_freq, c.e_sen, c.e_comp, c.e_comm, c.e_total,
                   c.t_total}) {
    row += num(x) + ",";
  }
  row += std::string(s.feasible ? "1" : "0") + "," + std::to_string(s.iterations);
  return row;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << csv_header() << "\n";
  for (const auto& r : rows) out << csv_row(r.scenario_id, r.solution) << "\n";
}

json to_json(const Solution& s) {
  const auto& a = s.alloc;
  const auto& c = s.cost;
  json reasons = json::array();
  for (const auto& p : s.pair_reasons) reasons.push_back({{"l", p.split}, {"Q", p.bits}, {"reason", p.reason}});
  return {{"origin", to_string(s.origin)},
          {"feasible", s.feasible},
          {"reason", s.reason},
          {"iterations", s.iterations},
          {"trace", s.trace},
          {"alloc",
           {{"l", a.split},
            {"Q", a.bits},
            {"rho", a.rho},
            {"P_S", a.sensing_power},
            {"P_C", a.comm_power},
            {"nu_e", a.edge_freq}}},
          {"cost",
           {{"E_sen", c.e_sen},
            {"E_comp", c.e_comp},
            {"E_comm", c.e_comm},
            {"E_total", c.e_total},
            {"T_sen", c.t_sen},
            {"T_comp_e", c.t_comp_e},
            {"T_comp_s", c.t_comp_s},
            {"T_comm", c.t_comm},
            {"T_total", c.t_total}}},
          {"pair_reasons", reasons}};
}

Solution solution_from_json(const json& j) {
  Solution s;
  s.origin = origin_from_string(j.at("origin").get<std::string>());
  s.feasible = j.at("feasible").get<bool>();
  s.reason = j.value("reason", "");
  s.iterations = j.value("iterations", std::size_t{0});
  s.trace = j.value("trace", std::vector<double>{});
  const auto& a = j.at("alloc");
  s.alloc.split = a.at("l").get<std::size_t>();
  s.alloc.bits = a.at("Q").get<int>();
  s.alloc.rho = a.at("rho").get<double>();
  s.alloc.sensing_power = a.at("P_S").get<double>();
  s.alloc.comm_power = a.at("P_C").get<double>();
  s.alloc.edge_freq = a.at("nu_e").get<double>();
  const auto& c = j.at("cost");
  s.cost.e_sen = c.at("E_sen").get<double>();
  s.cost.e_comp = c.at("E_comp").get<double>();
  s.cost.e_comm = c.at("E_comm").get<double>();
  s.cost.e_total = c.at("E_total").get<double>();
  s.cost.t_sen = c.at("T_sen").get<double>();
  s.cost.t_comp_e = c.at("T_comp_e").get<double>();
  s.cost.t_comp_s = c.at("T_comp_s").get<double>();
  s.cost.t_comm = c.at("T_comm").get<double>();
  s.cost.t_total = c.at("T_total").get<double>();
  if (j.contains("pair_reasons")) {
    for (const auto& p : j["pair_reasons"]) {
      s.pair_reasons.push_back({p.at("l").get<std::size_t>(), p.at("Q").get<int>(), p.at("reason").get<std::string>()});
    }
  }
  return s;
}

json to_json(const OracleReport& r) {
  json stats = json::object();
  for (const auto& [k, v] : r.stats) stats[k] = finite_or_null(v);
  return {{"name", r.name},
          {"trials", r.trials},
          {"pass", r.pass},
          {"worst_violation", finite_or_null(r.worst_violation)},
          {"tolerance", r.tolerance},
          {"mean", finite_or_null(r.mean)},
          {"std", finite_or_null(r.stddev)},
          {"relative_error", finite_or_null(r.rel_error)},
          {"seed", r.seed},
          {"stats", stats},
          {"note", r.note}};
}

json to_json(const FeasibilityReport& r) {
  json out = json::array();
  for (const auto& c : r.checks) out.push_back({{"constraint", c.name}, {"pass", c.pass}, {"slack", c.slack}});
  return out;
}

CostBreakdown recost(const Solution& s, const NetworkModel& net, const Scenario& sc) {
  return total_cost(s.alloc, net, sc);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace iscc
