#include "iscc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iscc/netmodel.hpp"

namespace iscc {

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Proposed: return "proposed";
    case Origin::OnServer: return "on_server";
    case Origin::OnDevice: return "on_device";
    case Origin::NoPrune: return "no_prune";
  }
  return "?";
}

Origin origin_from_string(const std::string& s) {
  if (s == "proposed") return Origin::Proposed;
  if (s == "on_server") return Origin::OnServer;
  if (s == "on_device") return Origin::OnDevice;
  if (s == "no_prune") return Origin::NoPrune;
  throw std::invalid_argument("unknown origin '" + s + "'");
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::TMax: return "t_max";
    case SweepAxis::RT: return "r_t";
    case SweepAxis::Snr: return "snr";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "t_max") return SweepAxis::TMax;
  if (s == "r_t") return SweepAxis::RT;
  if (s == "snr") return SweepAxis::Snr;
  throw std::invalid_argument("unknown sweep axis '" + s + "' (expected t_max, r_t or snr)");
}

Scenario with_axis(const Scenario& sc, SweepAxis axis, double value) {
  Scenario out = sc;
  switch (axis) {
    case SweepAxis::TMax: out.t_max = value; break;
    case SweepAxis::RT: out.r_t = value; break;
    case SweepAxis::Snr: out.snr = std::pow(10.0, value / 10.0); break;
  }
  return out;
}

Solution alternate_inner(std::size_t split, int bits, const NetworkModel& net, const Scenario& sc,
                         const PenaltyTerms& terms, const AccuracyParams& ap, const OptimizerOptions& opts,
                         std::optional<double> fixed_rho, const InnerStart& start) {
  Solution sol;
  sol.alloc.split = split;
  sol.alloc.bits = bits;
  const bool uploads = split < net.depth();
  const bool computes = split > 0;
  double comm_power = uploads ? start.comm_power.value_or(sc.p_max) : 0.0;
  double edge_freq = computes ? start.edge_freq.value_or(sc.nu_max) : 0.0;
  std::optional<double> incumbent = start.rho;

  auto fail = [&](std::size_t it, const char* step, const std::string& why) {
    sol.feasible = false;
    sol.reason = "iteration " + std::to_string(it) + " " + step + ": " + why;
    return sol;
  };

  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    RhoPsOptions ro;
    ro.fixed_rho = fixed_rho;
    ro.incumbent = incumbent;
    const auto rs = solve_rho_ps(split, bits, comm_power, edge_freq, net, sc, terms, ap, opts.tol, ro);
    if (!rs) return fail(it, "rho step", rs.reason());

    const auto ctx = make_subproblem_context(split, bits, rs->rho, net, sc);
    const auto pc = solve_pc_nue(ctx, sc, opts.tol);
    if (!pc) return fail(it, "power/frequency step", pc.reason());

    comm_power = pc->comm_power;
    edge_freq = pc->edge_freq;
    incumbent = rs->rho;
    sol.alloc.rho = rs->rho;
    sol.alloc.sensing_power = rs->sensing_power;
    sol.alloc.comm_power = comm_power;
    sol.alloc.edge_freq = edge_freq;
    sol.cost = total_cost(sol.alloc, net, sc);
    sol.trace.push_back(sol.cost.e_total);
    sol.iterations = it;
    sol.feasible = true;

    const double e = sol.cost.e_total;
    if (std::abs(prev - e) <= opts.rel_tol * std::max(std::abs(e), std::numeric_limits<double>::min())) break;
    prev = e;
  }
  return sol;
}

namespace {

struct Pair {
  std::size_t split;
  int bits;
};

// Every split candidate with Q = 2..q_max; Q does not matter at split == L,
// so only Q = 2 runs there. Sorted by (Q, split) so that a strict-less
// reduction prefers smaller Q, then smaller split.
std::vector<Pair> enumerate_pairs(const NetworkModel& net, const Scenario& sc) {
  std::vector<Pair> pairs;
  for (int q = 2; q <= sc.q_max; ++q) {
    for (std::size_t l : net.split_candidates()) {
      if (l == net.depth() && q != 2) continue;
      pairs.push_back({l, q});
    }
  }
  return pairs;
}

bool better(const Solution& a, const Solution& b) {
  if (!a.feasible) return false;
  if (!b.feasible) return true;
  return a.cost.e_total < b.cost.e_total;
}

Solution enumerate(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                   const OptimizerOptions& opts, Origin origin, std::vector<Solution>* all) {
  sc.validate();
  ap.validate();
  const auto pairs = enumerate_pairs(net, sc);

  std::vector<PenaltyTerms> terms(net.depth() + 1);
  for (std::size_t l : net.split_candidates()) terms[l] = penalty_terms(net, l, ap);

  std::vector<Solution> results(pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto [l, q] = pairs[static_cast<std::size_t>(i)];
    const auto& t = terms[l];
    if (origin == Origin::NoPrune) {
      results[i] = alternate_inner(l, q, net, sc, t, ap, opts, 1.0);
      continue;
    }
    Solution first = alternate_inner(l, q, net, sc, t, ap, opts);
    // Second start from the unpruned optimum: the rho step can always keep
    // rho = 1 there, so the result never loses to the no-pruning ablation.
    const Solution dense = alternate_inner(l, q, net, sc, t, ap, opts, 1.0);
    if (dense.feasible) {
      InnerStart s{dense.alloc.comm_power, dense.alloc.edge_freq, dense.alloc.rho};
      Solution second = alternate_inner(l, q, net, sc, t, ap, opts, std::nullopt, s);
      if (better(second, first)) first = std::move(second);
    }
    results[i] = std::move(first);
  }

  Solution best;
  best.origin = origin;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    results[i].origin = origin;
    if (!results[i].feasible) {
      best.pair_reasons.push_back({pairs[i].split, pairs[i].bits, results[i].reason});
    } else if (better(results[i], best)) {
      auto reasons = std::move(best.pair_reasons);
      best = results[i];
      best.pair_reasons = std::move(reasons);
    }
  }
  if (!best.feasible) best.reason = "no feasible (split, Q) pair";
  if (all) *all = std::move(results);
  return best;
}

}  // namespace

Solution solve_scenario(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                        const OptimizerOptions& opts, std::vector<Solution>* all) {
  return enumerate(net, sc, ap, opts, Origin::Proposed, all);
}

Solution solve_baseline(Origin kind, const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap,
                        const OptimizerOptions& opts) {
  sc.validate();
  ap.validate();
  Solution s;
  switch (kind) {
    case Origin::Proposed: return solve_scenario(net, sc, ap, opts);
    case Origin::NoPrune: return enumerate(net, sc, ap, opts, Origin::NoPrune, nullptr);
    case Origin::OnServer: {
      const auto terms = penalty_terms(net, 0, ap);
      s = alternate_inner(0, sc.q_max, net, sc, terms, ap, opts);
      break;
    }
    case Origin::OnDevice: {
      const auto terms = penalty_terms(net, net.depth(), ap);
      s = alternate_inner(net.depth(), 2, net, sc, terms, ap, opts);
      break;
    }
  }
  s.origin = kind;
  return s;
}

std::vector<SweepRow> sweep(const NetworkModel& net, const Scenario& sc, const AccuracyParams& ap, SweepAxis axis,
                            const std::vector<double>& values, const OptimizerOptions& opts) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  constexpr Origin order[] = {Origin::Proposed, Origin::OnServer, Origin::OnDevice, Origin::NoPrune};
  std::vector<SweepRow> rows;
  rows.reserve(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Scenario point = with_axis(sc, axis, values[i]);
    for (Origin o : order) rows.push_back({i, values[i], solve_baseline(o, net, point, ap, opts)});
  }
  return rows;
}

}  // namespace iscc
