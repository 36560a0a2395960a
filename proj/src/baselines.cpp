#include "uasn/baselines.hpp"

#include "uasn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace uasn {

std::string to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::RA: return "ra";
    case BaselineKind::LSRNP: return "lsrnp";
    case BaselineKind::NoRelay: return "none";
  }
  return "unknown";
}

BaselineKind baseline_from_string(const std::string& s) {
  if (s == "ra") return BaselineKind::RA;
  if (s == "lsrnp") return BaselineKind::LSRNP;
  if (s == "none") return BaselineKind::NoRelay;
  throw InvalidInput("unknown baseline '" + s + "'");
}

int farthest_neighbor(const PlacementProblem& prob) {
  int best = -1;
  double best_d = -1.0;
  for (int k = 1; k < prob.num_anchors(); ++k) {
    const double d = (Vec3(prob.anchors.col(k)) - prob.critical_position()).norm();
    const bool tie = d == best_d && prob.neighbors[static_cast<std::size_t>(k - 1)] <
                                        prob.neighbors[static_cast<std::size_t>(best - 1)];
    if (d > best_d || tie) best_d = d, best = k;
  }
  if (best < 0) throw InvalidInput("critical node has no upper neighbours");
  return best;
}

PlacementSolution solve_segment_placement(const PlacementProblem& prob, const Tolerances& tol) {
  const auto seg = segment_search(prob, farthest_neighbor(prob), tol);
  if (!seg.feasible) return PlacementSolution{};
  return make_solution(prob, seg.theta, SolveStatus::Optimal, tol);
}

SequentialPlacementResult place_lsrnp(const Deployment& dep, const RateArray& rates, const EnergyModel& model, int m0,
                                      const OrnsOptions& options) {
  const Tolerances tol = options.solver.tol;
  return run_sequential_placement(
      dep, rates, model, m0, [&](const PlacementProblem& p) { return solve_segment_placement(p, tol); }, options);
}

namespace {

struct DepthProbe {
  PlacementSolution solution;
  double merit = -kInfiniteLifetime;
};

DepthProbe probe_depth(const PlacementProblem& prob, double x, double y, double z) {
  const EnergyModel& m = prob.model;
  DepthProbe out;
  PlacementSolution& s = out.solution;
  s.position = Vec3(x, y, z);
  s.d_critical = (s.position - prob.critical_position()).norm();
  s.p_critical = m.transmit_power(s.d_critical);
  double excess = std::max(0.0, s.d_critical - prob.comm_range);
  double relay_tx = 0.0;
  for (int k = 0; k < prob.num_neighbors(); ++k) {
    const double d = (s.position - Vec3(prob.anchors.col(k + 1))).norm();
    excess += std::max(0.0, d - prob.comm_range);
    s.p_neighbors.push_back(m.transmit_power(d));
    relay_tx += s.p_neighbors.back() * prob.flows[static_cast<std::size_t>(k)];
  }
  s.tau_critical = prob.eps_critical / ((s.p_critical * prob.forwarded + m.p_r() * prob.incoming) * kMilliwatt);
  s.tau_relay = prob.eps_relay / ((relay_tx + m.p_r() * prob.forwarded) * kMilliwatt);
  if (excess > 0.0) {
    out.merit = -excess;
    return out;
  }
  s.status = SolveStatus::Optimal;
  out.merit = std::min(s.tau_critical, s.tau_relay);
  return out;
}

double direct_power(const PlacementProblem& prob) {
  double p = 0.0;
  for (int k = 0; k < prob.num_neighbors(); ++k)
    p += prob.model.transmit_power((Vec3(prob.anchors.col(k + 1)) - prob.critical_position()).norm()) *
         prob.flows[static_cast<std::size_t>(k)];
  return p;
}

}  // namespace

SequentialPlacementResult place_ra(const Deployment& dep, const RateArray& rates, const EnergyModel& model, int m0,
                                   std::uint64_t seed, const OrnsOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = dep.field().radius;
  const double depth = dep.field().depth;

  auto solver = [&](const PlacementProblem& prob) {
    const double r = radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const double x = r * std::cos(phi);
    const double y = r * std::sin(phi);

    constexpr int kScan = 64;
    auto z_at = [&](int i) { return -depth * i / kScan; };
    int best_i = 0;
    DepthProbe best = probe_depth(prob, x, y, z_at(0));
    for (int i = 1; i <= kScan; ++i) {
      auto p = probe_depth(prob, x, y, z_at(i));
      if (p.merit > best.merit) best = std::move(p), best_i = i;
    }
    const double lo = z_at(std::min(best_i + 1, kScan));
    const double hi = z_at(std::max(best_i - 1, 0));
    const double z = golden_section_minimize([&](double zz) { return -probe_depth(prob, x, y, zz).merit; }, lo, hi,
                                             1e-6);
    auto refined = probe_depth(prob, x, y, z);
    if (refined.merit > best.merit) best = std::move(refined);
    // A relay that would die before the critical node did without it is not worth deploying.
    const double direct = direct_power(prob);
    const double tau_direct = prob.eps_critical / ((direct + prob.model.p_r() * prob.incoming) * kMilliwatt);
    if (!(best.merit > tau_direct)) best.solution.status = SolveStatus::Infeasible;
    return best.solution;
  };
  return run_sequential_placement(dep, rates, model, m0, solver, options);
}

SequentialPlacementResult place_none(const Deployment& dep, const RateArray& rates, const EnergyModel& model) {
  const double tau = network_lifetime(rates, dep, model);
  return SequentialPlacementResult{dep, rates, {}, tau, tau};
}

}  // namespace uasn
