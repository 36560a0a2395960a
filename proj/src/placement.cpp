#include "uasn/placement.hpp"

#include "uasn/errors.hpp"
#include "uasn/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace uasn {

PlacementProblem make_placement_problem(int c, const UpperNeighborSet& upper, const RateArray& rates,
                                        const Deployment& dep, const EnergyModel& model, double eps_relay) {
  if (upper.critical != c) throw InvalidInput("upper-neighbour set belongs to another node");
  PlacementProblem p{.critical = c, .neighbors = upper.neighbors, .anchors = {}, .flows = {}, .model = model};
  p.anchors.resize(3, static_cast<Eigen::Index>(upper.neighbors.size() + 1));
  p.anchors.col(0) = dep.node(c).position;
  for (std::size_t k = 0; k < upper.neighbors.size(); ++k) {
    const int j = upper.neighbors[k];
    p.anchors.col(static_cast<Eigen::Index>(k + 1)) = dep.node(j).position;
    p.flows.push_back(static_cast<double>(rates(c, j)));
    p.forwarded += static_cast<double>(rates(c, j));
  }
  for (int k = 0; k < dep.size(); ++k)
    if (k != c && dep.node(k).kind != NodeKind::SurfaceBuoy) p.incoming += static_cast<double>(rates(k, c));
  p.eps_critical = dep.node(c).residual_energy;
  p.eps_relay = eps_relay >= 0.0 ? eps_relay : dep.node(c).primary_energy;
  p.comm_range = dep.comm_range();
  return p;
}

PlacementEval evaluate_placement(const PlacementProblem& prob, const Eigen::VectorXd& theta, const Tolerances& tol) {
  PlacementEval e;
  const EnergyModel& m = prob.model;
  e.position = prob.position(theta);
  e.d_critical = (e.position - prob.critical_position()).norm();
  e.p_critical = m.transmit_power(e.d_critical);

  double relay_tx = 0.0;
  double range_excess = std::max(0.0, e.d_critical - prob.comm_range);
  for (int k = 0; k < prob.num_neighbors(); ++k) {
    const double d = (e.position - Vec3(prob.anchors.col(k + 1))).norm();
    const double p = m.transmit_power(d);
    e.d_neighbors.push_back(d);
    e.p_neighbors.push_back(p);
    relay_tx += p * prob.flows[static_cast<std::size_t>(k)];
    range_excess += std::max(0.0, d - prob.comm_range);
  }
  e.load_critical = e.p_critical * prob.forwarded + m.p_r() * prob.incoming;
  e.load_relay = relay_tx + m.p_r() * prob.forwarded;
  e.tau_critical = e.load_critical > 0.0 ? prob.eps_critical / (e.load_critical * kMilliwatt) : kInfiniteLifetime;
  e.tau_relay = e.load_relay > 0.0 ? prob.eps_relay / (e.load_relay * kMilliwatt) : kInfiniteLifetime;

  const double lhs = prob.eps_critical * e.load_relay * (1.0 - tol.lifetime);
  const double rhs = prob.eps_relay * e.load_critical;
  e.lifetime_violation = lhs > rhs ? (lhs - rhs) / std::max(rhs, 1e-300) : 0.0;

  const double simplex_excess = std::max(0.0, -theta.minCoeff() - tol.simplex) +
                                std::max(0.0, std::abs(theta.sum() - 1.0) - tol.simplex);
  const double separation_deficit = std::max(0.0, tol.min_separation - e.d_critical);
  e.geometry_violation = simplex_excess + separation_deficit + range_excess;
  e.feasible = e.lifetime_violation == 0.0 && e.geometry_violation == 0.0;
  return e;
}

SegmentResult segment_search(const PlacementProblem& prob, int anchor, const Tolerances& tol, int scan_points) {
  if (anchor < 1 || anchor >= prob.num_anchors()) throw InvalidInput("segment anchor must be an upper neighbour");
  SegmentResult out;
  const int m = prob.num_anchors();
  const double length = (Vec3(prob.anchors.col(anchor)) - prob.critical_position()).norm();
  if (length < tol.min_separation) return out;

  auto theta_at = [&](double lambda) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
    theta(0) = 1.0 - lambda;
    theta(anchor) = lambda;
    return theta;
  };
  const double lambda0 = tol.min_separation / length;

  int first = -1;
  double prev = lambda0;
  for (int i = 0; i <= scan_points; ++i) {
    const double lambda = i == scan_points ? 1.0 : lambda0 + (1.0 - lambda0) * i / scan_points;
    if (evaluate_placement(prob, theta_at(lambda), tol).feasible) {
      first = i;
      break;
    }
    prev = lambda;
  }
  if (first < 0) return out;

  double best_lambda = first == 0 ? lambda0 : (first == scan_points ? 1.0 : lambda0 + (1.0 - lambda0) * first / scan_points);
  if (first > 0) {
    const double ceiling = evaluate_placement(prob, theta_at(best_lambda), tol).p_critical;
    auto merit = [&](double lambda) {
      const auto e = evaluate_placement(prob, theta_at(lambda), tol);
      if (e.feasible) {
        if (lambda < best_lambda) best_lambda = lambda;
        return e.p_critical;
      }
      return ceiling * (1.0 + 1e-9 + e.violation());
    };
    golden_section_minimize(merit, prev, best_lambda, 1e-14 * std::max(1.0, best_lambda));
  }
  out.feasible = true;
  out.lambda = best_lambda;
  out.theta = theta_at(best_lambda);
  out.p_critical = evaluate_placement(prob, out.theta, tol).p_critical;
  return out;
}

}  // namespace uasn
