#pragma once

#include "uasn/model.hpp"
#include "uasn/routing.hpp"

#include <Eigen/Core>

#include <vector>

namespace uasn {

struct Tolerances {
  double simplex = 1e-8;        // |1'theta - 1| and theta >= -tol
  double lifetime = 1e-6;       // relative slack on tau_r >= tau_c
  double min_separation = 1.0;  // metres between relay and critical node
};

/// Single-relay placement instance: put relay r in the convex hull of the critical node c and its
/// upper neighbours, minimising c's per-bit power towards r while keeping tau_r >= tau_c.
/// Anchor 0 is the critical node, anchor k >= 1 is neighbors[k-1].
struct PlacementProblem {
  int critical = -1;
  std::vector<int> neighbors;
  Eigen::Matrix3Xd anchors;   // 3 x (|N| + 1)
  std::vector<double> flows;  // R[c][j] before the reroute, i.e. R[r][j] after it
  double forwarded = 0.0;     // R[c][r] = sum of flows
  double incoming = 0.0;      // sum_k R[k][c] over sensors and relays
  double eps_critical = 0.0;
  double eps_relay = 0.0;
  double comm_range = 0.0;
  EnergyModel model;

  int num_anchors() const { return static_cast<int>(anchors.cols()); }
  int num_neighbors() const { return static_cast<int>(neighbors.size()); }
  Vec3 critical_position() const { return anchors.col(0); }
  Vec3 position(const Eigen::VectorXd& theta) const { return anchors * theta; }
};

/// Assembles the instance from the current rates. eps_relay < 0 means "primary energy of c".
PlacementProblem make_placement_problem(int c, const UpperNeighborSet& upper, const RateArray& rates,
                                        const Deployment& dep, const EnergyModel& model,
                                        double eps_relay = -1.0);

/// Everything about one candidate relay position, evaluated with the true piecewise power model.
struct PlacementEval {
  Vec3 position;
  double d_critical = 0.0;
  std::vector<double> d_neighbors;
  double p_critical = 0.0;             // p_{c r}, the objective
  std::vector<double> p_neighbors;     // p_{r j}
  double load_critical = 0.0;          // E_c = p_cr F + p_r In, mW
  double load_relay = 0.0;             // E_r = sum_j p_rj f_j + p_r F, mW
  double tau_critical = 0.0;           // s
  double tau_relay = 0.0;              // s
  double lifetime_violation = 0.0;     // max(0, eps_c E_r (1 - tol) - eps_r E_c) / (eps_r E_c)
  double geometry_violation = 0.0;     // simplex, range and separation excess in metres
  bool feasible = false;

  double violation() const { return lifetime_violation + geometry_violation; }
};

PlacementEval evaluate_placement(const PlacementProblem& prob, const Eigen::VectorXd& theta,
                                 const Tolerances& tol = {});

/// Result of a placement search along the segment from c towards one anchor.
struct SegmentResult {
  bool feasible = false;
  double lambda = 0.0;       // fraction of the way from c to the anchor
  Eigen::VectorXd theta;
  double p_critical = 0.0;
};

/// Smallest feasible step from c towards anchor k: coarse scan brackets the first feasible point,
/// golden-section on a violation-aware merit refines it. Because p_cr grows with the step, the
/// smallest feasible step is the segment optimum.
SegmentResult segment_search(const PlacementProblem& prob, int anchor, const Tolerances& tol = {},
                             int scan_points = 64);

/// Golden-section minimisation of a unimodal f on [a, b]; returns the abscissa of the best sample.
template <class F>
double golden_section_minimize(F&& f, double a, double b, double tol, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  double best_x = f1 <= f2 ? x1 : x2;
  double best_f = std::min(f1, f2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
      if (f1 < best_f) best_f = f1, best_x = x1;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
      if (f2 < best_f) best_f = f2, best_x = x2;
    }
  }
  return best_x;
}

}  // namespace uasn
