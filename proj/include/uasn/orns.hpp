#pragma once

#include "uasn/model.hpp"
#include "uasn/parallel.hpp"
#include "uasn/placement.hpp"
#include "uasn/routing.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace uasn {

/// Critical node: minimum lifetime over sensors and relays, lowest id on ties.
/// Nodes in `excluded` are skipped. Throws InfeasibleError when every lifetime is infinite.
int find_critical_node(const RateArray& rates, const Deployment& dep, const EnergyModel& model,
                       const std::set<int>& excluded = {});

/// Relay-lifetime constraint tau_r >= tau_c written as the linear inequality 1'Dx <= gamma0 over the
/// decision vector x = [p_r1..p_rN, p_cr, d_cr, l_r (3), theta_0..theta_N] of length 2N + 6.
struct LifetimeConstraint {
  int num_neighbors = 0;
  double gamma0 = 0.0;
  Eigen::VectorXd diag;  // diagonal of D

  static Eigen::VectorXd decision_vector(const std::vector<double>& p_relay, double p_critical, double d_critical,
                                         const Vec3& relay_position, const Eigen::VectorXd& theta);
  double lhs(const Eigen::VectorXd& x) const { return diag.dot(x); }
  bool satisfied(const Eigen::VectorXd& x) const { return lhs(x) <= gamma0; }
};

/// Built from the rates before the reroute (R[r][j] = R[c][j] and R[c][r] = sum_j R[c][j] after it).
/// Throws DomainError when the critical node has no residual energy.
LifetimeConstraint build_lifetime_constraint(int c, double eps_relay, const UpperNeighborSet& upper,
                                             const RateArray& rates, const Deployment& dep, const EnergyModel& model);
LifetimeConstraint build_lifetime_constraint(const PlacementProblem& prob);

struct SolverSettings {
  Tolerances tol;
  int max_outer_iterations = 500;     // convex-concave iterations per start
  double relative_change_tol = 1e-6;  // stop when p_cr improves by less than this fraction
  int max_inner_iterations = 400;     // projected-gradient steps per Lagrangian solve
  int max_starts = 3;
  bool certify = false;               // compare against grid_oracle when |N| <= 3
  double certify_step = 0.02;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations };
std::string to_string(SolveStatus s);

struct PlacementSolution {
  SolveStatus status = SolveStatus::Infeasible;
  Eigen::VectorXd theta;
  Vec3 position = Vec3::Zero();
  double p_critical = kInfiniteLifetime;  // objective, mW/bit
  std::vector<double> p_neighbors;
  double d_critical = 0.0;
  double tau_critical = 0.0;
  double tau_relay = 0.0;
  int iterations = 0;
  std::optional<double> oracle_gap;  // (p - p_grid) / p_grid when certified

  bool feasible() const { return status != SolveStatus::Infeasible; }
};

PlacementSolution make_solution(const PlacementProblem& prob, const Eigen::VectorXd& theta, SolveStatus status,
                                const Tolerances& tol);

/// Minimises p_cr over the hull subject to tau_r >= tau_c with a convex-concave procedure in
/// barycentric coordinates. With a single upper neighbour the hull is a segment and the exact
/// segment search is returned.
PlacementSolution solve_placement(const PlacementProblem& prob, const SolverSettings& settings = {});

/// Exhaustive search over the barycentric grid of spacing `step` (|N| <= 4, at most 5e6 points).
PlacementSolution grid_oracle(const PlacementProblem& prob, double step, const Tolerances& tol = {},
                              ExecPolicy policy = ExecPolicy::Parallel);

/// One entry of the placement log.
struct PlacementRecord {
  int iteration = 0;
  int critical = -1;
  std::vector<int> neighbors;
  std::vector<Rate> flows;           // R[c][j] before the reroute
  int relay = -1;                    // node id of the deployed relay, -1 when skipped
  PlacementSolution solution;
  double p_direct = 0.0;             // sum_j p_cj R[c][j] before the reroute, mW
  double tau_critical_before = 0.0;
  double lifetime_before = 0.0;
  double lifetime_after = 0.0;
  bool skipped = false;
  std::string reason;
};

struct SequentialPlacementResult {
  Deployment deployment;
  RateArray rates;
  std::vector<PlacementRecord> log;
  double initial_lifetime = 0.0;
  double lifetime = 0.0;  // tau*

  int relays_deployed() const;
};

struct OrnsOptions {
  SolverSettings solver;
  // A placement that does not strictly lengthen the critical node's life is not deployed and the
  // next iteration targets another node. false places unconditionally.
  bool skip_non_improving = true;
  double relay_energy = -1.0;  // < 0: primary energy of the critical node
};

using PlacementSolver = std::function<PlacementSolution(const PlacementProblem&)>;

/// Shared driver: M0 rounds of find-critical, build neighbours, solve, reroute.
SequentialPlacementResult run_sequential_placement(const Deployment& dep, const RateArray& rates,
                                                   const EnergyModel& model, int m0, const PlacementSolver& solver,
                                                   const OrnsOptions& options);

SequentialPlacementResult orns_run(const Deployment& dep, const RateArray& rates, const EnergyModel& model, int m0,
                                   const OrnsOptions& options = {});

}  // namespace uasn
