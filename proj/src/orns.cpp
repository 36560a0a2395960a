#include "uasn/orns.hpp"

#include "uasn/errors.hpp"
#include "uasn/kernels.hpp"
#include "uasn/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace uasn {

int find_critical_node(const RateArray& rates, const Deployment& dep, const EnergyModel& model,
                       const std::set<int>& excluded) {
  int best = -1;
  double best_tau = kInfiniteLifetime;
  for (int i = 0; i < dep.size(); ++i) {
    if (dep.node(i).kind == NodeKind::SurfaceBuoy || excluded.contains(i)) continue;
    const double tau = node_lifetime(i, rates, dep, model);
    if (tau < best_tau) best_tau = tau, best = i;
  }
  if (best < 0) throw InfeasibleError("no critical node: every lifetime is infinite");
  return best;
}

Eigen::VectorXd LifetimeConstraint::decision_vector(const std::vector<double>& p_relay, double p_critical,
                                                    double d_critical, const Vec3& relay_position,
                                                    const Eigen::VectorXd& theta) {
  const auto n = static_cast<Eigen::Index>(p_relay.size());
  if (theta.size() != n + 1) throw InvalidInput("theta must have |N| + 1 entries");
  Eigen::VectorXd x(2 * n + 6);
  for (Eigen::Index j = 0; j < n; ++j) x(j) = p_relay[static_cast<std::size_t>(j)];
  x(n) = p_critical;
  x(n + 1) = d_critical;
  x.segment<3>(n + 2) = relay_position;
  x.tail(n + 1) = theta;
  return x;
}

LifetimeConstraint build_lifetime_constraint(const PlacementProblem& prob) {
  if (!(prob.eps_critical > 0.0)) throw DomainError("critical node has no residual energy");
  const int n = prob.num_neighbors();
  const double ratio = prob.eps_relay / prob.eps_critical;
  LifetimeConstraint c;
  c.num_neighbors = n;
  c.gamma0 = prob.model.p_r() * prob.incoming * ratio - prob.model.p_r() * prob.forwarded;
  c.diag = Eigen::VectorXd::Zero(2 * n + 6);
  for (int j = 0; j < n; ++j) c.diag(j) = prob.flows[static_cast<std::size_t>(j)];
  c.diag(n) = -ratio * prob.forwarded;
  return c;
}

LifetimeConstraint build_lifetime_constraint(int c, double eps_relay, const UpperNeighborSet& upper,
                                             const RateArray& rates, const Deployment& dep,
                                             const EnergyModel& model) {
  return build_lifetime_constraint(make_placement_problem(c, upper, rates, dep, model, eps_relay));
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

PlacementSolution make_solution(const PlacementProblem& prob, const Eigen::VectorXd& theta, SolveStatus status,
                                const Tolerances& tol) {
  PlacementSolution s;
  s.status = status;
  if (status == SolveStatus::Infeasible) return s;
  const auto e = evaluate_placement(prob, theta, tol);
  s.theta = theta;
  s.position = e.position;
  s.p_critical = e.p_critical;
  s.p_neighbors = e.p_neighbors;
  s.d_critical = e.d_critical;
  s.tau_critical = e.tau_critical;
  s.tau_relay = e.tau_relay;
  return s;
}

namespace {

// p'(d)/d for one branch, finite at d = 0 so that p(|x - l|) has a gradient everywhere.
double branch_slope_over_distance(const EnergyModel& m, double d, Regime regime) {
  if (d > 1e-12) return m.branch_power_derivative(d, regime) / d;
  return regime == Regime::Near ? 2.0 : 0.0;
}

// Convex restriction of the lifetime constraint around theta_k: every p_rj keeps the branch
// active at theta_k (extended smoothly) and the concave side -p_cr is replaced by its tangent.
struct Linearization {
  std::vector<Regime> neighbor_regime;
  double p0 = 0.0;
  Eigen::VectorXd grad_p;  // gradient of p_cr at theta_k
  Eigen::VectorXd theta_k;
};

class CcpSolver {
 public:
  CcpSolver(const PlacementProblem& prob, const SolverSettings& settings) : prob_(prob), settings_(settings) {
    const int m = prob.num_anchors();
    for (int k = 1; k < m; ++k)
      q_scale_ = std::max(q_scale_, (Vec3(prob.anchors.col(k)) - prob.critical_position()).squaredNorm());
  }

  struct Run {
    Eigen::VectorXd theta;
    double p = kInfiniteLifetime;
    int iterations = 0;
    bool converged = false;
  };

  // Sequential convex feasibility: minimise the linearised constraint alone until the true model
  // accepts the point. Empty result when it stalls.
  std::optional<Eigen::VectorXd> restore(Eigen::VectorXd theta) const {
    for (int it = 0; it < 50; ++it) {
      if (evaluate(theta).feasible) return theta;
      const Linearization lin = linearize(theta);
      const double g_scale =
          std::max(prob_.eps_relay * (prob_.forwarded * lin.p0 + prob_.model.p_r() * prob_.incoming), 1e-300);
      const Eigen::VectorXd next = minimize_lagrangian(lin, 1e9, g_scale, theta);
      if ((next - theta).lpNorm<Eigen::Infinity>() < 1e-12) break;
      theta = next;
    }
    if (evaluate(theta).feasible) return theta;
    return std::nullopt;
  }

  Run run(const Eigen::VectorXd& start) {
    Run r{start, evaluate(start).p_critical, 0, false};
    r = polish_towards_critical(r);
    for (int it = 0; it < settings_.max_outer_iterations; ++it) {
      r.iterations = it + 1;
      const double before = r.p;
      const Linearization lin = linearize(r.theta);
      const Eigen::VectorXd proposal = solve_subproblem(lin);
      r = accept_or_backtrack(r, proposal);
      r = polish_towards_critical(r);
      if (!(r.p < before) || (before - r.p) <= settings_.relative_change_tol * before) {
        r.converged = true;
        break;
      }
    }
    return r;
  }

 private:
  PlacementEval evaluate(const Eigen::VectorXd& theta) const { return evaluate_placement(prob_, theta, settings_.tol); }

  Linearization linearize(const Eigen::VectorXd& theta) const {
    const EnergyModel& m = prob_.model;
    Linearization lin;
    lin.theta_k = theta;
    const Vec3 x = prob_.position(theta);
    for (int k = 0; k < prob_.num_neighbors(); ++k)
      lin.neighbor_regime.push_back(m.regime((x - Vec3(prob_.anchors.col(k + 1))).norm()));
    const Vec3 diff = x - prob_.critical_position();
    const double d = diff.norm();
    const Regime rc = m.regime(d);
    lin.p0 = m.branch_power(d, rc);
    lin.grad_p = branch_slope_over_distance(m, d, rc) * (prob_.anchors.transpose() * diff);
    return lin;
  }

  // eps_c * E_r(theta) - eps_r * E_c_linearised(theta); convex in theta.
  double surrogate(const Linearization& lin, const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
    const EnergyModel& m = prob_.model;
    const Vec3 x = prob_.position(theta);
    double relay_tx = 0.0;
    Vec3 spatial = Vec3::Zero();
    for (int k = 0; k < prob_.num_neighbors(); ++k) {
      const Vec3 diff = x - Vec3(prob_.anchors.col(k + 1));
      const double d = diff.norm();
      const Regime reg = lin.neighbor_regime[static_cast<std::size_t>(k)];
      const double f = prob_.flows[static_cast<std::size_t>(k)];
      relay_tx += f * m.branch_power(d, reg);
      if (grad) spatial += f * branch_slope_over_distance(m, d, reg) * diff;
    }
    const double p_lin = lin.p0 + lin.grad_p.dot(theta - lin.theta_k);
    const double value = prob_.eps_critical * (relay_tx + m.p_r() * prob_.forwarded) -
                         prob_.eps_relay * (prob_.forwarded * p_lin + m.p_r() * prob_.incoming);
    if (grad)
      *grad = prob_.eps_critical * (prob_.anchors.transpose() * spatial) - prob_.eps_relay * prob_.forwarded * lin.grad_p;
    return value;
  }

  double objective(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
    const Vec3 diff = prob_.position(theta) - prob_.critical_position();
    if (grad) *grad = 2.0 * (prob_.anchors.transpose() * diff) / q_scale_;
    return diff.squaredNorm() / q_scale_;
  }

  // argmin over the simplex of q(theta) + lambda * g(theta) / g_scale, projected gradient with backtracking.
  Eigen::VectorXd minimize_lagrangian(const Linearization& lin, double lambda, double g_scale,
                                      Eigen::VectorXd theta) const {
    Eigen::VectorXd gq, gg;
    auto phi = [&](const Eigen::VectorXd& t, Eigen::VectorXd* grad) {
      const double v = objective(t, grad ? &gq : nullptr) + lambda * surrogate(lin, t, grad ? &gg : nullptr) / g_scale;
      if (grad) *grad = gq + lambda * gg / g_scale;
      return v;
    };
    Eigen::VectorXd grad;
    double step = 1.0;
    for (int it = 0; it < settings_.max_inner_iterations; ++it) {
      const double f = phi(theta, &grad);
      Eigen::VectorXd next;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        next = project_to_simplex(theta - step * grad);
        const Eigen::VectorXd delta = next - theta;
        if (phi(next, nullptr) <= f + grad.dot(delta) + delta.squaredNorm() / (2.0 * step)) {
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
      const double change = (next - theta).lpNorm<Eigen::Infinity>();
      theta = next;
      if (change < 1e-13) break;
      step *= 2.0;
    }
    return theta;
  }

  // Bisection on the multiplier until the restricted constraint is just satisfied.
  Eigen::VectorXd solve_subproblem(const Linearization& lin) const {
    const Eigen::VectorXd origin = simplex_vertex(prob_.num_anchors(), 0);
    if (surrogate(lin, origin, nullptr) <= 0.0) return origin;
    const double g_scale =
        std::max(prob_.eps_relay * (prob_.forwarded * lin.p0 + prob_.model.p_r() * prob_.incoming), 1e-300);

    double hi = 1.0;
    Eigen::VectorXd theta_hi = minimize_lagrangian(lin, hi, g_scale, lin.theta_k);
    while (surrogate(lin, theta_hi, nullptr) > 0.0 && hi < 1e12) {
      hi *= 10.0;
      theta_hi = minimize_lagrangian(lin, hi, g_scale, theta_hi);
    }
    if (surrogate(lin, theta_hi, nullptr) > 0.0) return lin.theta_k;
    double lo = hi > 1.0 ? hi / 10.0 : 0.0;
    for (int it = 0; it < 60 && (lo == 0.0 ? hi > 1e-12 : hi / lo > 1.0 + 1e-9); ++it) {
      const double mid = lo == 0.0 ? 0.5 * hi : std::sqrt(lo * hi);
      const Eigen::VectorXd theta_mid = minimize_lagrangian(lin, mid, g_scale, theta_hi);
      if (surrogate(lin, theta_mid, nullptr) <= 0.0) {
        hi = mid;
        theta_hi = theta_mid;
      } else {
        lo = mid;
      }
    }
    return theta_hi;
  }

  // The restriction is exact only inside the current branches; halve the step until the true
  // model accepts the move.
  Run accept_or_backtrack(const Run& current, const Eigen::VectorXd& proposal) const {
    Run r = current;
    double s = 1.0;
    for (int k = 0; k < 40; ++k, s *= 0.5) {
      const Eigen::VectorXd theta = current.theta + s * (proposal - current.theta);
      const auto e = evaluate(theta);
      if (e.feasible && e.p_critical < current.p) {
        r.theta = theta;
        r.p = e.p_critical;
        return r;
      }
    }
    return r;
  }

  // Moving towards vertex 0 shrinks d_cr linearly; find the farthest feasible step along that ray.
  Run polish_towards_critical(const Run& current) const {
    const Eigen::VectorXd target = simplex_vertex(prob_.num_anchors(), 0);
    auto at = [&](double t) -> Eigen::VectorXd { return (1.0 - t) * current.theta + t * target; };
    constexpr int kScan = 32;
    double feasible_t = 0.0;
    double infeasible_t = 1.0;
    for (int i = kScan; i >= 1; --i) {
      const double t = static_cast<double>(i) / kScan;
      if (evaluate(at(t)).feasible) {
        feasible_t = t;
        break;
      }
      infeasible_t = t;
    }
    if (feasible_t == 1.0) infeasible_t = 1.0;
    for (int it = 0; it < 80 && infeasible_t - feasible_t > 1e-15; ++it) {
      const double mid = 0.5 * (feasible_t + infeasible_t);
      if (evaluate(at(mid)).feasible)
        feasible_t = mid;
      else
        infeasible_t = mid;
    }
    if (feasible_t == 0.0) return current;
    const Eigen::VectorXd theta = at(feasible_t);
    const auto e = evaluate(theta);
    if (!e.feasible || !(e.p_critical < current.p)) return current;
    return Run{theta, e.p_critical, current.iterations, current.converged};
  }

  const PlacementProblem& prob_;
  const SolverSettings& settings_;
  double q_scale_ = 1.0;
};

// Coarse barycentric grid used only to seed the local solver.
int seeding_resolution(int anchors) {
  switch (anchors) {
    case 3: return 16;
    case 4: return 10;
    case 5: return 6;
    case 6: return 4;
    default: return anchors <= 2 ? 32 : 2;
  }
}

}  // namespace

PlacementSolution solve_placement(const PlacementProblem& prob, const SolverSettings& settings) {
  if (prob.num_neighbors() < 1) throw InvalidInput("placement needs at least one upper neighbour");
  const Tolerances& tol = settings.tol;

  struct Candidate {
    Eigen::VectorXd theta;
    double p;
  };
  std::vector<Candidate> segments;
  for (int k = 1; k < prob.num_anchors(); ++k) {
    const auto seg = segment_search(prob, k, tol);
    if (seg.feasible) segments.push_back({seg.theta, seg.p_critical});
  }

  PlacementSolution solution;
  if (prob.num_neighbors() == 1) {
    solution = segments.empty() ? PlacementSolution{}
                                : make_solution(prob, segments.front().theta, SolveStatus::Optimal, tol);
  } else {
    std::vector<Candidate> pool = segments;
    const int m = prob.num_anchors();
    const int k = seeding_resolution(m);
    Eigen::VectorXd theta(m);
    Eigen::VectorXd least_violating;
    double least_violation = kInfiniteLifetime;
    auto seed_grid = [&](int k) {
      for_each_composition(m, k, [&](const std::vector<int>& counts) {
        for (int i = 0; i < m; ++i) theta(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / k;
        const auto e = evaluate_placement(prob, theta, tol);
        if (e.feasible)
          pool.push_back({theta, e.p_critical});
        else if (e.violation() < least_violation)
          least_violation = e.violation(), least_violating = theta;
      });
    };
    seed_grid(k);
    // Thin feasible sets can fall between the coarse grid points.
    for (int kk = 2 * k; pool.empty() && barycentric_grid_size(m, kk) <= 200000; kk *= 2) seed_grid(kk);
    CcpSolver ccp(prob, settings);
    if (pool.empty() && least_violating.size() > 0)
      if (const auto restored = ccp.restore(least_violating))
        pool.push_back({*restored, evaluate_placement(prob, *restored, tol).p_critical});
    std::stable_sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) { return a.p < b.p; });

    std::vector<Eigen::VectorXd> starts;
    for (const auto& c : pool) {
      if (static_cast<int>(starts.size()) >= settings.max_starts) break;
      const bool duplicate = std::any_of(starts.begin(), starts.end(), [&](const Eigen::VectorXd& s) {
        return (s - c.theta).lpNorm<Eigen::Infinity>() < 1e-6;
      });
      if (!duplicate) starts.push_back(c.theta);
    }

    bool have = false;
    Eigen::VectorXd best_theta;
    double best_p = kInfiniteLifetime;
    int iterations = 0;
    bool converged = true;
    for (const auto& start : starts) {
      const auto run = ccp.run(start);
      iterations += run.iterations;
      if (!have || run.p < best_p) {
        have = true;
        best_theta = run.theta;
        best_p = run.p;
        converged = run.converged;
      }
    }
    // Every segment optimum lies in the hull, so the hull answer is never worse than any of them.
    for (const auto& seg : segments) {
      if (!have || seg.p < best_p) {
        have = true;
        best_theta = seg.theta;
        best_p = seg.p;
        converged = true;
      }
    }
    if (have) {
      solution = make_solution(prob, best_theta, converged ? SolveStatus::Optimal : SolveStatus::MaxIterations, tol);
      solution.iterations = iterations;
    }
  }

  if (settings.certify && prob.num_neighbors() <= 3 && solution.feasible()) {
    const auto oracle = grid_oracle(prob, settings.certify_step, tol);
    if (oracle.feasible()) solution.oracle_gap = (solution.p_critical - oracle.p_critical) / oracle.p_critical;
  }
  return solution;
}

PlacementSolution grid_oracle(const PlacementProblem& prob, double step, const Tolerances& tol, ExecPolicy policy) {
  if (prob.num_neighbors() < 1 || prob.num_neighbors() > 4) throw InvalidInput("grid oracle supports 1..4 neighbours");
  if (!(step > 0.0) || step > 1.0) throw InvalidInput("grid step must lie in (0, 1]");
  const int k = static_cast<int>(std::lround(1.0 / step));
  if (barycentric_grid_size(prob.num_anchors(), k) > 5'000'000) throw InvalidInput("grid too large");
  const auto best = policy == ExecPolicy::Serial ? grid_search_serial(prob, k, tol) : grid_search_parallel(prob, k, tol);
  if (!best.found) return PlacementSolution{};
  return make_solution(prob, best.theta, SolveStatus::Optimal, tol);
}

int SequentialPlacementResult::relays_deployed() const {
  return static_cast<int>(std::count_if(log.begin(), log.end(), [](const PlacementRecord& r) { return !r.skipped; }));
}

SequentialPlacementResult run_sequential_placement(const Deployment& dep, const RateArray& rates,
                                                   const EnergyModel& model, int m0, const PlacementSolver& solver,
                                                   const OrnsOptions& options) {
  if (m0 < 0) throw InvalidInput("relay count must be nonnegative");
  SequentialPlacementResult out{dep, rates, {}, network_lifetime(rates, dep, model), 0.0};
  std::set<int> excluded;

  for (int iter = 0; iter < m0; ++iter) {
    PlacementRecord rec;
    rec.iteration = iter;
    rec.lifetime_before = network_lifetime(out.rates, out.deployment, model);
    rec.lifetime_after = rec.lifetime_before;
    int c = -1;
    try {
      c = find_critical_node(out.rates, out.deployment, model, excluded);
    } catch (const InfeasibleError&) {
      rec.skipped = true;
      rec.reason = "no candidate critical node";
      out.log.push_back(rec);
      continue;
    }
    const auto upper = upper_neighbors(c, out.rates);
    rec.critical = c;
    rec.neighbors = upper.neighbors;
    for (const int j : upper.neighbors) {
      rec.flows.push_back(out.rates(c, j));
      rec.p_direct += model.transmit_power(out.deployment.distance(c, j)) * static_cast<double>(out.rates(c, j));
    }
    rec.tau_critical_before = node_lifetime(c, out.rates, out.deployment, model);

    auto skip = [&](std::string reason) {
      rec.skipped = true;
      rec.reason = std::move(reason);
      excluded.insert(c);
      out.log.push_back(rec);
    };
    if (upper.neighbors.empty()) {
      skip("critical node has no upper neighbours");
      continue;
    }
    const auto problem = make_placement_problem(c, upper, out.rates, out.deployment, model, options.relay_energy);
    rec.solution = solver(problem);
    if (!rec.solution.feasible()) {
      skip("placement infeasible");
      continue;
    }
    if (options.skip_non_improving && !(rec.solution.tau_critical > rec.tau_critical_before)) {
      skip("critical node lifetime not improved");
      continue;
    }

    const double energy = problem.eps_relay;
    Deployment next_dep = out.deployment.with_relay(rec.solution.position, energy);
    const int r = next_dep.size() - 1;
    RateArray next_rates = reroute_through_relay(out.rates.resized(next_dep.size()), next_dep, c, r, upper);
    out.deployment = std::move(next_dep);
    out.rates = std::move(next_rates);
    rec.relay = r;
    rec.lifetime_after = network_lifetime(out.rates, out.deployment, model);
    excluded.clear();
    out.log.push_back(rec);
  }
  out.lifetime = network_lifetime(out.rates, out.deployment, model);
  return out;
}

SequentialPlacementResult orns_run(const Deployment& dep, const RateArray& rates, const EnergyModel& model, int m0,
                                   const OrnsOptions& options) {
  const SolverSettings settings = options.solver;
  return run_sequential_placement(
      dep, rates, model, m0, [&](const PlacementProblem& p) { return solve_placement(p, settings); }, options);
}

}  // namespace uasn
