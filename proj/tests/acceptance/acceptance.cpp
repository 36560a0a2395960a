// Acceptance checks. One line per criterion: "PASS|FAIL <n> <name>: <details> (<seconds>s)".
// Exit status is the number of failed criteria.

#include "instances.hpp"
#include "uasn/baselines.hpp"
#include "uasn/errors.hpp"
#include "uasn/harness.hpp"
#include "uasn/io.hpp"
#include "uasn/orns.hpp"
#include "uasn/rnmi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace uasn;

namespace {

struct Verdict {
  bool pass = false;
  std::string details;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.details.c_str(), secs);
  std::fflush(stdout);
  failures += !v.pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// P(X >= k) for X ~ Binomial(n, 1/2).
double sign_test_p(int wins, int n) {
  double p = 0.0;
  for (int k = wins; k <= n; ++k) p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
  return p;
}

Verdict thorp() {
  // 50-digit evaluations of the four-term formula
  const std::pair<double, double> ref[] = {
      {0.5, 0.025507625678312298031}, {1.0, 0.063028718605218239454}, {5.0, 0.34845308857808857809},
      {10.0, 1.0818908533710513909},  {50.0, 15.941975167508754074},
  };
  double worst = 0.0;
  for (const auto& [f, a] : ref) worst = std::max(worst, std::abs(thorp_db_per_km(f) - a) / a);
  return {worst <= 1e-9, fmt("max relative error %.2e, A(1) = %.5f dB/km", worst, thorp_db_per_km(1.0))};
}

Verdict energy_regimes() {
  const EnergyModel m;
  const double alpha = thorp_absorption(m.params().f_khz);
  const double below = 86.999, above = 87.0;
  const double p_below = m.params().p_s_mw + std::pow(alpha, below / 1000.0) * below * below;
  const double p_above = m.params().p_s_mw + std::pow(alpha, above / 1000.0) * std::pow(above, 4);
  const bool branches = std::abs(m.transmit_power(below) - p_below) <= 1e-12 * p_below &&
                        std::abs(m.transmit_power(above) - p_above) <= 1e-12 * p_above;
  double worst = 0.0;
  for (const auto& [lo, hi] : {std::pair{0.0, 86.99}, std::pair{87.0, 500.0}}) {
    const int n = 10000;
    const double h = (hi - lo) / n;
    for (int i = 1; i < n; ++i) {
      const double x = lo + i * h;
      const double second = m.transmit_power(x + h) - 2 * m.transmit_power(x) + m.transmit_power(x - h);
      worst = std::min(worst, second / m.transmit_power(x + h));
    }
  }
  return {branches && worst >= -1e-12, fmt("branches %s, min scaled second difference %.2e", branches ? "ok" : "wrong", worst)};
}

Verdict flow_invariants() {
  const Config cfg;
  const EnergyModel model = cfg.model();
  int deployments = 0, violations = 0, reroutes = 0, broken = 0;
  for (std::uint64_t seed = 1; deployments < 1000; ++seed) {
    const int n = 2 + static_cast<int>(seed % 29);
    const auto inst = generate_instance(n, cfg, seed, 1.0);
    ++deployments;
    violations += static_cast<int>(validate_rate_array(inst.rates, inst.deployment, model).size());

    // relay at the centroid of the critical node and its upper neighbours
    const int c = find_critical_node(inst.rates, inst.deployment, model);
    const auto upper = upper_neighbors(c, inst.rates);
    if (upper.neighbors.empty()) continue;
    Vec3 centroid = inst.deployment.node(c).position;
    for (const int j : upper.neighbors) centroid += inst.deployment.node(j).position;
    centroid /= static_cast<double>(upper.neighbors.size() + 1);
    const auto dep = inst.deployment.with_relay(centroid, cfg.eps_p);
    const int r = dep.size() - 1;
    RateArray after;
    try {
      after = reroute_through_relay(inst.rates.resized(dep.size()), dep, c, r, upper);
    } catch (const RangeError&) {
      continue;
    }
    ++reroutes;
    for (const auto& v : validate_rate_array(after, dep, model))
      broken += v.constraint == FlowConstraint::SensorBalance || v.constraint == FlowConstraint::RelayBalance;
    broken += after.col_sum(0) != inst.rates.col_sum(0);
    broken += revert_relay(after, r) != inst.rates.resized(dep.size());
  }
  return {violations == 0 && broken == 0 && reroutes > 0,
          fmt("%d deployments, %d violations; %d reroutes, %d balance breaks", deployments, violations, reroutes, broken)};
}

Verdict constraint_equivalence() {
  std::mt19937_64 rng(501);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int points = 0, disagree = 0, ties = 0;
  while (points < 10000) {
    const auto p = testing::random_problem(rng, 1 + points % 5);
    const auto c = build_lifetime_constraint(p);
    for (int s = 0; s < 10; ++s) {
      Eigen::VectorXd theta(p.num_anchors());
      for (auto& t : theta) t = -std::log(u(rng) + 1e-300);
      theta /= theta.sum();
      const auto e = evaluate_placement(p, theta);
      const auto x = LifetimeConstraint::decision_vector(e.p_neighbors, e.p_critical, e.d_critical, e.position, theta);
      const double a = c.lhs(x) - c.gamma0;
      const double b = p.eps_critical * e.load_relay - p.eps_relay * e.load_critical;
      const double scale = std::max(p.eps_critical * e.load_relay, p.eps_relay * e.load_critical);
      ++points;
      if (std::abs(b) <= 1e-9 * scale) {
        ++ties;
        continue;
      }
      disagree += (a > 0) != (b > 0);
    }
  }
  return {disagree == 0, fmt("%d points, %d ties excluded, %d sign disagreements", points, ties, disagree)};
}

Verdict solver_optimality() {
  std::mt19937_64 rng(502);
  int instances = 0, within = 0, false_feasible = 0, both_infeasible = 0;
  double worst = 0.0;
  while (instances < 100) {
    const auto p = testing::random_problem(rng, 1 + instances % 3);
    const auto s = solve_placement(p);
    const auto g = grid_oracle(p, 0.02);
    ++instances;
    if (s.feasible() && !evaluate_placement(p, s.theta).feasible) ++false_feasible;
    if (!g.feasible()) {
      within += 1;
      both_infeasible += !s.feasible();
      continue;
    }
    if (!s.feasible()) {
      worst = std::max(worst, 1.0);
      continue;
    }
    const double gap = (s.p_critical - g.p_critical) / g.p_critical;
    worst = std::max(worst, gap);
    within += gap <= 0.01;
  }
  return {within == instances && false_feasible == 0,
          fmt("%d/%d within 1%% (worst gap %+.2e), %d both infeasible, %d false feasible", within, instances, worst,
              both_infeasible, false_feasible)};
}

Verdict hull_dominance() {
  std::mt19937_64 rng(503);
  int multi = 0, worse = 0, single = 0, unequal = 0, strictly_better = 0;
  for (int i = 0; i < 200; ++i) {
    const auto p = testing::random_problem(rng, 2 + i % 4);
    const auto hull = solve_placement(p);
    const auto seg = solve_segment_placement(p);
    ++multi;
    if (!seg.feasible()) continue;
    if (!hull.feasible() || hull.p_critical > seg.p_critical) ++worse;
    strictly_better += hull.feasible() && hull.p_critical < seg.p_critical * (1 - 1e-9);
  }
  for (int i = 0; i < 50; ++i) {
    const auto p = testing::random_problem(rng, 1);
    const auto hull = solve_placement(p);
    const auto seg = solve_segment_placement(p);
    ++single;
    unequal += hull.feasible() != seg.feasible() || (hull.feasible() && hull.p_critical != seg.p_critical);
  }
  return {worse == 0 && unequal == 0,
          fmt("|N|>=2: %d instances, %d where the hull loses, %d strictly better; |N|=1: %d instances, %d unequal",
              multi, worse, strictly_better, single, unequal)};
}

struct CaseARuns {
  std::map<int, std::map<Method, MetricsReport>> by_n;
};

const MetricsReport& case_a(CaseARuns& runs, int n, Method m) {
  auto& slot = runs.by_n[n];
  if (!slot.contains(m)) {
    Scenario s;
    s.spec = case_spec("A");
    s.n = n;
    s.seeds = seed_range(1, 50);
    s.method = m;
    slot.emplace(m, run_experiment(s, Config{}));
  }
  return slot.at(m);
}

Verdict lifetime_ordering(CaseARuns& runs) {
  const auto& orns = case_a(runs, 40, Method::ORNS);
  bool pass = orns.failed_seeds.empty();
  std::string details = fmt("ORNS mean %.3e s", orns.mean_lifetime);
  for (const Method m : {Method::LSRNP, Method::RA, Method::NoRelay}) {
    const auto& other = case_a(runs, 40, m);
    int wins = 0, n = 0;
    for (std::size_t i = 0; i < orns.outcomes.size(); ++i) {
      const double a = orns.outcomes[i].lifetime, b = other.outcomes[i].lifetime;
      if (a == b) continue;
      ++n;
      wins += a > b;
    }
    const double p = sign_test_p(wins, n);
    pass = pass && other.failed_seeds.empty() && orns.mean_lifetime > other.mean_lifetime && p < 0.05;
    details += fmt("; vs %s mean %.3e, wins %d/%d, p=%.1e", to_string(m).c_str(), other.mean_lifetime, wins, n, p);
  }
  return {pass, details};
}

Verdict iec_improvement(CaseARuns& runs) {
  const auto& orns = case_a(runs, 40, Method::ORNS);
  const auto& none = case_a(runs, 40, Method::NoRelay);
  // identical per-run vectors: the IEC reduces to the spread of one vector
  const std::vector<double> v = orns.outcomes.front().residual;
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double hand = 0.0;
  for (const double x : v) hand += (x - mean) * (x - mean);
  const double sigma0_sq = 4e5 * 4e5;
  hand /= static_cast<double>(v.size()) * sigma0_sq;
  const double lib = compute_iec(std::vector<std::vector<double>>(7, v), sigma0_sq);
  const double rel = hand == 0.0 ? std::abs(lib) : std::abs(lib - hand) / hand;
  return {orns.iec < none.iec && rel <= 1e-12,
          fmt("IEC ORNS %.3e, none %.3e; hand formula relative error %.1e", orns.iec, none.iec, rel)};
}

Verdict n_trend(CaseARuns& runs) {
  const int ns[] = {20, 30, 40, 50};
  bool pass = true;
  std::string details;
  for (const Method m : {Method::ORNS, Method::LSRNP, Method::RA, Method::NoRelay}) {
    int inversions = 0;
    bool large = false;
    details += to_string(m) + " [";
    for (int i = 0; i < 4; ++i) {
      const auto& r = case_a(runs, ns[i], m);
      details += fmt("%s%.2e", i ? " " : "", r.mean_lifetime);
      if (i == 0) continue;
      const auto& prev = case_a(runs, ns[i - 1], m);
      if (r.mean_lifetime > prev.mean_lifetime) {
        ++inversions;
        large |= r.mean_lifetime - prev.mean_lifetime > std::max(r.stderr_lifetime, prev.stderr_lifetime);
      }
    }
    const bool ok = inversions == 0 || (inversions == 1 && !large);
    pass = pass && ok;
    details += fmt("] %d inversions%s; ", inversions, ok ? "" : " beyond tolerance");
  }
  details.resize(details.size() - 2);
  return {pass, details};
}

Verdict rnmi_exactness() {
  const Config cfg;
  const EnergyModel model = cfg.model();
  int instances = 0, mismatched = 0, below = 0, max_m = 0;
  for (std::uint64_t seed = 1; instances < 50; ++seed) {
    const int n = 10 + static_cast<int>(seed % 11);
    const auto inst = generate_instance(n, cfg, 7000 + seed, 0.25);
    const int m0 = 2 + static_cast<int>(seed % 11);
    const auto placed = orns_run(inst.deployment, inst.rates, model, m0, cfg.orns_options());
    const int m = placed.relays_deployed();
    if (m == 0) continue;
    ++instances;
    max_m = std::max(max_m, m);
    SelectionOptions opt = cfg.selection_options();
    opt.mode = SelectionMode::Exact;
    const auto sel = select_relays(placed, model, opt);
    const auto pb = make_selection_problem(placed, model, opt);

    // brute force with the same order: objective, kept count, lexicographic keep vector
    const double threshold = placed.lifetime * (1.0 - opt.lifetime_tol);
    std::vector<bool> best;
    double best_obj = 0.0;
    int best_kept = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      std::vector<bool> keep(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) keep[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
      if (network_lifetime(apply_selection(placed.rates, sel.relay_ids, keep), placed.deployment, model) < threshold)
        continue;
      double s = 0.0, l1 = 0.0;
      for (int i = 0; i < m; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double p_eff = keep[u] ? pb.p_relay[u] : 0.0;
        s += 1.0 - std::exp(-pb.eta * p_eff);
        l1 += std::abs(p_eff - (keep[u] ? pb.p_kept[u] : pb.p_direct[u]));
      }
      const double obj = pb.omega1 * s - pb.omega2 * l1;
      const int kept = static_cast<int>(std::count(keep.begin(), keep.end(), true));
      const bool better = best.empty() || obj < best_obj || (obj == best_obj && (kept < best_kept || (kept == best_kept && keep < best)));
      if (better) best = keep, best_obj = obj, best_kept = kept;
    }
    const bool same_obj = std::abs(sel.objective - best_obj) <= 1e-12 * std::max(1.0, std::abs(best_obj));
    mismatched += best.empty() || !same_obj || sel.keep != best;
    below += network_lifetime(sel.rates, placed.deployment, model) < threshold;
  }

  Scenario d;
  d.spec = case_spec("D");
  d.n = 80;
  d.seeds = seed_range(1, 50);
  d.method = Method::ORNS;
  d.selection = true;
  const auto rep = run_experiment(d, cfg);
  const int m0 = d.relay_budget();
  return {mismatched == 0 && below == 0 && rep.failed_seeds.empty() && rep.mean_kept < m0,
          fmt("%d instances (M0 up to %d), %d mismatches, %d below tau*; case D N=80: mean kept %.2f of M0=%d", instances,
              max_m, mismatched, below, rep.mean_kept, m0)};
}

std::string experiment_bytes(ExecPolicy policy) {
  std::ostringstream csv, pos, js;
  write_lifetime_csv_header(csv);
  for (const Method m : {Method::ORNS, Method::RA, Method::LSRNP, Method::NoRelay}) {
    Scenario s;
    s.spec = case_spec("C");
    s.n = 25;
    s.seeds = seed_range(100, 8);
    s.method = m;
    s.selection = m != Method::NoRelay;
    const auto rep = run_experiment(s, Config{}, policy);
    write_lifetime_csv(csv, rep);
    write_positions_csv(pos, rep);
    js << metrics_to_json(rep).dump(2) << '\n';
  }
  return csv.str() + pos.str() + js.str();
}

Verdict determinism() {
  const auto a = experiment_bytes(ExecPolicy::Parallel);
  const auto b = experiment_bytes(ExecPolicy::Parallel);
  const auto c = experiment_bytes(ExecPolicy::Serial);
  return {a == b && a == c, fmt("%zu bytes, rerun %s, serial %s", a.size(), a == b ? "identical" : "differs",
                                a == c ? "identical" : "differs")};
}

}  // namespace

int main() {
  CaseARuns runs;
  criterion(1, "thorp", thorp);
  criterion(2, "energy model regimes", energy_regimes);
  criterion(3, "flow invariants", flow_invariants);
  criterion(4, "constraint equivalence", constraint_equivalence);
  criterion(5, "solver optimality", solver_optimality);
  criterion(6, "hull dominance", hull_dominance);
  criterion(7, "lifetime ordering", [&] { return lifetime_ordering(runs); });
  criterion(8, "iec improvement", [&] { return iec_improvement(runs); });
  criterion(9, "lifetime decreases with N", [&] { return n_trend(runs); });
  criterion(10, "relay selection", rnmi_exactness);
  criterion(11, "determinism", determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
