#include "uasn/harness.hpp"

#include "uasn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace uasn {

OrnsOptions Config::orns_options() const {
  OrnsOptions o;
  o.solver.tol = tol;
  o.solver.max_starts = max_starts;
  o.skip_non_improving = skip_non_improving;
  return o;
}

SelectionOptions Config::selection_options() const {
  SelectionOptions s;
  s.omega1 = omega1;
  s.eta = eta;
  return s;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::ORNS: return "orns";
    case Method::RA: return "ra";
    case Method::LSRNP: return "lsrnp";
    case Method::NoRelay: return "none";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "orns") return Method::ORNS;
  if (s == "ra") return Method::RA;
  if (s == "lsrnp") return Method::LSRNP;
  if (s == "none") return Method::NoRelay;
  throw InvalidInput("unknown method '" + s + "'");
}

CaseSpec case_spec(const std::string& label) {
  if (label == "A") return {"A", 0.25, 0.3};
  if (label == "B") return {"B", 0.75, 0.3};
  if (label == "C") return {"C", 0.25, 0.6};
  if (label == "D") return {"D", 0.25, 0.9};
  throw InvalidInput("unknown case '" + label + "'");
}

int Scenario::relay_budget() const { return static_cast<int>(std::lround(spec.gamma_r * n)); }

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(first + static_cast<std::uint64_t>(i));
  return seeds;
}

Instance generate_instance(int n, const Config& config, std::uint64_t seed, double rf) {
  if (n < 1) throw InvalidInput("need at least one sensor");
  if (!(rf > 0.0 && rf <= 1.0)) throw InvalidInput("residual-energy factor must lie in (0, 1]");
  if (config.g_min < 0 || config.g_max < config.g_min) throw InvalidInput("bad generation-rate range");

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Rate> rate(config.g_min, config.g_max);
  const EnergyModel model = config.model();

  for (int attempt = 1; attempt <= config.generation_retries; ++attempt) {
    std::vector<Node> nodes;
    nodes.push_back(Node{0, NodeKind::SurfaceBuoy, Vec3::Zero(), 0.0, 0.0, 0});
    for (int i = 1; i <= n; ++i) {
      const double r = config.r_s * std::sqrt(unit(rng));
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const double z = -config.h_s * unit(rng);
      nodes.push_back(Node{i, NodeKind::Sensor, Vec3(r * std::cos(phi), r * std::sin(phi), z), config.eps_p,
                           config.eps_p, rate(rng)});
    }
    Deployment dep(std::move(nodes), config.c_r, config.field());
    if (!dep.connected()) continue;
    RateArray rates;
    try {
      rates = build_initial_rate_array(dep, model, config.routing);
    } catch (const InfeasibleError&) {
      continue;
    }
    const int c = find_critical_node(rates, dep, model);
    return Instance{dep.with_residual_energy(c, rf * config.eps_p), rates, c, attempt};
  }
  throw InfeasibleError("no connected deployment after " + std::to_string(config.generation_retries) + " attempts");
}

Deployment generate_deployment(int n, const Config& config, std::uint64_t seed, double rf) {
  return generate_instance(n, config, seed, rf).deployment;
}

std::vector<double> residual_energies(const Deployment& dep, const RateArray& rates, const EnergyModel& model,
                                      double horizon) {
  const double t = std::min(network_lifetime(rates, dep, model), horizon);
  std::vector<double> out;
  for (const int i : dep.ids_of(NodeKind::Sensor))
    out.push_back(std::max(0.0, dep.node(i).residual_energy - t * node_power_draw(i, rates, dep, model)));
  return out;
}

double compute_iec(const std::vector<std::vector<double>>& runs, double sigma0_sq) {
  if (runs.empty() || runs.front().empty()) throw InvalidInput("IEC needs at least one non-empty run");
  if (!(sigma0_sq > 0.0)) throw DomainError("normalisation must be positive");
  const std::size_t n = runs.front().size();
  std::vector<double> mean_i(n, 0.0);
  double mean_bar = 0.0;
  for (const auto& run : runs) {
    if (run.size() != n) throw InvalidInput("IEC runs differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean_i[i] += run[i];
      s += run[i];
    }
    mean_bar += s / static_cast<double>(n);
  }
  const double runs_n = static_cast<double>(runs.size());
  mean_bar /= runs_n;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = mean_i[i] / runs_n - mean_bar;
    acc += d * d;
  }
  return acc / static_cast<double>(n) / sigma0_sq;
}

SeedOutcome run_seed(const Scenario& scenario, const Config& config, std::uint64_t seed) {
  SeedOutcome out;
  out.seed = seed;
  try {
    const EnergyModel model = config.model();
    const Instance inst = generate_instance(scenario.n, config, seed, scenario.spec.rf);
    const int m0 = scenario.relay_budget();
    const OrnsOptions opts = config.orns_options();

    SequentialPlacementResult placed = [&] {
      switch (scenario.method) {
        case Method::ORNS: return orns_run(inst.deployment, inst.rates, model, m0, opts);
        case Method::LSRNP: return place_lsrnp(inst.deployment, inst.rates, model, m0, opts);
        case Method::RA:
          return place_ra(inst.deployment, inst.rates, model, m0, seed * 0x9E3779B97F4A7C15ULL + 1, opts);
        case Method::NoRelay: break;
      }
      return place_none(inst.deployment, inst.rates, model);
    }();

    out.initial_lifetime = placed.initial_lifetime;
    out.relays_placed = placed.relays_deployed();
    RateArray rates = placed.rates;
    std::vector<int> kept;
    for (const auto& rec : placed.log)
      if (!rec.skipped) kept.push_back(rec.relay);
    if (scenario.selection && !kept.empty()) {
      const SelectionResult sel = select_relays(placed, model, config.selection_options());
      rates = sel.rates;
      kept = sel.kept_ids();
    }
    out.relays_kept = static_cast<int>(kept.size());
    for (const int r : kept) out.relay_positions.push_back(placed.deployment.node(r).position);
    out.lifetime = network_lifetime(rates, placed.deployment, model);
    const double drain = config.snapshot_at_initial_lifetime ? std::min(config.horizon, placed.initial_lifetime)
                                                             : config.horizon;
    out.residual = residual_energies(placed.deployment, rates, model, drain);
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

MetricsReport run_experiment(const Scenario& scenario, const Config& config, ExecPolicy policy) {
  MetricsReport report;
  report.scenario = scenario;
  report.outcomes.resize(scenario.seeds.size());
  parallel_for(policy, 0, static_cast<std::int64_t>(scenario.seeds.size()), [&](std::int64_t i) {
    const auto u = static_cast<std::size_t>(i);
    report.outcomes[u] = run_seed(scenario, config, scenario.seeds[u]);
  });

  std::vector<double> lifetimes;
  std::vector<std::vector<double>> residuals;
  double kept = 0.0;
  for (const auto& o : report.outcomes) {
    if (!o.ok) {
      report.failed_seeds.push_back(o.seed);
      continue;
    }
    lifetimes.push_back(o.lifetime);
    residuals.push_back(o.residual);
    kept += o.relays_kept;
  }
  if (!lifetimes.empty()) {
    const double n = static_cast<double>(lifetimes.size());
    double sum = 0.0;
    for (const double x : lifetimes) sum += x;
    report.mean_lifetime = sum / n;
    double ss = 0.0;
    for (const double x : lifetimes) ss += (x - report.mean_lifetime) * (x - report.mean_lifetime);
    report.stddev_lifetime = lifetimes.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    report.stderr_lifetime = report.stddev_lifetime / std::sqrt(n);
    report.mean_kept = kept / n;
    report.iec = compute_iec(residuals, config.eps_p * config.eps_p);
  }
  return report;
}

}  // namespace uasn
