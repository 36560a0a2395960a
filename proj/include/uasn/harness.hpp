#pragma once

#include "uasn/baselines.hpp"
#include "uasn/orns.hpp"
#include "uasn/parallel.hpp"
#include "uasn/rnmi.hpp"
#include "uasn/routing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uasn {

/// Simulation parameters. Defaults follow the evaluation setup of the method.
struct Config {
  EnergyParams energy;
  double h_s = 2000.0;   // field depth, m
  double r_s = 500.0;    // field radius, m
  double c_r = 500.0;    // communication range, m
  double eps_p = 4e5;    // primary energy, J
  Rate g_min = 10;
  Rate g_max = 200;
  double omega1 = 0.5;
  double eta = -1.0;     // <= 0: scaled to the data
  Tolerances tol;
  double horizon = 1e6;  // s, cap on the residual-energy drain
  // Residual energies are snapshotted at min(horizon, t) with t the no-relay lifetime of the
  // deployment (every method compared at the same instant) or each run's own lifetime.
  bool snapshot_at_initial_lifetime = true;
  RoutingOptions routing{RoutingPolicy::MultiPath, 1.0};
  bool skip_non_improving = true;
  int max_starts = 3;
  int generation_retries = 1000;

  Field field() const { return Field{r_s, h_s}; }
  EnergyModel model() const { return EnergyModel(energy); }
  OrnsOptions orns_options() const;
  SelectionOptions selection_options() const;
};

enum class Method { ORNS, RA, LSRNP, NoRelay };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct CaseSpec {
  std::string label;
  double rf = 1.0;       // residual-energy factor of the initially critical node
  double gamma_r = 0.0;  // relays per sensor
};

/// Cases A-D of the evaluation. Throws InvalidInput for other labels.
CaseSpec case_spec(const std::string& label);

struct Scenario {
  CaseSpec spec;
  int n = 40;
  std::vector<std::uint64_t> seeds;
  Method method = Method::ORNS;
  bool selection = false;

  int relay_budget() const;
};

struct Instance {
  Deployment deployment;
  RateArray rates;
  int critical = -1;  // node whose energy was scaled by RF
  int attempts = 0;
};

/// n sensors uniform in the cylinder, buoy at the origin, routed with config.routing. Redraws until
/// the network is connected and routable; the initially critical node then gets rf * eps_p.
Instance generate_instance(int n, const Config& config, std::uint64_t seed, double rf);

Deployment generate_deployment(int n, const Config& config, std::uint64_t seed, double rf);

/// Residual energies of the sensors after draining at constant rate for min(lifetime, horizon).
std::vector<double> residual_energies(const Deployment& dep, const RateArray& rates, const EnergyModel& model,
                                      double horizon);

/// (1/N) sum_i (E[eps_i] - E[mean eps])^2 / sigma0_sq, expectations over runs.
double compute_iec(const std::vector<std::vector<double>>& runs, double sigma0_sq);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double initial_lifetime = 0.0;
  double lifetime = 0.0;
  int relays_placed = 0;
  int relays_kept = 0;
  std::vector<Vec3> relay_positions;   // kept relays
  std::vector<double> residual;        // per sensor
};

/// One seed of a scenario: generate, route, place, optionally select, drain.
SeedOutcome run_seed(const Scenario& scenario, const Config& config, std::uint64_t seed);

struct MetricsReport {
  Scenario scenario;
  std::vector<SeedOutcome> outcomes;  // in seed order
  double mean_lifetime = 0.0;
  double stddev_lifetime = 0.0;
  double stderr_lifetime = 0.0;
  double mean_kept = 0.0;
  double iec = 0.0;
  std::vector<std::uint64_t> failed_seeds;
};

/// Seeds run in parallel; aggregation happens afterwards in seed order so the report is
/// independent of the thread count.
MetricsReport run_experiment(const Scenario& scenario, const Config& config,
                             ExecPolicy policy = ExecPolicy::Parallel);

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count);

}  // namespace uasn
