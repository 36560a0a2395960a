#pragma once

#include "uasn/model.hpp"
#include "uasn/orns.hpp"
#include "uasn/parallel.hpp"

#include <cstdint>
#include <vector>

namespace uasn {

/// sum_i (1 - exp(-eta p_i)). Throws DomainError for negative entries or eta <= 0.
double smoothed_zero_norm(const std::vector<double>& p, double eta);

struct SelectionProblem {
  std::vector<double> p_relay;   // per relay: sum_j p_rj, mW/bit
  std::vector<double> p_kept;    // per relay: p_cr * R[c][r] when the relay is kept, mW
  std::vector<double> p_direct;  // per relay: sum_j p_cj R[c][j] when it is dropped, mW
  double tau_star = 0.0;
  double omega1 = 0.5;
  double omega2 = 0.5;
  double eta = 1.0;

  int size() const { return static_cast<int>(p_relay.size()); }
  void validate() const;
};

/// Default smoothing: 10 / median of the nonzero p_relay entries, clamped to [1e-3, 1e6].
double default_eta(const std::vector<double>& p_relay);

/// omega1 * s(p_eff) - omega2 * |p_eff - p_c|_1 with p_eff[i] = keep[i] ? p_relay[i] : 0 and p_c
/// switching between p_kept and p_direct. Lower is better.
double selection_objective(const std::vector<bool>& keep, const SelectionProblem& problem);

struct RelayBreakdown {
  int id = -1;
  double p_relay = 0.0;
  double p_direct = 0.0;
  double step_term = 0.0;     // 1 - exp(-eta p_eff)
  double saving_term = 0.0;   // |p_eff - p_c|
  double lifetime_if_dropped = 0.0;
};

enum class SelectionMode { Auto, Exact, Greedy };

struct SelectionOptions {
  double omega1 = 0.5;
  double eta = -1.0;  // <= 0: default_eta
  SelectionMode mode = SelectionMode::Auto;
  int exact_limit = 16;  // Auto mode enumerates up to this many relays
  double lifetime_tol = 1e-9;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct SelectionResult {
  std::vector<bool> keep;      // one entry per deployed relay, in deployment order
  std::vector<int> relay_ids;
  double objective = 0.0;
  double min_lifetime = kInfiniteLifetime;
  double tau_star = 0.0;
  bool exact = true;
  bool constraint_relaxed = false;
  std::vector<RelayBreakdown> per_relay;
  RateArray rates;             // after reverting the dropped relays

  int kept() const;
  std::vector<int> kept_ids() const;
  std::vector<int> dropped_ids() const;
};

/// Rate array with the relays whose keep bit is false handed back to their predecessors.
RateArray apply_selection(const RateArray& rates, const std::vector<int>& relay_ids, const std::vector<bool>& keep);

/// Builds the selection instance from a finished placement run.
SelectionProblem make_selection_problem(const SequentialPlacementResult& placed, const EnergyModel& model,
                                        const SelectionOptions& options = {});

/// Keeps the subset of deployed relays that minimises the objective while the network lifetime
/// stays >= tau* (relative tolerance). Exact enumeration up to exact_limit relays, greedy beyond.
/// Ties: fewer relays kept, then the lexicographically smaller keep vector.
SelectionResult select_relays(const SequentialPlacementResult& placed, const EnergyModel& model,
                              const SelectionOptions& options = {});

}  // namespace uasn
