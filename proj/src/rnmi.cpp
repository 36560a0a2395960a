#include "uasn/rnmi.hpp"

#include "uasn/errors.hpp"
#include "uasn/kernels.hpp"
#include "uasn/routing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uasn {

double smoothed_zero_norm(const std::vector<double>& p, double eta) {
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  double s = 0.0;
  for (const double x : p) {
    if (x < 0.0) throw DomainError("smoothed zero-norm needs nonnegative entries");
    s += -std::expm1(-eta * x);
  }
  return s;
}

void SelectionProblem::validate() const {
  const std::size_t m = p_relay.size();
  if (p_kept.size() != m || p_direct.size() != m) throw InvalidInput("selection vectors differ in length");
  auto nonneg = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; }); };
  if (!nonneg(p_relay) || !nonneg(p_kept) || !nonneg(p_direct)) throw DomainError("selection powers must be nonnegative");
  if (!(omega1 > 0.0 && omega1 < 1.0) || std::abs(omega1 + omega2 - 1.0) > 1e-12)
    throw InvalidInput("weights must lie in (0, 1) and sum to 1");
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
}

double default_eta(const std::vector<double>& p_relay) {
  std::vector<double> nz;
  for (const double x : p_relay)
    if (x > 0.0) nz.push_back(x);
  if (nz.empty()) return 1.0;
  std::sort(nz.begin(), nz.end());
  const std::size_t n = nz.size();
  const double median = n % 2 == 1 ? nz[n / 2] : 0.5 * (nz[n / 2 - 1] + nz[n / 2]);
  return std::clamp(10.0 / median, 1e-3, 1e6);
}

namespace {

double term_step(const SelectionProblem& pb, std::size_t i, bool keep) {
  return keep ? -std::expm1(-pb.eta * pb.p_relay[i]) : 0.0;
}

double term_saving(const SelectionProblem& pb, std::size_t i, bool keep) {
  return keep ? std::abs(pb.p_relay[i] - pb.p_kept[i]) : pb.p_direct[i];
}

double objective_of_mask(std::uint64_t mask, const SelectionProblem& pb) {
  double step = 0.0;
  double saving = 0.0;
  for (std::size_t i = 0; i < pb.p_relay.size(); ++i) {
    const bool keep = ((mask >> i) & 1u) != 0;
    step += term_step(pb, i, keep);
    saving += term_saving(pb, i, keep);
  }
  return pb.omega1 * step - pb.omega2 * saving;
}

std::vector<bool> keep_from_mask(std::uint64_t mask, int m) {
  std::vector<bool> keep(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) keep[static_cast<std::size_t>(i)] = ((mask >> i) & 1u) != 0;
  return keep;
}

std::vector<int> deployed_relays(const SequentialPlacementResult& placed) {
  std::vector<int> ids;
  for (const auto& rec : placed.log)
    if (!rec.skipped) ids.push_back(rec.relay);
  return ids;
}

}  // namespace

double selection_objective(const std::vector<bool>& keep, const SelectionProblem& problem) {
  if (keep.size() != problem.p_relay.size()) throw InvalidInput("keep vector has the wrong length");
  double step = 0.0;
  double saving = 0.0;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    step += term_step(problem, i, keep[i]);
    saving += term_saving(problem, i, keep[i]);
  }
  return problem.omega1 * step - problem.omega2 * saving;
}

int SelectionResult::kept() const { return static_cast<int>(std::count(keep.begin(), keep.end(), true)); }

std::vector<int> SelectionResult::kept_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) out.push_back(relay_ids[i]);
  return out;
}

std::vector<int> SelectionResult::dropped_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (!keep[i]) out.push_back(relay_ids[i]);
  return out;
}

RateArray apply_selection(const RateArray& rates, const std::vector<int>& relay_ids, const std::vector<bool>& keep) {
  if (relay_ids.size() != keep.size()) throw InvalidInput("keep vector has the wrong length");
  RateArray out = rates;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (!keep[i]) out = revert_relay(out, relay_ids[i]);
  return out;
}

SelectionProblem make_selection_problem(const SequentialPlacementResult& placed, const EnergyModel& model,
                                        const SelectionOptions& options) {
  (void)model;
  SelectionProblem pb;
  for (const auto& rec : placed.log) {
    if (rec.skipped) continue;
    pb.p_relay.push_back(std::accumulate(rec.solution.p_neighbors.begin(), rec.solution.p_neighbors.end(), 0.0));
    const double forwarded = static_cast<double>(std::accumulate(rec.flows.begin(), rec.flows.end(), Rate{0}));
    pb.p_kept.push_back(rec.solution.p_critical * forwarded);
    pb.p_direct.push_back(rec.p_direct);
  }
  pb.tau_star = placed.lifetime;
  pb.omega1 = options.omega1;
  pb.omega2 = 1.0 - options.omega1;
  pb.eta = options.eta > 0.0 ? options.eta : default_eta(pb.p_relay);
  return pb;
}

SelectionResult select_relays(const SequentialPlacementResult& placed, const EnergyModel& model,
                              const SelectionOptions& options) {
  const SelectionProblem pb = make_selection_problem(placed, model, options);
  pb.validate();
  const std::vector<int> ids = deployed_relays(placed);
  const int m = static_cast<int>(ids.size());
  const Deployment& dep = placed.deployment;
  const double threshold = pb.tau_star * (1.0 - options.lifetime_tol);

  auto lifetime_of = [&](const std::vector<bool>& keep) {
    return network_lifetime(apply_selection(placed.rates, ids, keep), dep, model);
  };

  SelectionResult out;
  out.relay_ids = ids;
  out.tau_star = pb.tau_star;

  const bool exact = options.mode == SelectionMode::Exact ||
                     (options.mode == SelectionMode::Auto && m <= options.exact_limit);
  if (exact && m > 62) throw InvalidInput("exact selection limited to 62 relays");
  out.exact = exact;

  std::vector<double> lifetime_if_dropped(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    std::vector<bool> keep(static_cast<std::size_t>(m), true);
    keep[static_cast<std::size_t>(i)] = false;
    lifetime_if_dropped[static_cast<std::size_t>(i)] = lifetime_of(keep);
  }

  if (exact) {
    auto eval = [&](std::uint64_t mask) {
      SubsetScore s;
      s.mask = mask;
      s.kept = std::popcount(mask);
      s.objective = objective_of_mask(mask, pb);
      s.feasible = lifetime_of(keep_from_mask(mask, m)) >= threshold;
      return s;
    };
    const SubsetScore best =
        options.policy == ExecPolicy::Serial ? best_subset_serial(m, eval) : best_subset_parallel(m, eval);
    out.keep = keep_from_mask(best.mask, m);
    if (!best.feasible) {
      out.keep.assign(static_cast<std::size_t>(m), true);
      out.constraint_relaxed = true;
    }
  } else {
    // Least harmful removals first; a drop is kept only if the lifetime bound still holds and the
    // objective does not get worse.
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return lifetime_if_dropped[static_cast<std::size_t>(a)] > lifetime_if_dropped[static_cast<std::size_t>(b)];
    });
    out.keep.assign(static_cast<std::size_t>(m), true);
    double current = selection_objective(out.keep, pb);
    if (lifetime_of(out.keep) < threshold) out.constraint_relaxed = true;
    for (const int i : order) {
      if (out.constraint_relaxed) break;
      out.keep[static_cast<std::size_t>(i)] = false;
      const double obj = selection_objective(out.keep, pb);
      if (obj <= current && lifetime_of(out.keep) >= threshold)
        current = obj;
      else
        out.keep[static_cast<std::size_t>(i)] = true;
    }
  }

  out.objective = selection_objective(out.keep, pb);
  out.rates = apply_selection(placed.rates, ids, out.keep);
  out.min_lifetime = network_lifetime(out.rates, dep, model);
  for (int i = 0; i < m; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out.per_relay.push_back({ids[u], pb.p_relay[u], pb.p_direct[u], term_step(pb, u, out.keep[u]),
                             term_saving(pb, u, out.keep[u]), lifetime_if_dropped[u]});
  }
  return out;
}

}  // namespace uasn
