#pragma once

// Data-parallel kernels. Each has a serial reference; the parallel versions must agree exactly.

#include "uasn/parallel.hpp"
#include "uasn/placement.hpp"

#include <Eigen/Core>

#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

namespace uasn {

struct GridCandidate {
  bool found = false;
  double p_critical = std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;  // position in lexicographic enumeration order
  Eigen::VectorXd theta;
};

/// Best feasible point of the barycentric grid with spacing 1/k (lowest p_cr, then lowest index).
GridCandidate grid_search_serial(const PlacementProblem& prob, int k, const Tolerances& tol);
GridCandidate grid_search_parallel(const PlacementProblem& prob, int k, const Tolerances& tol);

/// Score of one keep-mask in relay selection. Bit i of mask is keep[i].
struct SubsetScore {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  int kept = 0;
  std::uint64_t mask = 0;
};

/// Total order used to pick the selection: feasible, lower objective, fewer kept relays,
/// then lexicographically smaller keep vector.
inline bool better_subset(const SubsetScore& a, const SubsetScore& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.objective != b.objective) return a.objective < b.objective;
  if (a.kept != b.kept) return a.kept < b.kept;
  if (a.mask == b.mask) return false;
  const std::uint64_t first_diff = std::countr_zero(a.mask ^ b.mask);
  return ((a.mask >> first_diff) & 1u) == 0u;
}

/// Exhaustive search over all 2^m0 keep-masks; eval(mask) -> SubsetScore.
template <class Eval>
SubsetScore best_subset_serial(int m0, Eval&& eval) {
  SubsetScore best;
  best.mask = m0 > 0 ? (std::uint64_t{1} << m0) - 1 : 0;
  best.feasible = false;
  bool have = false;
  const std::uint64_t total = std::uint64_t{1} << m0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const SubsetScore s = eval(mask);
    if (!have || better_subset(s, best)) best = s, have = true;
  }
  return best;
}

template <class Eval>
SubsetScore best_subset_parallel(int m0, Eval&& eval) {
  const std::int64_t total = std::int64_t{1} << m0;
  // One partial result per chunk, reduced in chunk order; the order is total so the result
  // matches the serial scan.
  const std::int64_t chunks = std::min<std::int64_t>(total, 256);
  std::vector<SubsetScore> partial(static_cast<std::size_t>(chunks));
  std::vector<char> have(static_cast<std::size_t>(chunks), 0);
  parallel_for(ExecPolicy::Parallel, 0, chunks, [&](std::int64_t c) {
    const std::int64_t lo = total * c / chunks;
    const std::int64_t hi = total * (c + 1) / chunks;
    for (std::int64_t mask = lo; mask < hi; ++mask) {
      const SubsetScore s = eval(static_cast<std::uint64_t>(mask));
      auto& slot = partial[static_cast<std::size_t>(c)];
      if (!have[static_cast<std::size_t>(c)] || better_subset(s, slot)) slot = s, have[static_cast<std::size_t>(c)] = 1;
    }
  });
  SubsetScore best = partial.front();
  for (std::size_t c = 1; c < partial.size(); ++c)
    if (have[c] && better_subset(partial[c], best)) best = partial[c];
  return best;
}

}  // namespace uasn
