#include "uasn/kernels.hpp"

#include "uasn/simplex.hpp"

namespace uasn {

namespace {

struct Block {
  int first;
  std::uint64_t offset;
};

// Blocks of compositions sharing the first part, in enumeration order (first = k down to 0).
std::vector<Block> grid_blocks(int m, int k) {
  std::vector<Block> blocks;
  std::uint64_t offset = 0;
  for (int first = k; first >= 0; --first) {
    blocks.push_back({first, offset});
    offset += m == 1 ? (first == k ? 1 : 0) : barycentric_grid_size(m - 1, k - first);
  }
  return blocks;
}

void scan_block(const PlacementProblem& prob, int k, const Tolerances& tol, const Block& block, GridCandidate& best) {
  const int m = prob.num_anchors();
  Eigen::VectorXd theta(m);
  std::uint64_t index = block.offset;
  for_each_composition_with_first(m, k, block.first, [&](const std::vector<int>& counts) {
    for (int i = 0; i < m; ++i) theta(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / k;
    const auto e = evaluate_placement(prob, theta, tol);
    if (e.feasible && (!best.found || e.p_critical < best.p_critical)) {
      best.found = true;
      best.p_critical = e.p_critical;
      best.index = index;
      best.theta = theta;
    }
    ++index;
  });
}

bool better(const GridCandidate& a, const GridCandidate& b) {
  if (a.found != b.found) return a.found;
  if (a.p_critical != b.p_critical) return a.p_critical < b.p_critical;
  return a.index < b.index;
}

}  // namespace

GridCandidate grid_search_serial(const PlacementProblem& prob, int k, const Tolerances& tol) {
  GridCandidate best;
  for (const auto& block : grid_blocks(prob.num_anchors(), k)) scan_block(prob, k, tol, block, best);
  return best;
}

GridCandidate grid_search_parallel(const PlacementProblem& prob, int k, const Tolerances& tol) {
  const auto blocks = grid_blocks(prob.num_anchors(), k);
  std::vector<GridCandidate> partial(blocks.size());
  parallel_for(ExecPolicy::Parallel, 0, static_cast<std::int64_t>(blocks.size()), [&](std::int64_t b) {
    scan_block(prob, k, tol, blocks[static_cast<std::size_t>(b)], partial[static_cast<std::size_t>(b)]);
  });
  GridCandidate best;
  for (const auto& p : partial)
    if (better(p, best)) best = p;
  return best;
}

}  // namespace uasn
