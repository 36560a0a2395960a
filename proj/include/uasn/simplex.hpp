#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace uasn {

/// Euclidean projection onto {x : x >= 0, sum x = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Vertex e_i of the simplex in R^m.
Eigen::VectorXd simplex_vertex(int m, int i);

/// Number of points of the barycentric grid with spacing 1/k in m coordinates: C(k+m-1, m-1).
std::uint64_t barycentric_grid_size(int m, int k);

/// Calls f(counts) for every composition of k into m nonnegative parts whose first part is `first`,
/// in lexicographic order. counts[0] == first.
template <class F>
void for_each_composition_with_first(int m, int k, int first, F&& f) {
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  counts[0] = first;
  if (m == 1) {
    if (first == k) f(counts);
    return;
  }
  const int rest = k - first;
  if (rest < 0) return;
  // Odometer over parts 1..m-1 that sum to `rest`, lexicographically decreasing in part 1.
  counts[1] = rest;
  while (true) {
    f(counts);
    // Find the rightmost position p in [1, m-2] with counts[p] > 0 to move one unit to the right.
    int p = m - 2;
    while (p >= 1 && counts[static_cast<std::size_t>(p)] == 0) --p;
    if (p < 1) break;
    const int tail = counts[static_cast<std::size_t>(m - 1)];
    counts[static_cast<std::size_t>(m - 1)] = 0;
    --counts[static_cast<std::size_t>(p)];
    counts[static_cast<std::size_t>(p + 1)] = tail + 1;
  }
}

template <class F>
void for_each_composition(int m, int k, F&& f) {
  for (int first = k; first >= 0; --first) for_each_composition_with_first(m, k, first, f);
}

}  // namespace uasn
