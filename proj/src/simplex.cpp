#include "uasn/simplex.hpp"

#include <algorithm>
#include <functional>

namespace uasn {

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += u[static_cast<std::size_t>(i)];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) shift = t;
  }
  return (v.array() - shift).cwiseMax(0.0).matrix();
}

Eigen::VectorXd simplex_vertex(int m, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  e(i) = 1.0;
  return e;
}

std::uint64_t barycentric_grid_size(int m, int k) {
  // C(k + m - 1, m - 1) computed incrementally; exact while it fits.
  std::uint64_t result = 1;
  for (int i = 1; i < m; ++i) result = result * static_cast<std::uint64_t>(k + i) / static_cast<std::uint64_t>(i);
  return result;
}

}  // namespace uasn
