#pragma once

#include "uasn/placement.hpp"

#include <random>

namespace uasn::testing {

// Random placement instance: critical node and `neighbors` upper neighbours, all within range of c.
inline PlacementProblem random_problem(std::mt19937_64& rng, int neighbors, const EnergyModel& model = EnergyModel()) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> flow(10, 400);
  PlacementProblem p;
  p.critical = 1;
  p.model = model;
  p.comm_range = 500.0;
  p.anchors.resize(3, neighbors + 1);
  const Vec3 c(200 * u(rng) - 100, 200 * u(rng) - 100, -600 - 800 * u(rng));
  p.anchors.col(0) = c;
  for (int k = 1; k <= neighbors; ++k) {
    Vec3 dir;
    do {
      dir = Vec3(2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1);
    } while (dir.norm() > 1.0 || dir.norm() < 0.1);
    p.anchors.col(k) = c + dir.normalized() * (60.0 + 420.0 * u(rng));
    p.neighbors.push_back(k + 1);
    p.flows.push_back(flow(rng));
    p.forwarded += p.flows.back();
  }
  p.incoming = std::max(0.0, p.forwarded - flow(rng));
  p.eps_critical = u(rng) < 0.5 ? 1e5 : 4e5;
  p.eps_relay = 4e5;
  return p;
}

}  // namespace uasn::testing
