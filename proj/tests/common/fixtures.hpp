#pragma once

#include "uasn/model.hpp"

#include <vector>

namespace uasn::testing {

inline constexpr double kEps = 4e5;

inline Node buoy() { return Node{0, NodeKind::SurfaceBuoy, Vec3::Zero(), 0.0, 0.0, 0}; }

inline Node sensor(int id, Vec3 p, Rate g, double energy = kEps) {
  return Node{id, NodeKind::Sensor, p, energy, kEps, g};
}

inline Node relay(int id, Vec3 p, double energy = kEps) { return Node{id, NodeKind::Relay, p, energy, kEps, 0}; }

inline Deployment make_deployment(std::vector<Node> nodes, double range = 500.0) {
  return Deployment(std::move(nodes), range, Field{500.0, 2000.0});
}

}  // namespace uasn::testing
