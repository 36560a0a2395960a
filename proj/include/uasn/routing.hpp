#pragma once

#include "uasn/model.hpp"

#include <vector>

namespace uasn {

enum class RoutingPolicy {
  MinEnergyPath,  // every source follows its cheapest path to the buoy
  MultiPath,      // each node splits its traffic over near-cheapest downstream neighbours
};

std::string to_string(RoutingPolicy p);
RoutingPolicy routing_policy_from_string(const std::string& s);

struct RoutingOptions {
  RoutingPolicy policy = RoutingPolicy::MinEnergyPath;
  // MultiPath: a neighbour j is used when p_ij + cost(j) <= (1 + split_slack) * cost(i).
  double split_slack = 1.0;
};

/// Links no longer than the communication range, weighted by per-bit transmit power.
class RouteGraph {
 public:
  struct Edge {
    int to;
    double cost;  // mW/bit
  };

  /// Shortest-path labels towards the buoy. next[sink] == -1; unreachable nodes have cost +inf.
  struct SinkTree {
    std::vector<double> cost;
    std::vector<int> hops;
    std::vector<int> next;
  };

  /// Throws InfeasibleError when some sensor cannot reach the buoy.
  RouteGraph(const Deployment& dep, const EnergyModel& model);

  int size() const { return static_cast<int>(adjacency_.size()); }
  int sink() const { return sink_; }
  const std::vector<Edge>& edges(int u) const { return adjacency_[static_cast<std::size_t>(u)]; }

  /// Dijkstra from the buoy. Ties go to fewer hops, then the lower next-hop id.
  /// Nodes flagged in `blocked` never relay traffic (they may still be path endpoints).
  SinkTree sink_tree(const std::vector<char>& blocked = {}) const;

 private:
  std::vector<std::vector<Edge>> adjacency_;
  int sink_;
};

/// Deterministic rate array routing every sensor's traffic to the buoy.
/// Throws InfeasibleError naming the saturated node when link capacity cannot be met.
RateArray build_initial_rate_array(const Deployment& dep, const EnergyModel& model,
                                   const RoutingOptions& options = {});

struct UpperNeighborSet {
  int critical = -1;
  std::vector<int> neighbors;  // ascending ids j with R[c][j] > 0
};

UpperNeighborSet upper_neighbors(int c, const RateArray& rates);

/// Inserts idle relay r between c and all of its upper neighbours:
/// R'[c][r] = sum_j R[c][j], R'[r][j] = R[c][j], R'[c][j] = 0.
/// Throws InvalidInput if r already carries flow and RangeError if a new link exceeds the range.
RateArray reroute_through_relay(const RateArray& rates, const Deployment& dep, int c, int r,
                                const UpperNeighborSet& upper);

/// Inverse of reroute_through_relay: hands r's outgoing flows back to its unique predecessor.
RateArray revert_relay(const RateArray& rates, int r);

/// Sum over links of per-bit power times rate (mW).
double routing_cost(const RateArray& rates, const Deployment& dep, const EnergyModel& model);

}  // namespace uasn
