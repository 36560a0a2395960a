#include "uasn/routing.hpp"

#include "uasn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

namespace uasn {

std::string to_string(RoutingPolicy p) {
  return p == RoutingPolicy::MinEnergyPath ? "min_energy" : "multipath";
}

RoutingPolicy routing_policy_from_string(const std::string& s) {
  if (s == "min_energy") return RoutingPolicy::MinEnergyPath;
  if (s == "multipath") return RoutingPolicy::MultiPath;
  throw InvalidInput("unknown routing policy '" + s + "'");
}

RouteGraph::RouteGraph(const Deployment& dep, const EnergyModel& model)
    : adjacency_(static_cast<std::size_t>(dep.size())), sink_(dep.sink()) {
  for (int i = 0; i < dep.size(); ++i) {
    for (int j = i + 1; j < dep.size(); ++j) {
      const double d = dep.distance(i, j);
      if (d > dep.comm_range()) continue;
      const double cost = model.transmit_power(d);
      adjacency_[static_cast<std::size_t>(i)].push_back({j, cost});
      adjacency_[static_cast<std::size_t>(j)].push_back({i, cost});
    }
  }
  const auto tree = sink_tree();
  for (const auto& n : dep.nodes())
    if (n.kind == NodeKind::Sensor && !std::isfinite(tree.cost[static_cast<std::size_t>(n.id)]))
      throw InfeasibleError("sensor " + std::to_string(n.id) + " has no route to the buoy", n.id);
}

RouteGraph::SinkTree RouteGraph::sink_tree(const std::vector<char>& blocked) const {
  const auto n = adjacency_.size();
  SinkTree t{std::vector<double>(n, kInfiniteLifetime), std::vector<int>(n, -1), std::vector<int>(n, -1)};
  using Label = std::tuple<double, int, int, int>;  // cost, hops, next hop, node
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  std::vector<char> done(n, 0);
  t.cost[static_cast<std::size_t>(sink_)] = 0.0;
  t.hops[static_cast<std::size_t>(sink_)] = 0;
  heap.emplace(0.0, 0, -1, sink_);
  while (!heap.empty()) {
    const auto [cost, hops, next, u] = heap.top();
    heap.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (done[ui]) continue;
    done[ui] = 1;
    if (u != sink_ && !blocked.empty() && blocked[ui]) continue;  // reachable, but relays nothing
    for (const auto& e : adjacency_[ui]) {
      const auto vi = static_cast<std::size_t>(e.to);
      if (done[vi] || e.to == sink_) continue;
      const Label cand{cost + e.cost, hops + 1, u, e.to};
      const Label cur{t.cost[vi], t.hops[vi], t.next[vi], e.to};
      if (cand < cur) {
        t.cost[vi] = cost + e.cost;
        t.hops[vi] = hops + 1;
        t.next[vi] = u;
        heap.push(cand);
      }
    }
  }
  return t;
}

namespace {

std::vector<int> path_to_sink(const RouteGraph::SinkTree& tree, int source) {
  std::vector<int> path{source};
  while (tree.next[static_cast<std::size_t>(path.back())] >= 0) path.push_back(tree.next[static_cast<std::size_t>(path.back())]);
  return path;
}

RateArray route_min_energy(const Deployment& dep, const EnergyModel& model, const RouteGraph& graph) {
  const auto tree = graph.sink_tree();
  RateArray rates(dep.size());
  std::vector<Rate> load(static_cast<std::size_t>(dep.size()), 0);  // row sums so far
  const Rate cap = model.link_capacity();

  for (const int s : dep.ids_of(NodeKind::Sensor)) {
    const Rate g = dep.node(s).generation_rate;
    if (g == 0) continue;
    auto path = path_to_sink(tree, s);
    auto saturated = std::find_if(path.begin(), path.end() - 1,
                                  [&](int v) { return load[static_cast<std::size_t>(v)] + g > cap; });
    if (saturated != path.end() - 1) {
      const int first_saturated = *saturated;
      if (first_saturated == s)
        throw InfeasibleError("link capacity exceeded at node " + std::to_string(s), s);
      // Divert this source around every node lacking room for g.
      std::vector<char> blocked(static_cast<std::size_t>(dep.size()), 0);
      for (int v = 0; v < dep.size(); ++v)
        if (v != dep.sink() && load[static_cast<std::size_t>(v)] + g > cap) blocked[static_cast<std::size_t>(v)] = 1;
      const auto detour = graph.sink_tree(blocked);
      if (!std::isfinite(detour.cost[static_cast<std::size_t>(s)]))
        throw InfeasibleError("link capacity exceeded at node " + std::to_string(first_saturated), first_saturated);
      path = path_to_sink(detour, s);
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      rates(path[k], path[k + 1]) += g;
      load[static_cast<std::size_t>(path[k])] += g;
    }
  }
  return rates;
}

RateArray route_multipath(const Deployment& dep, const EnergyModel& model, const RouteGraph& graph, double slack) {
  const auto tree = graph.sink_tree();
  const auto n = static_cast<std::size_t>(dep.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Upstream first: traffic only ever moves to strictly cheaper nodes, so this is a topological order.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return tree.cost[a] > tree.cost[b]; });

  RateArray rates(dep.size());
  std::vector<Rate> inflow(n, 0);
  for (const int i : order) {
    const auto ii = static_cast<std::size_t>(i);
    if (i == dep.sink() || !std::isfinite(tree.cost[ii])) continue;
    const Rate total = inflow[ii] + dep.node(i).generation_rate;
    if (total == 0) continue;
    if (total > model.link_capacity())
      throw InfeasibleError("link capacity exceeded at node " + std::to_string(i), i);

    struct Share {
      int to;
      double weight;
    };
    std::vector<Share> shares;
    for (const auto& e : graph.edges(i)) {
      const double via = e.cost + tree.cost[static_cast<std::size_t>(e.to)];
      if (tree.cost[static_cast<std::size_t>(e.to)] < tree.cost[ii] && via <= (1.0 + slack) * tree.cost[ii])
        shares.push_back({e.to, 1.0 / via});
    }
    std::sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) { return a.to < b.to; });
    const double wsum = std::accumulate(shares.begin(), shares.end(), 0.0,
                                        [](double acc, const Share& s) { return acc + s.weight; });

    // Largest-remainder rounding keeps the split integral and exact.
    std::vector<Rate> alloc(shares.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    Rate assigned = 0;
    for (std::size_t k = 0; k < shares.size(); ++k) {
      const double exact = static_cast<double>(total) * shares[k].weight / wsum;
      alloc[k] = static_cast<Rate>(std::floor(exact));
      assigned += alloc[k];
      remainders.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++alloc[remainders[k % remainders.size()].second];

    for (std::size_t k = 0; k < shares.size(); ++k) {
      if (alloc[k] == 0) continue;
      rates(i, shares[k].to) = alloc[k];
      inflow[static_cast<std::size_t>(shares[k].to)] += alloc[k];
    }
  }
  return rates;
}

}  // namespace

RateArray build_initial_rate_array(const Deployment& dep, const EnergyModel& model, const RoutingOptions& options) {
  const RouteGraph graph(dep, model);
  if (options.policy == RoutingPolicy::MultiPath) return route_multipath(dep, model, graph, options.split_slack);
  return route_min_energy(dep, model, graph);
}

UpperNeighborSet upper_neighbors(int c, const RateArray& rates) {
  if (c < 0 || c >= rates.size()) throw InvalidInput("node id out of range");
  UpperNeighborSet set{c, {}};
  for (int j = 0; j < rates.size(); ++j)
    if (rates(c, j) > 0) set.neighbors.push_back(j);
  return set;
}

RateArray reroute_through_relay(const RateArray& rates, const Deployment& dep, int c, int r,
                                const UpperNeighborSet& upper) {
  if (rates.size() != dep.size()) throw InvalidInput("rate array size mismatch");
  if (upper.neighbors.empty()) return rates;
  if (!rates.idle(r)) throw InvalidInput("relay " + std::to_string(r) + " already carries flow");
  if (!dep.in_range(c, r)) throw RangeError("relay out of range of critical node " + std::to_string(c));
  for (const int j : upper.neighbors)
    if (!dep.in_range(r, j)) throw RangeError("relay out of range of upper neighbour " + std::to_string(j));

  RateArray out = rates;
  Rate forwarded = 0;
  for (const int j : upper.neighbors) {
    forwarded += rates(c, j);
    out(r, j) = rates(c, j);
    out(c, j) = 0;
  }
  out(c, r) = forwarded;
  return out;
}

RateArray revert_relay(const RateArray& rates, int r) {
  if (rates.idle(r)) return rates;
  int pred = -1;
  for (int k = 0; k < rates.size(); ++k) {
    if (rates(k, r) == 0) continue;
    if (pred >= 0) throw InvalidInput("relay " + std::to_string(r) + " has several predecessors");
    pred = k;
  }
  if (pred < 0) throw InvalidInput("relay " + std::to_string(r) + " has no predecessor");
  RateArray out = rates;
  for (int j = 0; j < rates.size(); ++j) {
    out(pred, j) += rates(r, j);
    out(r, j) = 0;
  }
  out(pred, r) = 0;
  return out;
}

double routing_cost(const RateArray& rates, const Deployment& dep, const EnergyModel& model) {
  double cost = 0.0;
  for (int i = 0; i < dep.size(); ++i)
    for (int j = 0; j < dep.size(); ++j)
      if (rates(i, j) > 0) cost += model.transmit_power(dep.distance(i, j)) * static_cast<double>(rates(i, j));
  return cost;
}

}  // namespace uasn
