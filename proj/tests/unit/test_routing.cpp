#include "fixtures.hpp"
#include "uasn/errors.hpp"
#include "uasn/routing.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace uasn;
using namespace uasn::testing;

namespace {

// Cheapest simple path cost from s to the buoy by exhaustive DFS.
double brute_force_cost(const Deployment& dep, const EnergyModel& m, int s) {
  std::vector<char> on_path(static_cast<std::size_t>(dep.size()), 0);
  double best = kInfiniteLifetime;
  std::function<void(int, double)> dfs = [&](int u, double cost) {
    if (u == dep.sink()) {
      best = std::min(best, cost);
      return;
    }
    on_path[static_cast<std::size_t>(u)] = 1;
    for (int v = 0; v < dep.size(); ++v)
      if (!on_path[static_cast<std::size_t>(v)] && v != u && dep.in_range(u, v))
        dfs(v, cost + m.transmit_power(dep.distance(u, v)));
    on_path[static_cast<std::size_t>(u)] = 0;
  };
  dfs(s, 0.0);
  return best;
}

}  // namespace

TEST_CASE("single sensor in range of the buoy") {
  const EnergyModel m;
  const auto dep = make_deployment({buoy(), sensor(1, {0, 0, -300}, 42)});
  const auto r = build_initial_rate_array(dep, m);
  CHECK(r(1, 0) == 42);
  CHECK(r.row_sum(0) == 0);
}

TEST_CASE("chain is forced") {
  const EnergyModel m;
  const auto dep = make_deployment({buoy(), sensor(1, {0, 0, -400}, 30), sensor(2, {0, 0, -800}, 70)});
  for (const auto policy : {RoutingPolicy::MinEnergyPath, RoutingPolicy::MultiPath}) {
    const auto r = build_initial_rate_array(dep, m, {policy, 1.0});
    CHECK(r(2, 1) == 70);
    CHECK(r(1, 0) == 100);
    CHECK(r(2, 0) == 0);
    CHECK(validate_rate_array(r, dep, m).empty());
  }
}

TEST_CASE("star around one forwarder") {
  const EnergyModel m;
  const auto dep = make_deployment({buoy(), sensor(1, {0, 0, -450}, 10), sensor(2, {300, 0, -800}, 20),
                                    sensor(3, {-300, 0, -800}, 30), sensor(4, {0, 300, -800}, 40)});
  const auto r = build_initial_rate_array(dep, m);
  CHECK(r.row_sum(1) == 100);
  CHECK(r(1, 0) == 100);
  double expected = 0.0;
  for (const int s : dep.ids_of(NodeKind::Sensor))
    expected += static_cast<double>(dep.node(s).generation_rate) * brute_force_cost(dep, m, s);
  CHECK(routing_cost(r, dep, m) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("min-energy routing matches exhaustive path enumeration") {
  const EnergyModel m;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<Rate> g(10, 200);
  int checked = 0;
  while (checked < 200) {
    std::vector<Node> nodes{buoy()};
    for (int i = 1; i <= 5; ++i) nodes.push_back(sensor(i, {300 * u(rng), 300 * u(rng), -900 * u(rng)}, g(rng)));
    const auto dep = make_deployment(nodes);
    if (!dep.connected()) continue;
    const auto r = build_initial_rate_array(dep, m);
    CHECK(validate_rate_array(r, dep, m).empty());
    double expected = 0.0;
    for (const int s : dep.ids_of(NodeKind::Sensor))
      expected += static_cast<double>(dep.node(s).generation_rate) * brute_force_cost(dep, m, s);
    CHECK(routing_cost(r, dep, m) == doctest::Approx(expected).epsilon(1e-10));
    ++checked;
  }
}

TEST_CASE("routing errors") {
  const EnergyModel m;
  SUBCASE("disconnected") {
    const auto dep = make_deployment({buoy(), sensor(1, {0, 0, -400}, 10), sensor(2, {0, 0, -1200}, 10)});
    CHECK_THROWS_AS(build_initial_rate_array(dep, m), InfeasibleError);
  }
  SUBCASE("capacity exhausted") {
    EnergyParams p;
    p.l_c_bps = 150;
    const EnergyModel small(p);
    const auto dep = make_deployment({buoy(), sensor(1, {0, 0, -400}, 100), sensor(2, {0, 0, -800}, 100)});
    try {
      build_initial_rate_array(dep, small);
      FAIL("expected infeasibility");
    } catch (const InfeasibleError& e) {
      CHECK(e.node() == 1);
    }
  }
  SUBCASE("capacity diverts to the next cheapest path") {
    EnergyParams p;
    p.l_c_bps = 150;
    const EnergyModel small(p);
    // sensor 3 prefers forwarder 1 but 1 is nearly full; 2 is the detour
    const auto dep = make_deployment({buoy(), sensor(1, {0, 0, -300}, 100), sensor(2, {100, 0, -320}, 10),
                                      sensor(3, {40, 0, -600}, 60)});
    const auto r = build_initial_rate_array(dep, small);
    CHECK(validate_rate_array(r, dep, small).empty());
    CHECK(r.row_sum(1) <= 150);
  }
}

TEST_CASE("multipath routing splits and stays valid") {
  const EnergyModel m;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int split = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Node> nodes{buoy()};
    for (int i = 1; i <= 15; ++i) nodes.push_back(sensor(i, {400 * u(rng) - 200, 400 * u(rng) - 200, -1000 * u(rng)}, 50));
    const auto dep = make_deployment(nodes);
    if (!dep.connected()) continue;
    const auto r = build_initial_rate_array(dep, m, {RoutingPolicy::MultiPath, 1.0});
    CHECK(validate_rate_array(r, dep, m).empty());
    CHECK(r.col_sum(0) == 15 * 50);
    for (int i = 1; i < dep.size(); ++i) split += upper_neighbors(i, r).neighbors.size() > 1;
    CHECK(build_initial_rate_array(dep, m, {RoutingPolicy::MultiPath, 1.0}) == r);
  }
  CHECK(split > 0);
}

TEST_CASE("upper neighbours") {
  RateArray r(4);
  CHECK(upper_neighbors(1, r).neighbors.empty());
  r(1, 3) = 5;
  r(1, 2) = 7;
  CHECK(upper_neighbors(1, r).neighbors == std::vector<int>{2, 3});
  CHECK_THROWS_AS(upper_neighbors(4, r), InvalidInput);
}

TEST_CASE("reroute and revert") {
  const EnergyModel m;
  // c = 1 sends 5 to sensor 2 and 7 to the buoy; relay 3 sits between them
  auto dep = make_deployment({buoy(), sensor(1, {0, 0, -400}, 12), sensor(2, {100, 0, -200}, 0)});
  RateArray r(3);
  r(1, 2) = 5;
  r(2, 0) = 5;
  r(1, 0) = 7;
  REQUIRE(validate_rate_array(r, dep, m).empty());
  const auto upper = upper_neighbors(1, r);
  dep = dep.with_relay({20, 0, -250}, kEps);
  const auto before = r.resized(4);
  const auto after = reroute_through_relay(before, dep, 1, 3, upper);
  CHECK(after(1, 3) == 12);
  CHECK(after(3, 0) == 7);
  CHECK(after(3, 2) == 5);
  CHECK(after(1, 0) == 0);
  CHECK(after(1, 2) == 0);
  CHECK(after.row_sum(3) == after.col_sum(3));
  CHECK(after.col_sum(0) == before.col_sum(0));
  CHECK(validate_rate_array(after, dep, m).empty());

  CHECK_THROWS_AS(reroute_through_relay(after, dep, 1, 3, upper_neighbors(1, after)), InvalidInput);
  CHECK(reroute_through_relay(before, dep, 1, 3, UpperNeighborSet{1, {}}) == before);

  const auto back = revert_relay(after, 3);
  CHECK(back == before);
  CHECK(validate_rate_array(back, dep, m).empty());

  SUBCASE("out of range") {
    const auto far = make_deployment({buoy(), sensor(1, {0, 0, -400}, 12), sensor(2, {100, 0, -200}, 0)})
                         .with_relay({0, 0, -1000}, kEps);
    CHECK_THROWS_AS(reroute_through_relay(before, far, 1, 3, upper), RangeError);
  }
}

TEST_CASE("reverting nested relays is order independent") {
  const EnergyModel m;
  auto dep = make_deployment({buoy(), sensor(1, {0, 0, -450}, 100)});
  RateArray r(2);
  r(1, 0) = 100;
  dep = dep.with_relay({0, 0, -200}, kEps);
  auto r1 = reroute_through_relay(r.resized(3), dep, 1, 2, upper_neighbors(1, r.resized(3)));
  dep = dep.with_relay({0, 0, -350}, kEps);
  auto r2 = reroute_through_relay(r1.resized(4), dep, 1, 3, upper_neighbors(1, r1.resized(4)));
  CHECK(validate_rate_array(r2, dep, m).empty());
  const auto a = revert_relay(revert_relay(r2, 2), 3);
  const auto b = revert_relay(revert_relay(r2, 3), 2);
  CHECK(a == b);
  CHECK(a == r.resized(4));
}
