#include "fixtures.hpp"
#include "uasn/errors.hpp"
#include "uasn/harness.hpp"
#include "uasn/io.hpp"

#include <doctest.h>

#include <sstream>

using namespace uasn;
using namespace uasn::testing;

TEST_CASE("iec") {
  SUBCASE("hand computed") {
    // node means 2, 4, 6 over two runs; grand mean 4; squared deviations 4, 0, 4
    const std::vector<std::vector<double>> runs{{1, 5, 6}, {3, 3, 6}};
    CHECK(compute_iec(runs, 1.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(compute_iec(runs, 4.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("uniform energies") { CHECK(compute_iec({{7, 7, 7}, {3, 3, 3}}, 1.0) == 0.0); }
  SUBCASE("quadratic in scale") {
    const std::vector<std::vector<double>> a{{1, 2, 9}, {4, 0, 1}};
    std::vector<std::vector<double>> b = a;
    for (auto& r : b)
      for (auto& x : r) x *= 3.0;
    CHECK(compute_iec(b, 1.0) == doctest::Approx(9.0 * compute_iec(a, 1.0)).epsilon(1e-14));
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(compute_iec({}, 1.0), InvalidInput);
    CHECK_THROWS_AS(compute_iec({{1, 2}, {1}}, 1.0), InvalidInput);
    CHECK_THROWS_AS(compute_iec({{1}}, 0.0), DomainError);
  }
}

TEST_CASE("cases and methods") {
  CHECK(case_spec("A").rf == 0.25);
  CHECK(case_spec("B").rf == 0.75);
  CHECK(case_spec("D").gamma_r == 0.9);
  CHECK_THROWS_AS(case_spec("E"), InvalidInput);
  for (const auto m : {Method::ORNS, Method::RA, Method::LSRNP, Method::NoRelay})
    CHECK(method_from_string(to_string(m)) == m);
  Scenario s;
  s.spec = case_spec("C");
  s.n = 45;
  CHECK(s.relay_budget() == 27);
}

TEST_CASE("instance generation") {
  const Config cfg;
  const auto a = generate_instance(30, cfg, 42, 0.25);
  const auto b = generate_instance(30, cfg, 42, 0.25);
  REQUIRE(a.deployment.size() == 31);
  for (int i = 0; i < a.deployment.size(); ++i) CHECK(a.deployment.node(i).position == b.deployment.node(i).position);
  CHECK(a.rates == b.rates);
  CHECK(a.deployment.connected());
  CHECK(validate_rate_array(a.rates, a.deployment, cfg.model()).empty());
  CHECK(a.deployment.node(a.critical).residual_energy == 1e5);
  for (int i = 1; i <= 30; ++i) {
    const auto& n = a.deployment.node(i);
    CHECK(n.position.head<2>().norm() <= cfg.r_s);
    CHECK(n.position.z() <= 0.0);
    CHECK(n.position.z() >= -cfg.h_s);
    CHECK(n.generation_rate >= cfg.g_min);
    CHECK(n.generation_rate <= cfg.g_max);
    if (i != a.critical) CHECK(n.residual_energy == cfg.eps_p);
  }
  const auto c = generate_instance(30, cfg, 43, 0.25);
  CHECK(c.deployment.node(1).position != a.deployment.node(1).position);
  CHECK_THROWS_AS(generate_instance(0, cfg, 1, 0.25), InvalidInput);
  CHECK_THROWS_AS(generate_instance(5, cfg, 1, 0.0), InvalidInput);
}

TEST_CASE("residual energies") {
  const EnergyModel m;
  const auto dep = make_deployment({buoy(), sensor(1, {0, 0, -300}, 100)});
  RateArray r(2);
  r(1, 0) = 100;
  const double draw = m.transmit_power(300.0) * 100e-3;
  const auto res = residual_energies(dep, r, m, 1e-4);
  REQUIRE(res.size() == 1);
  CHECK(res[0] == doctest::Approx(kEps - 1e-4 * draw).epsilon(1e-14));
  CHECK(residual_energies(dep, r, m, 1e6)[0] == 0.0);
}

TEST_CASE("experiment") {
  Config cfg;
  Scenario s;
  s.spec = case_spec("A");
  s.n = 15;
  s.seeds = seed_range(1, 4);
  s.method = Method::ORNS;
  s.selection = true;
  const auto par = run_experiment(s, cfg, ExecPolicy::Parallel);
  const auto ser = run_experiment(s, cfg, ExecPolicy::Serial);
  CHECK(par.failed_seeds.empty());
  CHECK(par.mean_lifetime == ser.mean_lifetime);
  CHECK(par.iec == ser.iec);
  CHECK(par.mean_kept == ser.mean_kept);
  for (std::size_t i = 0; i < par.outcomes.size(); ++i) {
    CHECK(par.outcomes[i].lifetime == ser.outcomes[i].lifetime);
    CHECK(par.outcomes[i].residual == ser.outcomes[i].residual);
    CHECK(par.outcomes[i].lifetime >= par.outcomes[i].initial_lifetime * (1.0 - 1e-9));
    CHECK(par.outcomes[i].relays_kept <= par.outcomes[i].relays_placed);
  }

  SUBCASE("single sensor without relays") {
    Scenario one;
    one.spec = case_spec("A");
    one.n = 1;
    one.seeds = {9};
    one.method = Method::NoRelay;
    const auto rep = run_experiment(one, cfg);
    const auto inst = generate_instance(1, cfg, 9, 0.25);
    const auto& n1 = inst.deployment.node(1);
    const double d = n1.position.norm();
    const double expected = 0.25 * cfg.eps_p / (cfg.model().transmit_power(d) * 1e-3 * static_cast<double>(n1.generation_rate));
    REQUIRE(rep.outcomes.size() == 1);
    CHECK(rep.outcomes[0].lifetime == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rep.iec == 0.0);
    CHECK(rep.stddev_lifetime == 0.0);
  }
}

TEST_CASE("serialisation round trips") {
  const Config cfg;
  const auto inst = generate_instance(12, cfg, 5, 0.25);

  SUBCASE("deployment") {
    const auto back = deployment_from_json(deployment_to_json(inst.deployment));
    REQUIRE(back.size() == inst.deployment.size());
    for (int i = 0; i < back.size(); ++i) {
      CHECK(back.node(i).position == inst.deployment.node(i).position);
      CHECK(back.node(i).residual_energy == inst.deployment.node(i).residual_energy);
      CHECK(back.node(i).generation_rate == inst.deployment.node(i).generation_rate);
      CHECK(back.node(i).kind == inst.deployment.node(i).kind);
    }
    CHECK(back.comm_range() == inst.deployment.comm_range());
  }
  SUBCASE("rates") {
    std::stringstream ss;
    write_rate_csv(ss, inst.rates);
    CHECK(read_rate_csv(ss) == inst.rates);
    std::stringstream bad("src,0\n0,x\n");
    CHECK_THROWS_AS(read_rate_csv(bad), InvalidInput);
  }
  SUBCASE("config") {
    Config c;
    c.omega1 = 0.7;
    c.routing.policy = RoutingPolicy::MinEnergyPath;
    c.snapshot_at_initial_lifetime = false;
    c.energy.f_khz = 5.0;
    const auto j = config_to_json(c);
    const auto back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    auto extra = j;
    extra["nonsense"] = 1;
    CHECK_THROWS_AS(config_from_json(extra), InvalidInput);
  }
  SUBCASE("metrics") {
    Scenario s;
    s.spec = case_spec("B");
    s.n = 10;
    s.seeds = seed_range(3, 2);
    s.method = Method::LSRNP;
    const auto rep = run_experiment(s, cfg);
    const auto j = metrics_to_json(rep);
    CHECK(metrics_to_json(metrics_from_json(j)) == j);
  }
}
