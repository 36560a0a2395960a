#include "uasn/io.hpp"

#include "uasn/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace uasn {

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput("position must be [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

// JSON has no infinity; infinite lifetimes are written as null.
json lifetime_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double lifetime_from(const json& j) { return j.is_null() ? kInfiniteLifetime : j.get<double>(); }

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json deployment_to_json(const Deployment& dep) {
  json nodes = json::array();
  for (const auto& n : dep.nodes())
    nodes.push_back({{"id", n.id},
                     {"kind", to_string(n.kind)},
                     {"position", vec_to_json(n.position)},
                     {"residual_energy", n.residual_energy},
                     {"primary_energy", n.primary_energy},
                     {"generation_rate", n.generation_rate}});
  return {{"format", kDeploymentFormat},
          {"comm_range", dep.comm_range()},
          {"field", {{"radius", dep.field().radius}, {"depth", dep.field().depth}}},
          {"nodes", nodes}};
}

Deployment deployment_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("deployment must be a JSON object");
  if (required<int>(j, "format") != kDeploymentFormat) throw InvalidInput("unsupported deployment format");
  const json& f = j.at("field");
  const Field field{required<double>(f, "radius"), required<double>(f, "depth")};
  std::vector<Node> nodes;
  for (const auto& n : j.at("nodes")) {
    Node node;
    node.id = required<int>(n, "id");
    node.kind = node_kind_from_string(required<std::string>(n, "kind"));
    node.position = vec_from_json(n.at("position"));
    node.residual_energy = required<double>(n, "residual_energy");
    node.primary_energy = n.contains("primary_energy") ? n.at("primary_energy").get<double>() : node.residual_energy;
    node.generation_rate = n.contains("generation_rate") ? n.at("generation_rate").get<Rate>() : 0;
    nodes.push_back(node);
  }
  return Deployment(std::move(nodes), required<double>(j, "comm_range"), field);
}

void write_rate_csv(std::ostream& os, const RateArray& rates) {
  os << "src";
  for (int j = 0; j < rates.size(); ++j) os << ',' << j;
  os << '\n';
  for (int i = 0; i < rates.size(); ++i) {
    os << i;
    for (int j = 0; j < rates.size(); ++j) os << ',' << rates(i, j);
    os << '\n';
  }
}

RateArray read_rate_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("empty rate file");
  const int n = static_cast<int>(std::count(line.begin(), line.end(), ','));
  RateArray rates(n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw InvalidInput("rate file has too few rows");
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (std::stoi(cell) != i) throw InvalidInput("rate rows out of order");
    for (int j = 0; j < n; ++j) {
      if (!std::getline(ss, cell, ',')) throw InvalidInput("rate row too short");
      Rate v = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || v < 0) throw InvalidInput("bad rate '" + cell + "'");
      rates(i, j) = v;
    }
  }
  return rates;
}

json config_to_json(const Config& c) {
  return {{"h_s", c.h_s},
          {"r_s_m", c.r_s},
          {"c_r", c.c_r},
          {"f_khz", c.energy.f_khz},
          {"p_s_mw", c.energy.p_s_mw},
          {"p_r_mw", c.energy.p_r_mw},
          {"d_t_m", c.energy.d_t_m},
          {"l_c_bps", c.energy.l_c_bps},
          {"eps_p_j", c.eps_p},
          {"g_min", c.g_min},
          {"g_max", c.g_max},
          {"omega1", c.omega1},
          {"eta", c.eta},
          {"tol_simplex", c.tol.simplex},
          {"tol_lifetime", c.tol.lifetime},
          {"min_separation_m", c.tol.min_separation},
          {"horizon_s", c.horizon},
          {"iec_snapshot", c.snapshot_at_initial_lifetime ? "initial" : "own"},
          {"routing", to_string(c.routing.policy)},
          {"split_slack", c.routing.split_slack},
          {"skip_non_improving", c.skip_non_improving},
          {"max_starts", c.max_starts},
          {"generation_retries", c.generation_retries}};
}

Config config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  Config c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "h_s") c.h_s = v.get<double>();
      else if (key == "r_s_m") c.r_s = v.get<double>();
      else if (key == "c_r") c.c_r = v.get<double>();
      else if (key == "f_khz") c.energy.f_khz = v.get<double>();
      else if (key == "p_s_mw") c.energy.p_s_mw = v.get<double>();
      else if (key == "p_r_mw") c.energy.p_r_mw = v.get<double>();
      else if (key == "d_t_m") c.energy.d_t_m = v.get<double>();
      else if (key == "l_c_bps") c.energy.l_c_bps = v.get<Rate>();
      else if (key == "eps_p_j") c.eps_p = v.get<double>();
      else if (key == "g_min") c.g_min = v.get<Rate>();
      else if (key == "g_max") c.g_max = v.get<Rate>();
      else if (key == "omega1") c.omega1 = v.get<double>();
      else if (key == "eta") c.eta = v.get<double>();
      else if (key == "tol_simplex") c.tol.simplex = v.get<double>();
      else if (key == "tol_lifetime") c.tol.lifetime = v.get<double>();
      else if (key == "min_separation_m") c.tol.min_separation = v.get<double>();
      else if (key == "horizon_s") c.horizon = v.get<double>();
      else if (key == "iec_snapshot") {
        const auto mode = v.get<std::string>();
        if (mode != "initial" && mode != "own") throw InvalidInput("iec_snapshot must be 'initial' or 'own'");
        c.snapshot_at_initial_lifetime = mode == "initial";
      } else if (key == "routing") c.routing.policy = routing_policy_from_string(v.get<std::string>());
      else if (key == "split_slack") c.routing.split_slack = v.get<double>();
      else if (key == "skip_non_improving") c.skip_non_improving = v.get<bool>();
      else if (key == "max_starts") c.max_starts = v.get<int>();
      else if (key == "generation_retries") c.generation_retries = v.get<int>();
      else throw InvalidInput("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw InvalidInput("bad value for '" + key + "': " + e.what());
    }
  }
  if (!(c.h_s > 0 && c.r_s > 0 && c.c_r > 0 && c.eps_p > 0 && c.horizon >= 0))
    throw InvalidInput("field sizes, range, energy and horizon must be positive");
  if (!(c.omega1 > 0.0 && c.omega1 < 1.0)) throw InvalidInput("omega1 must lie in (0, 1)");
  return c;
}

json placement_record_to_json(const PlacementRecord& rec) {
  const auto& s = rec.solution;
  json theta = json::array();
  for (Eigen::Index i = 0; i < s.theta.size(); ++i) theta.push_back(s.theta(i));
  json j = {{"iter", rec.iteration},
            {"critical_node", rec.critical},
            {"neighbors", rec.neighbors},
            {"theta", theta},
            {"position", s.feasible() ? vec_to_json(s.position) : json(nullptr)},
            {"p_ciri", s.feasible() ? json(s.p_critical) : json(nullptr)},
            {"tau_c", s.feasible() ? lifetime_json(s.tau_critical) : json(nullptr)},
            {"tau_r", s.feasible() ? lifetime_json(s.tau_relay) : json(nullptr)},
            {"lifetime_after", lifetime_json(rec.lifetime_after)},
            {"skipped", rec.skipped},
            {"reason", rec.reason}};
  if (rec.relay >= 0) j["relay"] = rec.relay;
  if (s.oracle_gap) j["oracle_gap"] = *s.oracle_gap;
  return j;
}

void write_placement_log(std::ostream& os, const std::vector<PlacementRecord>& log) {
  for (const auto& rec : log) os << placement_record_to_json(rec).dump() << '\n';
}

json selection_report(const SelectionResult& sel) {
  json per = json::array();
  for (const auto& r : sel.per_relay)
    per.push_back({{"id", r.id},
                   {"p_relay", r.p_relay},
                   {"p_direct", r.p_direct},
                   {"lifetime_if_dropped", lifetime_json(r.lifetime_if_dropped)}});
  return {{"kept", sel.kept_ids()},
          {"dropped", sel.dropped_ids()},
          {"objective", sel.objective},
          {"tau_star", lifetime_json(sel.tau_star)},
          {"min_lifetime", lifetime_json(sel.min_lifetime)},
          {"exact", sel.exact},
          {"constraint_relaxed", sel.constraint_relaxed},
          {"per_relay", per}};
}

json metrics_to_json(const MetricsReport& r) {
  json outcomes = json::array();
  for (const auto& o : r.outcomes) {
    json pos = json::array();
    for (const auto& p : o.relay_positions) pos.push_back(vec_to_json(p));
    outcomes.push_back({{"seed", o.seed},
                        {"ok", o.ok},
                        {"error", o.error},
                        {"initial_lifetime", lifetime_json(o.initial_lifetime)},
                        {"lifetime", lifetime_json(o.lifetime)},
                        {"relays_placed", o.relays_placed},
                        {"relays_kept", o.relays_kept},
                        {"relay_positions", pos},
                        {"residual", o.residual}});
  }
  return {{"case", r.scenario.spec.label},
          {"rf", r.scenario.spec.rf},
          {"gamma_r", r.scenario.spec.gamma_r},
          {"n", r.scenario.n},
          {"method", to_string(r.scenario.method)},
          {"selection", r.scenario.selection},
          {"seeds", r.scenario.seeds},
          {"mean_lifetime", r.mean_lifetime},
          {"stddev_lifetime", r.stddev_lifetime},
          {"stderr_lifetime", r.stderr_lifetime},
          {"mean_kept", r.mean_kept},
          {"iec", r.iec},
          {"failed_seeds", r.failed_seeds},
          {"outcomes", outcomes}};
}

MetricsReport metrics_from_json(const json& j) {
  MetricsReport r;
  r.scenario.spec = {required<std::string>(j, "case"), required<double>(j, "rf"), required<double>(j, "gamma_r")};
  r.scenario.n = required<int>(j, "n");
  r.scenario.method = method_from_string(required<std::string>(j, "method"));
  r.scenario.selection = required<bool>(j, "selection");
  r.scenario.seeds = required<std::vector<std::uint64_t>>(j, "seeds");
  r.mean_lifetime = required<double>(j, "mean_lifetime");
  r.stddev_lifetime = required<double>(j, "stddev_lifetime");
  r.stderr_lifetime = required<double>(j, "stderr_lifetime");
  r.mean_kept = required<double>(j, "mean_kept");
  r.iec = required<double>(j, "iec");
  r.failed_seeds = required<std::vector<std::uint64_t>>(j, "failed_seeds");
  for (const auto& o : j.at("outcomes")) {
    SeedOutcome s;
    s.seed = required<std::uint64_t>(o, "seed");
    s.ok = required<bool>(o, "ok");
    s.error = required<std::string>(o, "error");
    s.initial_lifetime = lifetime_from(o.at("initial_lifetime"));
    s.lifetime = lifetime_from(o.at("lifetime"));
    s.relays_placed = required<int>(o, "relays_placed");
    s.relays_kept = required<int>(o, "relays_kept");
    for (const auto& p : o.at("relay_positions")) s.relay_positions.push_back(vec_from_json(p));
    s.residual = required<std::vector<double>>(o, "residual");
    r.outcomes.push_back(std::move(s));
  }
  return r;
}

void write_lifetime_csv_header(std::ostream& os) { os << "case,method,n,seed,lifetime_s,relays_kept\n"; }

void write_lifetime_csv(std::ostream& os, const MetricsReport& r) {
  for (const auto& o : r.outcomes) {
    if (!o.ok) continue;
    os << r.scenario.spec.label << ',' << to_string(r.scenario.method) << ',' << r.scenario.n << ',' << o.seed << ','
       << format_double(o.lifetime) << ',' << o.relays_kept << '\n';
  }
}

void write_positions_csv(std::ostream& os, const MetricsReport& r) {
  os << "case,method,n,seed,x,y,z\n";
  for (const auto& o : r.outcomes)
    for (const auto& p : o.relay_positions)
      os << r.scenario.spec.label << ',' << to_string(r.scenario.method) << ',' << r.scenario.n << ',' << o.seed << ','
         << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

}  // namespace uasn
