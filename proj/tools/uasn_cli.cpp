// uasn_cli: deployments, routing, relay placement and batch experiments from the command line.
//
// Exit codes: 0 success, 2 infeasible, 3 invalid input.

#include "uasn/baselines.hpp"
#include "uasn/errors.hpp"
#include "uasn/harness.hpp"
#include "uasn/io.hpp"
#include "uasn/orns.hpp"
#include "uasn/rnmi.hpp"
#include "uasn/routing.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace uasn;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitInvalid = 3;

Config load_config(const std::string& path) { return path.empty() ? Config{} : config_from_json(read_json_file(path)); }

RateArray load_rates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_rate_csv(in);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

std::string rates_text(const RateArray& r) {
  std::ostringstream os;
  write_rate_csv(os, r);
  return os.str();
}

SequentialPlacementResult place(const std::string& method, const Deployment& dep, const RateArray& rates,
                                const Config& cfg, int m0, std::uint64_t seed) {
  const EnergyModel model = cfg.model();
  const Method m = method_from_string(method);
  switch (m) {
    case Method::ORNS: return orns_run(dep, rates, model, m0, cfg.orns_options());
    case Method::LSRNP: return place_lsrnp(dep, rates, model, m0, cfg.orns_options());
    case Method::RA: return place_ra(dep, rates, model, m0, seed, cfg.orns_options());
    case Method::NoRelay: break;
  }
  return place_none(dep, rates, model);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay placement for underwater acoustic sensor networks"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config with flat parameter keys")->check(CLI::ExistingFile);

  // deploy
  auto* deploy = app.add_subcommand("deploy", "generate a random connected deployment");
  int n = 40;
  std::uint64_t seed = 1;
  double rf = 1.0;
  std::string out_path, rates_out;
  deploy->add_option("--n", n, "number of sensors")->check(CLI::PositiveNumber);
  deploy->add_option("--seed", seed, "random seed");
  deploy->add_option("--rf", rf, "residual-energy factor of the initially critical node")->check(CLI::Range(0.0, 1.0));
  deploy->add_option("-o,--out", out_path, "deployment JSON (default stdout)");
  deploy->add_option("--rates-out", rates_out, "also write the initial rate array CSV");

  // route
  auto* route = app.add_subcommand("route", "build the initial rate array");
  std::string dep_path, rates_path;
  route->add_option("--deployment", dep_path)->required()->check(CLI::ExistingFile);
  route->add_option("-o,--out", out_path, "rate array CSV (default stdout)");

  // place
  auto* placec = app.add_subcommand("place", "place relays sequentially");
  std::string method = "orns", log_path, dep_out;
  int m0 = 1;
  placec->add_option("--method", method)->check(CLI::IsMember({"orns", "ra", "lsrnp", "none"}));
  placec->add_option("--deployment", dep_path)->required()->check(CLI::ExistingFile);
  placec->add_option("--rates", rates_path, "initial rate array CSV (routed when omitted)")->check(CLI::ExistingFile);
  placec->add_option("--m0", m0, "relay budget")->check(CLI::NonNegativeNumber);
  placec->add_option("--seed", seed, "seed for the random baseline");
  placec->add_option("--log", log_path, "placement log, JSON lines");
  placec->add_option("--deployment-out", dep_out, "deployment with relays");
  placec->add_option("-o,--rates-out", rates_out, "final rate array CSV");

  // select
  auto* selectc = app.add_subcommand("select", "place relays, then keep the smallest useful subset");
  selectc->add_option("--method", method)->check(CLI::IsMember({"orns", "ra", "lsrnp"}));
  selectc->add_option("--deployment", dep_path)->required()->check(CLI::ExistingFile);
  selectc->add_option("--rates", rates_path)->check(CLI::ExistingFile);
  selectc->add_option("--m0", m0)->check(CLI::NonNegativeNumber);
  selectc->add_option("--seed", seed);
  selectc->add_option("-o,--out", out_path, "selection report JSON (default stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "batch run over seeds");
  std::string case_label = "A", csv_path, positions_path;
  std::vector<std::string> methods{"orns", "lsrnp", "ra", "none"};
  int seeds = 50;
  std::uint64_t first_seed = 1;
  bool selection = false;
  exp->add_option("--case", case_label)->check(CLI::IsMember({"A", "B", "C", "D"}));
  exp->add_option("--n", n)->check(CLI::PositiveNumber);
  exp->add_option("--seeds", seeds)->check(CLI::PositiveNumber);
  exp->add_option("--first-seed", first_seed);
  exp->add_option("--methods", methods)->check(CLI::IsMember({"orns", "ra", "lsrnp", "none"}));
  exp->add_flag("--select", selection, "run relay selection after placement");
  exp->add_option("--csv", csv_path, "lifetime table CSV");
  exp->add_option("--positions", positions_path, "relay positions CSV");
  exp->add_option("-o,--out", out_path, "JSON reports (default stdout)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "summarise experiment reports");
  std::vector<std::string> reports;
  metrics->add_option("reports", reports, "JSON files written by 'experiment'")->required()->check(CLI::ExistingFile);
  metrics->add_option("-o,--out", out_path, "summary CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    const Config cfg = load_config(config_path);
    const EnergyModel model = cfg.model();

    if (*deploy) {
      const Instance inst = generate_instance(n, cfg, seed, rf);
      emit(out_path, deployment_to_json(inst.deployment).dump(2) + "\n");
      if (!rates_out.empty()) write_text_file(rates_out, rates_text(inst.rates));
    } else if (*route) {
      const Deployment dep = deployment_from_json(read_json_file(dep_path));
      emit(out_path, rates_text(build_initial_rate_array(dep, model, cfg.routing)));
    } else if (*placec || *selectc) {
      const Deployment dep = deployment_from_json(read_json_file(dep_path));
      const RateArray rates = rates_path.empty() ? build_initial_rate_array(dep, model, cfg.routing) : load_rates(rates_path);
      if (rates.size() != dep.size()) throw InvalidInput("rate array does not match the deployment");
      const auto placed = place(method, dep, rates, cfg, m0, seed);
      if (*placec) {
        if (!log_path.empty()) {
          std::ostringstream os;
          write_placement_log(os, placed.log);
          write_text_file(log_path, os.str());
        }
        if (!dep_out.empty()) write_text_file(dep_out, deployment_to_json(placed.deployment).dump(2) + "\n");
        if (!rates_out.empty()) write_text_file(rates_out, rates_text(placed.rates));
        std::cout << "relays " << placed.relays_deployed() << " lifetime_s " << format_double(placed.lifetime)
                  << " initial_s " << format_double(placed.initial_lifetime) << '\n';
      } else {
        const auto sel = select_relays(placed, model, cfg.selection_options());
        emit(out_path, selection_report(sel).dump(2) + "\n");
      }
    } else if (*exp) {
      json out = json::array();
      std::ostringstream csv, pos;
      write_lifetime_csv_header(csv);
      bool first = true;
      for (const auto& m : methods) {
        Scenario sc{case_spec(case_label), n, seed_range(first_seed, seeds), method_from_string(m), selection};
        const MetricsReport r = run_experiment(sc, cfg);
        out.push_back(metrics_to_json(r));
        write_lifetime_csv(csv, r);
        std::ostringstream p;
        write_positions_csv(p, r);
        const std::string ptext = p.str();
        pos << (first ? ptext : ptext.substr(ptext.find('\n') + 1));
        first = false;
        std::cerr << case_label << " n=" << n << ' ' << m << " mean_lifetime_s " << format_double(r.mean_lifetime)
                  << " iec " << format_double(r.iec) << " failed " << r.failed_seeds.size() << '\n';
      }
      emit(out_path, out.dump(2) + "\n");
      if (!csv_path.empty()) write_text_file(csv_path, csv.str());
      if (!positions_path.empty()) write_text_file(positions_path, pos.str());
    } else if (*metrics) {
      std::ostringstream os;
      os << "case,method,n,seeds,failed,mean_lifetime_s,stderr_lifetime_s,mean_kept,iec\n";
      for (const auto& path : reports) {
        const json doc = read_json_file(path);
        const auto add = [&](const json& j) {
          const MetricsReport r = metrics_from_json(j);
          os << r.scenario.spec.label << ',' << to_string(r.scenario.method) << ',' << r.scenario.n << ','
             << r.scenario.seeds.size() << ',' << r.failed_seeds.size() << ',' << format_double(r.mean_lifetime)
             << ',' << format_double(r.stderr_lifetime) << ',' << format_double(r.mean_kept) << ','
             << format_double(r.iec) << '\n';
        };
        if (doc.is_array())
          for (const auto& j : doc) add(j);
        else
          add(doc);
      }
      emit(out_path, os.str());
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
