#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "swarm/scenarios.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCertificateFailed = 2;
constexpr int kExitUsage = 64;
constexpr int kExitConfig = 65;

std::filesystem::path output_root(const std::string& cli_value) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("SWARMLAB_OUT")) return env;
  return "out";
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& kvs) {
  std::map<std::string, double> tol;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--tol expects NAME=VALUE, got '" + kv + "'");
    tol[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return tol;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarmlab: alignment-dynamics simulators and spectral certificates"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  std::string run_out;
  std::vector<std::string> run_tols;
  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "JSON config file (see 'list' for scenarios)")
      ->required();
  run->add_option("-o,--out", run_out, "output root (default $SWARMLAB_OUT or ./out)");
  run->add_option("--tol", run_tols, "check tolerance override NAME=VALUE");

  // list
  bool list_json = false;
  auto* list = app.add_subcommand("list", "list built-in scenarios");
  list->add_flag("--json", list_json, "machine-readable JSON array");

  // verify
  std::string filter;
  std::vector<std::string> verify_tols;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--filter", filter, "restrict to criteria matching this substring");
  verify->add_option("--tol", verify_tols, "check tolerance override NAME=VALUE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*list) {
      if (list_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& info : swarm::scenario_catalog())
          arr.push_back({{"name", info.name}, {"description", info.description}});
        std::cout << arr.dump(2) << "\n";
      } else {
        for (const auto& info : swarm::scenario_catalog())
          std::cout << info.name << "\n    " << info.description << "\n";
      }
      return kExitPass;
    }

    if (*run) {
      nlohmann::json config;
      {
        std::ifstream in(config_path);
        if (!in) {
          std::cerr << "error: cannot open config '" << config_path << "'\n";
          return kExitConfig;
        }
        try {
          in >> config;
        } catch (const nlohmann::json::exception& ex) {
          std::cerr << "error: config parse failed: " << ex.what() << "\n";
          return kExitConfig;
        }
      }
      std::map<std::string, double> tol;
      try {
        tol = parse_tolerances(run_tols);
      } catch (const CLI::Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
      }

      swarm::ScenarioOutcome outcome;
      try {
        outcome = swarm::run_scenario(config, output_root(run_out), tol);
      } catch (const std::out_of_range& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
      } catch (const nlohmann::json::exception& ex) {
        std::cerr << "error: config field: " << ex.what() << "\n";
        return kExitConfig;
      } catch (const std::invalid_argument& ex) {
        std::cerr << "error: config: " << ex.what() << "\n";
        return kExitConfig;
      }

      for (const auto& check : outcome.checks)
        std::cout << (check.pass ? "PASS " : "FAIL ") << outcome.scenario << "/" << check.name
                  << "  " << check.detail << "\n";
      std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << outcome.scenario << " ["
                << outcome.wall_time_s << " s]\n";
      return outcome.pass ? kExitPass : kExitCertificateFailed;
    }

    if (*verify) {
      std::map<std::string, double> tol;
      try {
        tol = parse_tolerances(verify_tols);
      } catch (const CLI::Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
      }
      const auto results = swarm::verify_all(std::cout, tol, filter);
      bool pass = !results.empty();
      for (const auto& r : results) pass = pass && r.pass;
      std::cout << (pass ? "ALL PASS" : "FAILURES PRESENT") << " (" << results.size()
                << " criteria)\n";
      return pass ? kExitPass : kExitCertificateFailed;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitCertificateFailed;
  }
  return kExitUsage;
}
