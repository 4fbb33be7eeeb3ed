#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "swarm/io.hpp"
#include "swarm/scenarios.hpp"

using namespace swarm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("swarmlab-test-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario catalog lists the documented pipelines") {
  const auto& infos = scenario_catalog();
  auto has = [&](const std::string& name) {
    for (const auto& i : infos)
      if (i.name == name) return true;
    return false;
  };
  for (const char* name :
       {"sigma-1d-indicator", "sigma-2d-indicator", "complete-graph-decay",
        "fat-tail-flocking", "hydro-1d-subcritical", "hydro-1d-supercritical",
        "hydro-2d-threshold", "weighted-gap-uniform", "harmonic-potential-flock"}) {
    CHECK(has(name));
  }
  for (const auto& i : infos) CHECK(!i.description.empty());
}

TEST_CASE("config resolution") {
  SUBCASE("defaults are complete for every catalog entry") {
    for (const auto& info : scenario_catalog()) {
      const auto cfg = default_config(info.name);
      CHECK(cfg.at("scenario").get<std::string>() == info.name);
    }
  }
  SUBCASE("user overrides merge over defaults") {
    nlohmann::json user = {{"scenario", "complete-graph-decay"}, {"n_agents", 8}};
    const auto cfg = resolve_config(user);
    CHECK(cfg.at("n_agents").get<int>() == 8);
    CHECK(cfg.at("dt").get<double>() == 1e-3);  // default retained
  }
  SUBCASE("unknown scenario raises out_of_range") {
    CHECK_THROWS_AS((void)default_config("nope"), std::out_of_range);
    CHECK_THROWS_AS((void)resolve_config(nlohmann::json{{"scenario", "nope"}}),
                    std::out_of_range);
  }
  SUBCASE("missing scenario name raises invalid_argument") {
    CHECK_THROWS_AS((void)resolve_config(nlohmann::json::object()), std::invalid_argument);
  }
}

TEST_CASE("run_scenario writes a reproducible bundle") {
  const auto dir = temp_dir("bundle");
  const nlohmann::json cfg = {{"scenario", "sigma-1d-indicator"}};

  const auto outcome = run_scenario(cfg, dir);
  CHECK(outcome.pass);
  CHECK(fs::exists(dir / "sigma-1d-indicator" / "sigma.json"));
  CHECK(fs::exists(dir / "sigma-1d-indicator" / "certificates.json"));
  CHECK(fs::exists(dir / "sigma-1d-indicator" / "manifest.json"));

  // manifest covers the emitted files with correct hashes
  nlohmann::json manifest;
  std::ifstream(dir / "sigma-1d-indicator" / "manifest.json") >> manifest;
  CHECK(manifest.at("pass").get<bool>());
  CHECK(manifest.at("version").get<std::string>() == std::string(kVersion));
  for (const auto& f : manifest.at("files")) {
    const auto path = dir / "sigma-1d-indicator" / f.at("name").get<std::string>();
    CHECK(fs::exists(path));
    CHECK(fnv1a_hex(path) == f.at("fnv1a").get<std::string>());
    CHECK(fs::file_size(path) == f.at("bytes").get<std::uint64_t>());
  }
}

TEST_CASE("identical config and seed reproduce byte-identical CSVs") {
  const auto dir_a = temp_dir("det-a");
  const auto dir_b = temp_dir("det-b");
  nlohmann::json cfg = {{"scenario", "complete-graph-decay"},
                        {"t_end", 0.2},
                        {"record_every", 20}};
  const auto a = run_scenario(cfg, dir_a);
  const auto b = run_scenario(cfg, dir_b);
  CHECK(a.pass);
  CHECK(b.pass);
  CHECK(slurp(dir_a / "complete-graph-decay" / "trace.csv") ==
        slurp(dir_b / "complete-graph-decay" / "trace.csv"));
}

TEST_CASE("hydro bundles reproduce byte-identically through the FFT path") {
  const auto dir_a = temp_dir("det-h-a");
  const auto dir_b = temp_dir("det-h-b");
  nlohmann::json cfg = {{"scenario", "hydro-1d-subcritical"},
                        {"cells", 128},
                        {"t_end", 0.5},
                        {"record_every", 5}};
  (void)run_scenario(cfg, dir_a);
  (void)run_scenario(cfg, dir_b);
  const auto csv_a = slurp(dir_a / "hydro-1d-subcritical" / "trace.csv");
  CHECK(!csv_a.empty());
  CHECK(csv_a == slurp(dir_b / "hydro-1d-subcritical" / "trace.csv"));
  CHECK(slurp(dir_a / "hydro-1d-subcritical" / "final_state.csv") ==
        slurp(dir_b / "hydro-1d-subcritical" / "final_state.csv"));
}

TEST_CASE("ensembles load from CSV through the config library") {
  const auto dir = temp_dir("file-init");
  const Domain t1 = Domain::torus(1, 2.0 * std::numbers::pi);
  const auto reference = random_uniform_ensemble(t1, 6, 1.0, 1.0, 5);
  const auto path = dir / "init.csv";
  to_csv(reference).write(path);

  nlohmann::json cfg = {{"scenario", "complete-graph-decay"},
                        {"n_agents", 6},
                        {"t_end", 0.05},
                        {"record_every", 5},
                        {"initial", {{"type", "file"}, {"path", path.string()}}}};
  const auto outcome = run_scenario(cfg, dir);
  CHECK(outcome.pass);
  CHECK(outcome.report.at("deltaE_0").get<double>() ==
        doctest::Approx(energy_fluctuation(reference)).epsilon(1e-15));
}

TEST_CASE("tolerance overrides can force a reported failure") {
  // the analytic path reproduces 1 - sin(1) exactly, so force a failure
  // with an unattainable negative tolerance
  const auto dir = temp_dir("tol");
  const nlohmann::json cfg = {{"scenario", "sigma-1d-indicator"}};
  const auto outcome = run_scenario(cfg, dir, {{"sigma-matches-analytic", -1.0}});
  CHECK(!outcome.pass);
  bool found = false;
  for (const auto& c : outcome.checks)
    if (c.name == "sigma-matches-analytic") {
      found = true;
      CHECK(!c.pass);
      CHECK(c.margin > 0.0);  // reported margin shows how far off the demand was
    }
  CHECK(found);
}

TEST_CASE("CSV round trips") {
  const auto dir = temp_dir("csv");

  SUBCASE("ensemble export/import") {
    const Domain d2 = Domain::free_space(2);
    const auto e = random_uniform_ensemble(d2, 7, 1.0, 0.5, 123);
    const auto path = dir / "ensemble.csv";
    to_csv(e).write(path);
    const auto back = ensemble_from_csv(path, d2);
    REQUIRE(back.n == e.n);
    for (size_t k = 0; k < e.pos.size(); ++k) {
      CHECK(back.pos[k] == e.pos[k]);  // format17 is round-trip exact
      CHECK(back.vel[k] == e.vel[k]);
    }
  }
  SUBCASE("table read rejects ragged rows") {
    const auto path = dir / "bad.csv";
    std::ofstream(path) << "a,b\n1.0\n";
    CHECK_THROWS_AS((void)CsvTable::read(path), std::runtime_error);
  }
  SUBCASE("energy trace header contract") {
    EnergyTrace tr;
    tr.times = {0.0, 1.0};
    tr.delta_e = {1.0, 0.5};
    tr.diameter = {2.0, 2.0};
    tr.velocity_diameter = {1.0, 0.7};
    const auto t = to_csv(tr);
    REQUIRE(t.header.size() == 4);
    CHECK(t.header[0] == "t");
    CHECK(t.header[1] == "deltaE");
    CHECK(t.header[2] == "D");
    CHECK(t.header[3] == "V");
  }
}

#ifdef SWARMLAB_BIN
TEST_CASE("CLI exit-code contract") {
  const std::string bin = SWARMLAB_BIN;
  const auto dir = temp_dir("cli");
  auto run = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run("list") == 0);
  CHECK(run("list --json") == 0);
  CHECK(run("definitely-not-a-subcommand") == 64);
  CHECK(run("list --definitely-not-a-flag") == 64);
  CHECK(run("verify --filter A1") == 0);

  // empty config file: parse error, exit 65, no outputs
  const auto empty = dir / "empty.json";
  std::ofstream(empty) << "";
  CHECK(run("run " + empty.string() + " -o " + (dir / "out").string()) == 65);
  CHECK(!fs::exists(dir / "out" / "manifest.json"));

  // unknown scenario: usage error 64
  const auto unknown = dir / "unknown.json";
  std::ofstream(unknown) << R"({"scenario": "nope"})";
  CHECK(run("run " + unknown.string() + " -o " + (dir / "out").string()) == 64);

  // passing scenario: exit 0 and a bundle
  const auto good = dir / "good.json";
  std::ofstream(good) << R"({"scenario": "sigma-1d-indicator"})";
  CHECK(run("run " + good.string() + " -o " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "sigma-1d-indicator" / "manifest.json"));

  // forced certificate failure: exit 2, manifest still written
  CHECK(run("run " + good.string() + " -o " + (dir / "out2").string() +
            " --tol sigma-matches-analytic=-1") == 2);
  CHECK(fs::exists(dir / "out2" / "sigma-1d-indicator" / "manifest.json"));

  // blow-up inside a scenario expecting smoothness: exit 2 with the
  // failure recorded in the manifest
  const auto blowup = dir / "blowup.json";
  std::ofstream(blowup) << R"({"scenario": "hydro-1d-subcritical", "cells": 128,
                               "t_end": 3.0,
                               "initial": {"type": "cosine-1d", "rho": 1.0,
                                           "rho_eps": 0.0, "u_amp": 2.0, "mode": 1},
                               "blowup_gradient_cap": 6.0})";
  CHECK(run("run " + blowup.string() + " -o " + (dir / "out3").string()) == 2);
  {
    nlohmann::json manifest;
    std::ifstream(dir / "out3" / "hydro-1d-subcritical" / "manifest.json") >> manifest;
    CHECK(!manifest.at("pass").get<bool>());
    bool smooth_failed = false;
    for (const auto& f : manifest.at("failures"))
      if (f.get<std::string>() == "smooth-run") smooth_failed = true;
    CHECK(smooth_failed);
  }
}
#endif
