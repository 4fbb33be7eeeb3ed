#ifndef SWARM_SCENARIOS_HPP
#define SWARM_SCENARIOS_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace swarm {

inline constexpr const char* kVersion = "1.0.0";

struct ScenarioInfo {
  std::string name;
  std::string description;
};

/// Built-in scenario catalog, in stable listing order.
const std::vector<ScenarioInfo>& scenario_catalog();

/// Full default configuration of a named scenario (every parameter explicit).
/// Throws std::out_of_range for unknown names.
nlohmann::json default_config(const std::string& scenario);

/// Merge a partial user configuration over the scenario defaults.
nlohmann::json resolve_config(const nlohmann::json& user);

struct ScenarioCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // signed slack; negative means within tolerance
  std::string detail;
};

struct ScenarioOutcome {
  std::string scenario;
  bool pass = false;
  std::vector<ScenarioCheck> checks;
  nlohmann::json report;  // scenario-specific certificate numbers
  std::vector<std::filesystem::path> files;
  double wall_time_s = 0.0;
};

/// Execute one scenario bundle: run the pipeline, write trace CSVs,
/// certificates.json and manifest.json under out_root/<scenario>/.
/// Tolerance overrides are keyed by check name.
ScenarioOutcome run_scenario(const nlohmann::json& config,
                             const std::filesystem::path& out_root,
                             const std::map<std::string, double>& tol = {});

struct CriterionResult {
  std::string id;  // A1..A8
  std::string title;
  bool pass = false;
  std::string summary;
  double seconds = 0.0;
};

/// Run the acceptance suite: every criterion at its pinned tolerance, one
/// pass/fail line per criterion on `log`. `filter` restricts by substring
/// of the criterion id or title; `tol` overrides named check tolerances.
std::vector<CriterionResult> verify_all(std::ostream& log,
                                        const std::map<std::string, double>& tol = {},
                                        const std::string& filter = "");

}  // namespace swarm

#endif
