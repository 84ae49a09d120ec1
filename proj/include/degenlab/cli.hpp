#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "degenlab/diagnose.hpp"
#include "json.hpp"

namespace degenlab {

struct MeshSpec {
  std::size_t n = 0;
  std::optional<std::array<Interval, 2>> box;  ///< defaults to the profile domain
  FaceSampling sampling = FaceSampling::Midpoint;
};

/// Deliberate corruption of the assembled operator, used to test detection power.
struct Perturbation {
  enum class Kind { Diagonal, Face };
  Kind kind = Kind::Diagonal;
  std::size_t index = 0;  ///< node (Diagonal) or face (Face)
  int axis = 0;
  double value = 0.0;     ///< diagonal shift or replacement conductance
};

struct CheckSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

struct Scenario {
  std::string name;
  std::string anchor;
  nlohmann::json profile;
  MeshSpec mesh;
  std::vector<Perturbation> perturbations;
  std::vector<double> epsilons{0.0};
  std::vector<double> t_small;
  std::vector<double> t_large;
  std::vector<CheckSpec> checks;
  std::uint64_t seed = 7;
  std::string output;
  std::filesystem::path base_dir;  ///< resolves relative CSV paths in the profile
};

/// Names accepted in `checks[].name`.
const std::vector<std::string>& known_checks();

/// Parses and validates a scenario document; SchemaError names the offending field.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json scenario_to_json(const Scenario& s);

/// Reads a file; JSON syntax errors become SchemaError with the line and column.
Scenario load_scenario(const std::filesystem::path& path);

/// Sets a dotted path (e.g. "mesh.n=2048", "checks.0.times=[0.1,1]"). The value is
/// parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

const std::vector<Scenario>& builtin_scenarios();
std::optional<Scenario> find_builtin(const std::string& name);

struct RunOptions {
  std::filesystem::path out_dir;  ///< empty: scenario.output, else "out/<name>"
  int threads = 0;                ///< 0 keeps the OpenMP default
  bool write = true;
  bool plots = true;
};

struct RunOutcome {
  DiagnosticsReport report;
  std::filesystem::path out_dir;
  int exit_code = 0;  ///< 0 clean, 2 when any check is Violated
};

RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options = {});

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Polyline plot with optional log axes; non-positive values are dropped on log axes.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, bool logx, bool logy);

}  // namespace degenlab
