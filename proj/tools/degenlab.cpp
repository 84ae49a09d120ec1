#include <iostream>

#include "CLI11.hpp"
#include "degenlab/cli.hpp"
#include "degenlab/error.hpp"

namespace {

int run(const std::string& target, const std::string& out, int threads,
        const std::vector<std::string>& overrides, bool quiet) {
  using namespace degenlab;
  nlohmann::json doc;
  std::filesystem::path base;
  if (const auto b = find_builtin(target)) {
    doc = scenario_to_json(*b);
  } else {
    const Scenario s = load_scenario(target);
    doc = scenario_to_json(s);
    base = s.base_dir;
  }
  for (const auto& o : overrides) apply_override(doc, o);
  const Scenario scenario = scenario_from_json(doc, base);
  RunOptions opts;
  opts.out_dir = out;
  opts.threads = threads;
  const auto outcome = run_scenario(scenario, opts);
  if (!quiet) {
    for (const auto& r : outcome.report.records) {
      std::cout << to_string(r.status) << "  " << r.name << "  " << r.label << " = " << format_cell(r.value)
                << '\n';
    }
    std::cout << "wrote " << outcome.out_dir.string() << '\n';
  }
  return outcome.exit_code;
}

int list(const std::string& format) {
  using namespace degenlab;
  if (format == "json") {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& s : builtin_scenarios()) all.push_back(scenario_to_json(s));
    std::cout << all.dump(2) << '\n';
    return 0;
  }
  for (const auto& s : builtin_scenarios()) std::cout << s.name << "\n    " << s.anchor << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate diffusion diagnostics"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run a scenario file or builtin name");
  std::string target, out;
  int threads = 0;
  bool quiet = false;
  std::vector<std::string> overrides;
  run_cmd->add_option("scenario", target, "Scenario JSON path or builtin name")->required();
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--threads", threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--override", overrides, "Dotted key=value override (repeatable)");
  run_cmd->add_flag("--quiet", quiet, "Suppress the per-check summary");

  auto* list_cmd = app.add_subcommand("list", "List builtin scenarios");
  std::string format = "text";
  list_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(target, out, threads, overrides, quiet);
    return list(format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
