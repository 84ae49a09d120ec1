#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "degenlab/diagnose.hpp"
#include "degenlab/error.hpp"

namespace degenlab {

std::string to_string(Status s) {
  switch (s) {
    case Status::Holds: return "holds";
    case Status::Violated: return "violated";
    case Status::Fitted: return "fitted";
    case Status::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", std::get<double>(c));
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (!std::isfinite(v)) return format_cell(c);
  return v;
}

Table checks_table(const std::vector<CheckRecord>& records) {
  Table t{"checks", {"name", "statement", "status", "label", "value", "stderr"}, {}};
  for (const auto& r : records) {
    t.rows.push_back({r.name, r.anchor, to_string(r.status), r.label, r.value, r.stderr_value});
  }
  return t;
}

Table environment_table(const std::vector<std::pair<std::string, Cell>>& env) {
  Table t{"environment", {"key", "value"}, {}};
  for (const auto& [k, v] : env) t.rows.push_back({k, v});
  return t;
}

}  // namespace

void Table::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << csv_escape(columns[k]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_escape(format_cell(row[k]));
    out << '\n';
  }
}

void DiagnosticsReport::add(CheckResult result) {
  const std::string base_name = result.record.name;
  for (int k = 2; std::any_of(records.begin(), records.end(),
                              [&](const CheckRecord& o) { return o.name == result.record.name; });
       ++k) {
    result.record.name = base_name + "_" + std::to_string(k);
  }
  for (auto& t : result.tables) {
    const std::string base = t.name;
    for (int k = 2; std::any_of(tables.begin(), tables.end(), [&](const Table& o) { return o.name == t.name; }); ++k) {
      t.name = base + "_" + std::to_string(k);
    }
    result.record.tables.push_back(t.name);
    tables.push_back(std::move(t));
  }
  records.push_back(std::move(result.record));
}

bool DiagnosticsReport::any_violated() const {
  for (const auto& r : records) {
    if (r.status == Status::Violated) return true;
  }
  return false;
}

nlohmann::json DiagnosticsReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["environment"] = nlohmann::json::object();
  for (const auto& [k, v] : environment) j["environment"][k] = cell_json(v);
  j["checks"] = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json c;
    c["name"] = r.name;
    c["anchor"] = r.anchor;
    c["status"] = to_string(r.status);
    c["label"] = r.label;
    c["value"] = cell_json(r.value);
    c["stderr"] = cell_json(r.stderr_value);
    c["witness"] = r.witness;
    c["tables"] = r.tables;
    j["checks"].push_back(std::move(c));
  }
  j["violated"] = any_violated();
  return j;
}

std::string DiagnosticsReport::to_markdown() const {
  std::ostringstream md;
  md << "# Diagnostics: " << scenario << "\n\n";
  md << "## Environment\n\n| key | value |\n|---|---|\n";
  for (const auto& [k, v] : environment) md << "| " << k << " | " << format_cell(v) << " |\n";
  md << "\n## Checks\n\n| check | statement | status | label | value | stderr |\n"
        "|---|---|---|---|---|---|\n";
  for (const auto& r : records) {
    md << "| " << r.name << " | " << r.anchor << " | " << to_string(r.status) << " | " << r.label
       << " | " << format_cell(r.value) << " | " << format_cell(r.stderr_value) << " |\n";
  }
  if (!tables.empty()) {
    md << "\n## Tables\n\n";
    for (const auto& t : tables) md << "- `" << t.name << ".csv`\n";
  }
  md << "\nOverall: " << (any_violated() ? "violated" : "no violations") << "\n";
  return md.str();
}

void DiagnosticsReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw ValidationError("cannot write report.json in " + dir.string());
    out << to_json().dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "report.md");
    if (!out) throw ValidationError("cannot write report.md in " + dir.string());
    out << to_markdown();
  }
  checks_table(records).write_csv(dir / "checks.csv");
  environment_table(environment).write_csv(dir / "environment.csv");
  for (const auto& t : tables) t.write_csv(dir / (t.name + ".csv"));
}

}  // namespace degenlab
