#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "degenlab/cli.hpp"
#include "degenlab/error.hpp"
#include "degenlab/profile_io.hpp"

namespace degenlab {

using nlohmann::json;

namespace {

// Parameter keys accepted by each check.
const std::map<std::string, std::set<std::string>>& check_params() {
  static const std::map<std::string, std::set<std::string>> table{
      {"markov", {}},
      {"conservation", {"times", "omega", "tolerance"}},
      {"semigroup", {"samples"}},
      {"invariance", {"omega", "t", "tolerance"}},
      {"form_additivity", {"omega", "tolerance"}},
      {"offdiagonal", {"centers", "radii", "times", "min_cells"}},
      {"offdiagonal_euclidean", {"centers", "half_width", "times"}},
      {"wave_speed", {"source", "radius", "times", "power", "cfl", "forbidden"}},
      {"separation", {"cut", "time", "levels", "epsilons", "box", "steps", "expected"}},
      {"classification", {}},
      {"smalltime_decay", {"gamma", "times", "strategy"}},
      {"largetime_floor", {"floor", "times", "strategy", "growth_factor"}},
      {"largetime_gaussian", {"times", "strategy"}},
      {"resolvent_volume", {"origin", "m", "radii", "min_cells", "max_fraction"}},
      {"ondiagonal_lower", {"t", "diameter", "centers", "separated"}},
      {"holder_fit", {"origin", "range", "samples", "side", "expected_gamma", "tolerance"}},
  };
  return table;
}

const std::map<std::string, std::vector<std::string>>& required_params() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"invariance", {"omega"}},
      {"form_additivity", {"omega"}},
      {"offdiagonal", {"centers", "radii"}},
      {"offdiagonal_euclidean", {"centers", "half_width"}},
      {"wave_speed", {"source", "times"}},
      {"largetime_floor", {"floor"}},
      {"resolvent_volume", {"origin"}},
      {"ondiagonal_lower", {"diameter", "centers"}},
      {"holder_fit", {"origin", "range"}},
  };
  return table;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

std::vector<double> times(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected a list of times");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = number(v[i], path + "[" + std::to_string(i) + "]");
    if (!(t > 0.0) || !std::isfinite(t)) throw SchemaError(path + "[" + std::to_string(i) + "]", "times must be positive");
    out.push_back(t);
  }
  return out;
}

Interval interval(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected [lo, hi]");
  Interval r{number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  if (!(r.hi > r.lo)) throw SchemaError(path, "expected lo < hi");
  return r;
}

void validate_omega(const json& v, const std::string& path) {
  if (!v.is_object() || v.size() != 1) throw SchemaError(path, "expected one of interval, disc, surface");
  if (v.contains("interval")) {
    interval(v.at("interval"), path + ".interval");
  } else if (v.contains("disc")) {
    const json& d = v.at("disc");
    if (!d.is_object() || !d.contains("center") || !d.contains("radius")) {
      throw SchemaError(path + ".disc", "expected {center, radius}");
    }
    number(d.at("radius"), path + ".disc.radius");
  } else if (v.contains("surface")) {
    const json& s = v.at("surface");
    if (!s.is_string() || (s != "below" && s != "above")) throw SchemaError(path + ".surface", "expected below or above");
  } else {
    throw SchemaError(path, "expected one of interval, disc, surface");
  }
}

void validate_check(const CheckSpec& c, const std::string& path) {
  const auto& table = check_params();
  const auto it = table.find(c.name);
  if (it == table.end()) throw SchemaError(path + ".name", "unknown check '" + c.name + "'");
  for (const auto& [key, value] : c.params.items()) {
    if (!it->second.count(key)) throw SchemaError(path + "." + key, "unknown parameter for " + c.name);
  }
  if (const auto req = required_params().find(c.name); req != required_params().end()) {
    for (const auto& key : req->second) {
      if (!c.params.contains(key)) throw SchemaError(path + "." + key, "missing field");
    }
  }
  for (const char* key : {"times"}) {
    if (c.params.contains(key)) times(c.params.at(key), path + "." + key);
  }
  for (const char* key : {"t", "time", "diameter", "radius", "half_width", "floor"}) {
    if (c.params.contains(key)) {
      const double v = number(c.params.at(key), path + "." + key);
      if (!(v > 0.0)) throw SchemaError(path + "." + key, "must be positive");
    }
  }
  for (const char* key : {"omega", "forbidden"}) {
    if (c.params.contains(key)) validate_omega(c.params.at(key), path + "." + key);
  }
  if (c.params.contains("gamma")) {
    const double g = number(c.params.at("gamma"), path + ".gamma");
    if (!(g > 0.0 && g <= 1.0)) throw SchemaError(path + ".gamma", "must lie in (0, 1]");
  }
  if (c.params.contains("m")) {
    if (!c.params.at("m").is_number_integer() || c.params.at("m").get<int>() < 1) {
      throw SchemaError(path + ".m", "expected a positive integer");
    }
  }
  if (c.params.contains("expected")) {
    const json& e = c.params.at("expected");
    if (!e.is_string() || (e != "separating" && e != "non-separating")) {
      throw SchemaError(path + ".expected", "expected separating or non-separating");
    }
  }
  if (c.params.contains("strategy")) {
    const json& s = c.params.at("strategy");
    const bool ok = (s.is_string() && (s == "all" || s == "interior")) ||
                    (s.is_object() && s.size() == 1 && (s.contains("interior") || s.contains("window")));
    if (!ok) throw SchemaError(path + ".strategy", "expected all, interior, {interior: m} or {window: [a, b]}");
  }
}

std::string sampling_name(FaceSampling s) {
  return s == FaceSampling::Midpoint ? "midpoint" : "edge-harmonic";
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : check_params()) v.push_back(k);
    return v;
  }();
  return names;
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw SchemaError("scenario", "expected an object");
  static const std::set<std::string> keys{"name", "anchor", "profile", "mesh", "perturb", "epsilon",
                                          "t_small", "t_large", "checks", "seed", "output"};
  for (const auto& [key, _] : doc.items()) {
    if (!keys.count(key)) throw SchemaError(key, "unknown field");
  }
  Scenario s;
  s.base_dir = base_dir;
  if (!doc.contains("name") || !doc.at("name").is_string() || doc.at("name").get<std::string>().empty()) {
    throw SchemaError("name", "expected a nonempty string");
  }
  s.name = doc.at("name").get<std::string>();
  if (doc.contains("anchor")) {
    if (!doc.at("anchor").is_string()) throw SchemaError("anchor", "expected a string");
    s.anchor = doc.at("anchor").get<std::string>();
  }
  if (!doc.contains("profile")) throw SchemaError("profile", "missing field");
  s.profile = doc.at("profile");
  const CoefficientProfile profile = profile_from_json(s.profile, base_dir);

  if (!doc.contains("mesh") || !doc.at("mesh").is_object()) throw SchemaError("mesh", "expected an object");
  const json& m = doc.at("mesh");
  for (const auto& [key, _] : m.items()) {
    if (key != "n" && key != "box" && key != "sampling") throw SchemaError("mesh." + key, "unknown field");
  }
  if (!m.contains("n") || !m.at("n").is_number_integer() || m.at("n").get<long long>() < 8) {
    throw SchemaError("mesh.n", "expected an integer >= 8");
  }
  s.mesh.n = m.at("n").get<std::size_t>();
  if (m.contains("box")) {
    std::array<Interval, 2> box{};
    if (profile.dimension() == 1) {
      box[0] = interval(m.at("box"), "mesh.box");
    } else {
      const json& b = m.at("box");
      if (!b.is_array() || b.size() != 2) throw SchemaError("mesh.box", "expected [[a,b],[c,d]]");
      box[0] = interval(b[0], "mesh.box[0]");
      box[1] = interval(b[1], "mesh.box[1]");
    }
    s.mesh.box = box;
  }
  if (m.contains("sampling")) {
    const json& v = m.at("sampling");
    if (v == "midpoint") {
      s.mesh.sampling = FaceSampling::Midpoint;
    } else if (v == "edge-harmonic") {
      s.mesh.sampling = FaceSampling::EdgeHarmonic;
    } else {
      throw SchemaError("mesh.sampling", "expected midpoint or edge-harmonic");
    }
  }

  if (doc.contains("perturb")) {
    const json& p = doc.at("perturb");
    if (!p.is_array()) throw SchemaError("perturb", "expected a list");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string path = "perturb[" + std::to_string(i) + "]";
      const json& e = p[i];
      if (!e.is_object() || !e.contains("kind")) throw SchemaError(path + ".kind", "missing field");
      Perturbation q;
      if (e.at("kind") == "diagonal") {
        q.kind = Perturbation::Kind::Diagonal;
        if (!e.contains("index") || !e.contains("value")) throw SchemaError(path, "expected index and value");
      } else if (e.at("kind") == "face") {
        q.kind = Perturbation::Kind::Face;
        if (!e.contains("index") || !e.contains("value")) throw SchemaError(path, "expected index and value");
        q.axis = e.value("axis", 0);
      } else {
        throw SchemaError(path + ".kind", "expected diagonal or face");
      }
      if (!e.at("index").is_number_integer()) throw SchemaError(path + ".index", "expected an integer");
      q.index = e.at("index").get<std::size_t>();
      q.value = number(e.at("value"), path + ".value");
      s.perturbations.push_back(q);
    }
  }

  if (doc.contains("epsilon")) {
    const json& e = doc.at("epsilon");
    s.epsilons.clear();
    if (e.is_number()) {
      s.epsilons.push_back(e.get<double>());
    } else if (e.is_array() && !e.empty()) {
      for (std::size_t i = 0; i < e.size(); ++i) s.epsilons.push_back(number(e[i], "epsilon[" + std::to_string(i) + "]"));
    } else {
      throw SchemaError("epsilon", "expected a number or a nonempty list");
    }
    for (double v : s.epsilons) {
      if (!(v >= 0.0)) throw SchemaError("epsilon", "must be nonnegative");
    }
  }
  if (doc.contains("t_small")) s.t_small = times(doc.at("t_small"), "t_small");
  if (doc.contains("t_large")) s.t_large = times(doc.at("t_large"), "t_large");

  if (!doc.contains("checks") || !doc.at("checks").is_array()) throw SchemaError("checks", "expected a list");
  const json& checks = doc.at("checks");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string path = "checks[" + std::to_string(i) + "]";
    const json& c = checks[i];
    CheckSpec spec;
    if (c.is_string()) {
      spec.name = c.get<std::string>();
    } else if (c.is_object() && c.contains("name") && c.at("name").is_string()) {
      spec.name = c.at("name").get<std::string>();
      for (const auto& [key, value] : c.items()) {
        if (key != "name") spec.params[key] = value;
      }
    } else {
      throw SchemaError(path + ".name", "expected a check name");
    }
    validate_check(spec, path);
    s.checks.push_back(std::move(spec));
  }

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw SchemaError("seed", "expected a nonnegative integer");
    s.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw SchemaError("output", "expected a path");
    s.output = doc.at("output").get<std::string>();
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  if (!s.anchor.empty()) doc["anchor"] = s.anchor;
  doc["profile"] = s.profile;
  json m;
  m["n"] = s.mesh.n;
  if (s.mesh.box) {
    const auto& b = *s.mesh.box;
    if (s.profile.value("dimension", 1) == 1) {
      m["box"] = json::array({b[0].lo, b[0].hi});
    } else {
      m["box"] = json::array({json::array({b[0].lo, b[0].hi}), json::array({b[1].lo, b[1].hi})});
    }
  }
  m["sampling"] = sampling_name(s.mesh.sampling);
  doc["mesh"] = m;
  if (!s.perturbations.empty()) {
    json p = json::array();
    for (const auto& q : s.perturbations) {
      json e{{"kind", q.kind == Perturbation::Kind::Diagonal ? "diagonal" : "face"},
             {"index", q.index},
             {"value", q.value}};
      if (q.kind == Perturbation::Kind::Face) e["axis"] = q.axis;
      p.push_back(e);
    }
    doc["perturb"] = p;
  }
  doc["epsilon"] = s.epsilons;
  doc["t_small"] = s.t_small;
  doc["t_large"] = s.t_large;
  doc["checks"] = json::array();
  for (const auto& c : s.checks) {
    json e = c.params;
    e["name"] = c.name;
    doc["checks"].push_back(e);
  }
  doc["seed"] = s.seed;
  if (!s.output.empty()) doc["output"] = s.output;
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(path.filename().string() + ":" + std::to_string(line) + ":" + std::to_string(col),
                      "malformed JSON");
  }
  return scenario_from_json(doc, path.parent_path());
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ArgumentError("override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::string& p = parts[k];
    const bool last = k + 1 == parts.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw ArgumentError("override path '" + key + "' indexes a list with '" + p + "'");
      }
      if (idx >= node->size()) throw ArgumentError("override index out of range in '" + key + "'");
      node = &(*node)[idx];
    } else {
      if (!node->is_object()) throw ArgumentError("override path '" + key + "' descends into a scalar");
      node = &(*node)[p];
    }
    if (last) *node = value;
  }
}

}  // namespace degenlab
