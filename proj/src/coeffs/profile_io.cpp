#include "degenlab/profile_io.hpp"

#include <fstream>
#include <sstream>

#include "degenlab/error.hpp"

namespace degenlab {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(path + "." + key, "missing field");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

Interval interval(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected [lo, hi]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

Point point(const json& v, int dim, const std::string& path) {
  if (dim == 1) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 1) return {number(v[0], path), 0.0};
    throw SchemaError(path, "expected a coordinate");
  }
  if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected [x, y]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

json point_json(const Point& p, int dim) {
  if (dim == 1) return p[0];
  return json::array({p[0], p[1]});
}

CoefficientMatrix matrix(const json& v, int dim, const std::string& path) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return {dim, c, 0.0, dim == 2 ? c : 0.0};
  }
  if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
    throw SchemaError(path, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  }
  if (dim == 1) {
    const json& row = v[0];
    return {1, row.is_array() ? number(row.at(0), path) : number(row, path), 0.0, 0.0};
  }
  const double a = number(v[0].at(0), path), b = number(v[0].at(1), path);
  const double b2 = number(v[1].at(0), path), c = number(v[1].at(1), path);
  if (b != b2) throw SchemaError(path, "matrix must be symmetric");
  return {2, a, b, c};
}

}  // namespace

std::vector<CoefficientMatrix> load_coefficient_csv(const std::filesystem::path& path,
                                                    int dimension) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open coefficient CSV " + path.string());
  const std::size_t columns = dimension == 1 ? 1 : 3;
  std::vector<CoefficientMatrix> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (out.empty()) continue;  // header row
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": non-numeric entry");
    }
    if (vals.size() != columns) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(columns) + " columns");
    }
    if (dimension == 1) {
      out.push_back({1, vals[0], 0.0, 0.0});
    } else {
      out.push_back({2, vals[0], vals[1], vals[2]});
    }
  }
  return out;
}

CoefficientProfile profile_from_json(const json& doc, const std::filesystem::path& base_dir) {
  const std::string root = "profile";
  const json& dim_v = require(doc, "dimension", root);
  if (!dim_v.is_number_integer()) throw SchemaError(root + ".dimension", "expected 1 or 2");
  const int dim = dim_v.get<int>();
  if (dim != 1 && dim != 2) throw SchemaError(root + ".dimension", "expected 1 or 2");

  std::array<Interval, 2> domain{};
  const json& dom = require(doc, "domain", root);
  if (dim == 1) {
    domain[0] = interval(dom, root + ".domain");
  } else {
    if (!dom.is_array() || dom.size() != 2) throw SchemaError(root + ".domain", "expected [[a,b],[c,d]]");
    domain[0] = interval(dom[0], root + ".domain[0]");
    domain[1] = interval(dom[1], root + ".domain[1]");
  }

  const json& fam = require(doc, "family", root);
  const std::string fpath = root + ".family";
  const json& kind_v = require(fam, "kind", fpath);
  if (!kind_v.is_string()) throw SchemaError(fpath + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();

  Family family;
  if (kind == "power") {
    family::PowerDegenerate f;
    f.delta = number(require(fam, "delta", fpath), fpath + ".delta");
    const json& cs = require(fam, "centers", fpath);
    if (!cs.is_array()) throw SchemaError(fpath + ".centers", "expected a list of points");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      f.centers.push_back(point(cs[i], dim, fpath + ".centers[" + std::to_string(i) + "]"));
    }
    family = f;
  } else if (kind == "radial") {
    family::RadialShell f;
    f.delta = number(require(fam, "delta", fpath), fpath + ".delta");
    f.radius = number(require(fam, "radius", fpath), fpath + ".radius");
    family = f;
  } else if (kind == "surface") {
    family::SurfaceDegenerate f;
    f.delta = number(require(fam, "delta", fpath), fpath + ".delta");
    f.support = interval(require(fam, "support", fpath), fpath + ".support");
    const json& phi = require(fam, "phi", fpath);
    if (!phi.is_array()) throw SchemaError(fpath + ".phi", "expected samples");
    for (std::size_t i = 0; i < phi.size(); ++i) {
      f.phi.push_back(number(phi[i], fpath + ".phi[" + std::to_string(i) + "]"));
    }
    family = f;
  } else if (kind == "elliptic") {
    family::StronglyElliptic f;
    f.matrix = matrix(require(fam, "matrix", fpath), dim, fpath + ".matrix");
    family = f;
  } else if (kind == "sampled") {
    family::Sampled f;
    const json& pts = require(fam, "points", fpath);
    if (!pts.is_array() || pts.size() != static_cast<std::size_t>(dim)) {
      throw SchemaError(fpath + ".points", "expected one point count per axis");
    }
    f.points[0] = pts[0].get<std::size_t>();
    f.points[1] = dim == 2 ? pts[1].get<std::size_t>() : 1;
    if (fam.contains("csv")) {
      const auto rel = std::filesystem::path(fam.at("csv").get<std::string>());
      const auto path = rel.is_absolute() || base_dir.empty() ? rel : base_dir / rel;
      f.source = rel.string();
      f.entries = load_coefficient_csv(path, dim);
    } else if (fam.contains("entries")) {
      for (const auto& row : fam.at("entries")) {
        if (dim == 1) {
          f.entries.push_back({1, number(row.is_array() ? row.at(0) : row, fpath + ".entries"), 0, 0});
        } else {
          f.entries.push_back({2, number(row.at(0), fpath + ".entries"),
                               number(row.at(1), fpath + ".entries"),
                               number(row.at(2), fpath + ".entries")});
        }
      }
    } else {
      throw SchemaError(fpath + ".csv", "sampled family needs a csv path or inline entries");
    }
    family = f;
  } else {
    throw SchemaError(fpath + ".kind", "unknown family kind '" + kind + "'");
  }

  ProfileMetadata meta;
  if (doc.contains("metadata")) {
    const json& m = doc.at("metadata");
    if (m.contains("predicted_gamma")) meta.predicted_gamma = number(m.at("predicted_gamma"), root + ".metadata.predicted_gamma");
    if (m.contains("predicted_cuts")) {
      for (const auto& c : m.at("predicted_cuts")) meta.predicted_cuts.push_back(point(c, dim, root + ".metadata.predicted_cuts"));
    }
    if (m.contains("mu")) meta.mu = number(m.at("mu"), root + ".metadata.mu");
    if (m.contains("nu")) meta.nu = number(m.at("nu"), root + ".metadata.nu");
  }

  CoefficientProfile profile = [&] {
    try {
      return CoefficientProfile(dim, std::move(family), domain, meta);
    } catch (const ValidationError& e) {
      throw SchemaError(fpath, e.what());
    }
  }();
  if (doc.contains("epsilon")) {
    const double eps = number(doc.at("epsilon"), root + ".epsilon");
    if (eps < 0.0) throw SchemaError(root + ".epsilon", "must be nonnegative");
    profile = profile.viscosity_shift(eps);
  }
  return profile;
}

json profile_to_json(const CoefficientProfile& profile) {
  const int dim = profile.dimension();
  json doc;
  doc["dimension"] = dim;
  const auto& d = profile.domain();
  if (dim == 1) {
    doc["domain"] = json::array({d[0].lo, d[0].hi});
  } else {
    doc["domain"] = json::array({json::array({d[0].lo, d[0].hi}), json::array({d[1].lo, d[1].hi})});
  }
  json fam;
  fam["kind"] = profile.kind();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::PowerDegenerate>) {
          fam["delta"] = f.delta;
          fam["centers"] = json::array();
          for (const auto& c : f.centers) fam["centers"].push_back(point_json(c, dim));
        } else if constexpr (std::is_same_v<T, family::RadialShell>) {
          fam["delta"] = f.delta;
          fam["radius"] = f.radius;
        } else if constexpr (std::is_same_v<T, family::SurfaceDegenerate>) {
          fam["delta"] = f.delta;
          fam["support"] = json::array({f.support.lo, f.support.hi});
          fam["phi"] = f.phi;
        } else if constexpr (std::is_same_v<T, family::StronglyElliptic>) {
          if (dim == 1) {
            fam["matrix"] = json::array({json::array({f.matrix.xx})});
          } else {
            fam["matrix"] = json::array({json::array({f.matrix.xx, f.matrix.xy}),
                                         json::array({f.matrix.xy, f.matrix.yy})});
          }
        } else {
          fam["points"] = dim == 1 ? json::array({f.points[0]}) : json::array({f.points[0], f.points[1]});
          if (!f.source.empty()) {
            fam["csv"] = f.source;
          } else {
            fam["entries"] = json::array();
            for (const auto& m : f.entries) {
              if (dim == 1) {
                fam["entries"].push_back(m.xx);
              } else {
                fam["entries"].push_back(json::array({m.xx, m.xy, m.yy}));
              }
            }
          }
        }
      },
      profile.family());
  doc["family"] = fam;
  const auto& meta = profile.metadata();
  json m = json::object();
  if (meta.predicted_gamma) m["predicted_gamma"] = *meta.predicted_gamma;
  if (!meta.predicted_cuts.empty()) {
    m["predicted_cuts"] = json::array();
    for (const auto& c : meta.predicted_cuts) m["predicted_cuts"].push_back(point_json(c, dim));
  }
  if (meta.mu) m["mu"] = *meta.mu;
  if (meta.nu) m["nu"] = *meta.nu;
  if (!m.empty()) doc["metadata"] = m;
  if (profile.epsilon() != 0.0) doc["epsilon"] = profile.epsilon();
  return doc;
}

}  // namespace degenlab
