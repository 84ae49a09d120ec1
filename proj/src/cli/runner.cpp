#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>

#include <omp.h>

#include "degenlab/cli.hpp"
#include "degenlab/error.hpp"
#include "degenlab/profile_io.hpp"

namespace degenlab {

using nlohmann::json;

namespace {

Point as_point(const json& v, int dim) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 1) return {v[0].get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && dim == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw SchemaError("checks", "point does not match the dimension");
}

std::vector<Point> as_points(const json& v, int dim) {
  std::vector<Point> out;
  for (const auto& e : v) out.push_back(as_point(e, dim));
  return out;
}

std::vector<double> as_doubles(const json& v) { return v.get<std::vector<double>>(); }

std::vector<double> merged(const std::vector<double>& a, const std::vector<double>& b) {
  std::set<double> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

std::vector<unsigned char> omega_mask(const json& spec, const Mesh& mesh,
                                      const CoefficientProfile& profile) {
  std::vector<unsigned char> m(mesh.size(), 0);
  if (spec.contains("interval")) {
    const auto iv = spec.at("interval").get<std::vector<double>>();
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const double x = mesh.point(i)[0];
      m[i] = x >= iv[0] && x <= iv[1];
    }
  } else if (spec.contains("disc")) {
    const Point c = as_point(spec.at("disc").at("center"), mesh.dimension);
    const double r = spec.at("disc").at("radius").get<double>();
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const Point p = mesh.point(i);
      m[i] = std::hypot(p[0] - c[0], p[1] - c[1]) < r;
    }
  } else {
    const auto* f = std::get_if<family::SurfaceDegenerate>(&profile.family());
    if (!f || mesh.dimension != 2) throw SchemaError("checks.omega.surface", "needs a 2D surface profile");
    const bool below = spec.at("surface") == "below";
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const Point p = mesh.point(i);
      const double phi = (*f)(p[0]);
      m[i] = below ? p[1] < phi : p[1] > phi;
    }
  }
  return m;
}

SampleStrategy strategy_from(const json& params, std::span<const double> ts, double norm) {
  if (!params.contains("strategy")) return SampleStrategy::all();
  const json& s = params.at("strategy");
  if (s == "all") return SampleStrategy::all();
  if (s == "interior") {
    const double tmax = ts.empty() ? 0.0 : *std::max_element(ts.begin(), ts.end());
    return SampleStrategy::interior(interior_margin(tmax, norm));
  }
  if (s.contains("interior")) return SampleStrategy::interior(s.at("interior").get<double>());
  const auto w = s.at("window").get<std::vector<double>>();
  return SampleStrategy::within({w.at(0), w.at(1)});
}

std::vector<double> times_or(const json& params, const std::vector<double>& fallback) {
  if (params.contains("times")) return as_doubles(params.at("times"));
  return fallback;
}

std::string suffix(const Scenario& s, std::size_t k) {
  if (s.epsilons.size() <= 1) return "";
  return "[eps" + std::to_string(k) + "]";
}

struct Context {
  const Scenario& scenario;
  const CoefficientProfile& profile;
  const Mesh& mesh;
  double epsilon;
};

/// Runs one check against the operator at one epsilon.
std::vector<CheckResult> run_operator_check(const CheckSpec& c, const Context& ctx,
                                            const DiscreteOperator& A,
                                            std::unique_ptr<Semigroup>& semigroup) {
  const json& p = c.params;
  const Mesh& mesh = ctx.mesh;
  const int dim = mesh.dimension;
  const double norm = ctx.profile.norm() + ctx.epsilon;
  const auto& sc = ctx.scenario;
  auto S = [&]() -> const Semigroup& {
    if (!semigroup) semigroup = std::make_unique<Semigroup>(A);
    return *semigroup;
  };
  std::vector<CheckResult> out;
  if (c.name == "markov") {
    out.push_back(markov_record(A, sc.seed));
  } else if (c.name == "conservation") {
    const auto ts = times_or(p, merged(sc.t_small, sc.t_large));
    std::vector<unsigned char> mask;
    if (p.contains("omega")) mask = omega_mask(p.at("omega"), mesh, ctx.profile);
    out.push_back(conservation_defect(A, ts, mask, {}, p.value("tolerance", 1e-9)));
  } else if (c.name == "semigroup") {
    out.push_back(semigroup_invariants(A, sc.seed, p.value("samples", 4)));
  } else if (c.name == "invariance") {
    const auto mask = omega_mask(p.at("omega"), mesh, ctx.profile);
    out.push_back(invariance_defect(A, mask, p.value("t", 1.0), sc.seed, p.value("tolerance", 1e-8)));
  } else if (c.name == "form_additivity") {
    const auto mask = omega_mask(p.at("omega"), mesh, ctx.profile);
    out.push_back(form_additivity_defect(A, mask, sc.seed, p.value("tolerance", 1e-12)));
  } else if (c.name == "offdiagonal") {
    const auto centers = as_points(p.at("centers"), dim);
    const auto radii = as_doubles(p.at("radii"));
    const auto pairs = make_ball_pairs(ctx.profile, mesh, centers, radii, ctx.epsilon,
                                       p.value("min_cells", std::size_t{8}));
    out.push_back(offdiagonal_gaussian_check(S(), pairs, times_or(p, sc.t_small)));
  } else if (c.name == "offdiagonal_euclidean") {
    const auto sets = make_set_pairs(mesh, as_points(p.at("centers"), dim), p.at("half_width").get<double>());
    out.push_back(euclidean_offdiagonal_check(S(), sets, times_or(p, sc.t_small), norm));
  } else if (c.name == "wave_speed") {
    DistanceOptions dopt;
    dopt.weighting = EdgeWeighting::Midpoint;
    const auto field = distance_field(ctx.profile, mesh, as_point(p.at("source"), dim), ctx.epsilon, dopt);
    WaveCheckOptions wo;
    wo.source_radius = p.value("radius", 0.5);
    wo.bump_power = p.value("power", 4);
    wo.wave.cfl_safety = p.value("cfl", 0.5);
    std::vector<unsigned char> forbidden;
    if (p.contains("forbidden")) forbidden = omega_mask(p.at("forbidden"), mesh, ctx.profile);
    out.push_back(wave_speed_check(A, field, as_doubles(p.at("times")), wo, forbidden));
  } else if (c.name == "smalltime_decay") {
    const double gamma = p.value("gamma", ctx.profile.metadata().predicted_gamma.value_or(1.0));
    const auto ts = times_or(p, sc.t_small);
    out.push_back(smalltime_decay_fit(A, ts, gamma, norm, strategy_from(p, ts, norm)));
  } else if (c.name == "largetime_floor") {
    const auto ts = times_or(p, sc.t_large);
    for (auto& r : largetime_floor_check(A, ts, p.at("floor").get<double>(), strategy_from(p, ts, norm),
                                         p.value("growth_factor", 3.0))) {
      out.push_back(std::move(r));
    }
  } else if (c.name == "largetime_gaussian") {
    const auto ts = times_or(p, sc.t_large);
    out.push_back(largetime_gaussian_check(A, ts, strategy_from(p, ts, norm)));
  } else if (c.name == "resolvent_volume") {
    DistanceOptions dopt;
    dopt.weighting = EdgeWeighting::Midpoint;
    const auto field = distance_field(ctx.profile, mesh, as_point(p.at("origin"), dim), ctx.epsilon, dopt);
    ResolventScalingOptions ro;
    ro.m = p.value("m", 1);
    ro.radii = p.value("radii", std::size_t{14});
    ro.min_cells = p.value("min_cells", std::size_t{16});
    ro.max_fraction = p.value("max_fraction", 0.2);
    out.push_back(resolvent_volume_scaling(A, field, ro));
  } else if (c.name == "ondiagonal_lower") {
    out.push_back(ondiagonal_lower_check(S(), p.value("t", 1.0), p.at("diameter").get<double>(),
                                         as_points(p.at("centers"), dim), p.value("separated", false)));
  } else {
    throw SchemaError("checks", "unknown check '" + c.name + "'");
  }
  return out;
}

bool profile_level(const std::string& name) {
  return name == "separation" || name == "classification" || name == "holder_fit";
}

CheckResult run_profile_check(const CheckSpec& c, const CoefficientProfile& profile) {
  const json& p = c.params;
  if (c.name == "classification") return classification_record(profile);
  if (c.name == "separation") {
    SeparationConfig cfg;
    cfg.cut = p.value("cut", 0.0);
    cfg.time = p.value("time", 1.0);
    if (p.contains("levels")) cfg.levels = p.at("levels").get<std::vector<int>>();
    if (p.contains("epsilons")) cfg.epsilons = as_doubles(p.at("epsilons"));
    if (p.contains("box")) {
      const auto b = as_doubles(p.at("box"));
      cfg.box = {b.at(0), b.at(1)};
    }
    cfg.steps = p.value("steps", std::size_t{200});
    std::optional<SeparationVerdict> expected;
    if (p.contains("expected")) {
      expected = p.at("expected") == "separating" ? SeparationVerdict::Separating
                                                  : SeparationVerdict::NonSeparating;
    }
    return separation_record(profile, cfg, expected);
  }
  // holder_fit
  const auto start = std::chrono::steady_clock::now();
  const auto range = as_doubles(p.at("range"));
  const auto fit = holder_fit(profile, p.at("origin").get<double>(), {range.at(0), range.at(1)},
                              p.value("samples", std::size_t{16}), 0.0, p.value("side", 1.0));
  CheckResult res;
  auto& r = res.record;
  r.name = "holder_fit";
  r.anchor = "d_C(x0; x0 + y) ~ y^gamma near a zero of c";
  r.value = fit.gamma_hat;
  r.label = "fitted exponent";
  r.witness = {{"a_hat", fit.a_hat}, {"residual", fit.residual}, {"samples", fit.samples}};
  if (p.contains("expected_gamma")) {
    const double g = p.at("expected_gamma").get<double>();
    const double tol = p.value("tolerance", 0.02);
    r.status = std::abs(fit.gamma_hat - g) <= tol ? Status::Holds : Status::Violated;
    r.witness["expected"] = g;
    r.witness["tolerance"] = tol;
  } else {
    r.status = Status::Fitted;
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

struct PlotRule {
  std::string table;
  std::string x, y, group;
  bool logx, logy;
};

void write_plots(const DiagnosticsReport& report, const std::filesystem::path& dir) {
  static const std::vector<PlotRule> rules{
      {"smalltime_decay", "t", "sup_kernel", "", true, true},
      {"largetime_floor", "t", "sup_kernel", "", true, true},
      {"largetime_gaussian", "t", "sup_kernel", "", true, true},
      {"separation_leakage", "h", "leakage", "epsilon", true, true},
      {"resolvent_volume", "ball_volume", "kernel", "", true, true},
      {"wave_speed", "t", "extent", "", false, false},
      {"conservation", "t", "defect", "", true, false},
  };
  for (const auto& t : report.tables) {
    for (const auto& rule : rules) {
      if (t.name.rfind(rule.table, 0) != 0) continue;
      auto col = [&](const std::string& n) -> int {
        for (std::size_t k = 0; k < t.columns.size(); ++k) {
          if (t.columns[k] == n) return static_cast<int>(k);
        }
        return -1;
      };
      const int cx = col(rule.x), cy = col(rule.y), cg = rule.group.empty() ? -1 : col(rule.group);
      if (cx < 0 || cy < 0) continue;
      std::vector<PlotSeries> series;
      for (const auto& row : t.rows) {
        const std::string g = cg < 0 ? rule.y : rule.group + "=" + format_cell(row[cg]);
        auto it = std::find_if(series.begin(), series.end(), [&](const PlotSeries& s) { return s.label == g; });
        if (it == series.end()) {
          series.push_back({g, {}, {}});
          it = series.end() - 1;
        }
        const auto* x = std::get_if<double>(&row[cx]);
        const auto* y = std::get_if<double>(&row[cy]);
        if (x && y) {
          it->x.push_back(*x);
          it->y.push_back(*y);
        }
      }
      write_svg_plot(dir / (t.name + ".svg"), t.name, rule.x, rule.y, series, rule.logx, rule.logy);
      break;
    }
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options) {
  if (options.threads > 0) omp_set_num_threads(options.threads);
  const auto profile = profile_from_json(scenario.profile, scenario.base_dir);
  const auto box = scenario.mesh.box.value_or(profile.domain());
  const Mesh mesh = build_mesh(profile.dimension(), box, scenario.mesh.n);

  RunOutcome outcome;
  auto& report = outcome.report;
  report.scenario = scenario.name;
  report.environment = {
      {"scenario", scenario.name},
      {"dimension", static_cast<double>(mesh.dimension)},
      {"n", static_cast<double>(mesh.n)},
      {"points", static_cast<double>(mesh.size())},
      {"h", mesh.spacing(0)},
      {"box_lo", box[0].lo},
      {"box_hi", box[0].hi},
      {"sampling", scenario.mesh.sampling == FaceSampling::Midpoint ? "midpoint" : "edge-harmonic"},
      {"seed", static_cast<double>(scenario.seed)},
      {"perturbations", static_cast<double>(scenario.perturbations.size())},
  };
  for (std::size_t k = 0; k < scenario.epsilons.size(); ++k) {
    report.environment.emplace_back("epsilon" + std::to_string(k), scenario.epsilons[k]);
  }
  if (!scenario.t_small.empty()) {
    report.environment.emplace_back("t_small_min", scenario.t_small.front());
    report.environment.emplace_back("t_small_max", scenario.t_small.back());
  }
  if (!scenario.t_large.empty()) {
    report.environment.emplace_back("t_large_min", scenario.t_large.front());
    report.environment.emplace_back("t_large_max", scenario.t_large.back());
  }

  for (const auto& c : scenario.checks) {
    if (profile_level(c.name)) report.add(run_profile_check(c, profile));
  }
  AssemblyOptions aopt;
  aopt.sampling = scenario.mesh.sampling;
  for (std::size_t k = 0; k < scenario.epsilons.size(); ++k) {
    const double eps = scenario.epsilons[k];
    DiscreteOperator A = assemble(profile, mesh, eps, aopt);
    for (const auto& q : scenario.perturbations) {
      if (q.kind == Perturbation::Kind::Diagonal) {
        if (q.index >= A.size()) throw SchemaError("perturb.index", "node index out of range");
        A = A.with_diagonal_perturbation(q.index, q.value);
      } else {
        A = A.with_face_conductance(q.axis, q.index, q.value);
      }
    }
    const Context ctx{scenario, profile, mesh, A.epsilon()};
    std::unique_ptr<Semigroup> semigroup;
    for (const auto& c : scenario.checks) {
      if (profile_level(c.name)) continue;
      for (auto& r : run_operator_check(c, ctx, A, semigroup)) {
        r.record.name += suffix(scenario, k);
        for (auto& t : r.tables) t.name += suffix(scenario, k);
        report.add(std::move(r));
      }
    }
  }
  outcome.exit_code = report.any_violated() ? 2 : 0;

  outcome.out_dir = !options.out_dir.empty()    ? options.out_dir
                    : !scenario.output.empty() ? std::filesystem::path(scenario.output)
                                               : std::filesystem::path("out") / scenario.name;
  if (options.write) {
    report.write(outcome.out_dir);
    if (options.plots) write_plots(report, outcome.out_dir);
    json meta;
    meta["timestamp"] = utc_timestamp();
    meta["threads"] = omp_get_max_threads();
    meta["scenario"] = scenario_to_json(scenario);
    meta["runtime_seconds"] = json::object();
    for (const auto& r : report.records) meta["runtime_seconds"][r.name] = r.runtime_seconds;
    std::ofstream(outcome.out_dir / "metadata.json") << meta.dump(2) << '\n';
  }
  return outcome;
}

}  // namespace degenlab
