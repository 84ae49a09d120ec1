// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance --criterion k   (k = 1..9, or 0 for all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "degenlab/cli.hpp"
#include "degenlab/diagnose.hpp"
#include "degenlab/profile_io.hpp"

using namespace degenlab;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CoefficientProfile power_1d(double delta, std::vector<double> centers, double lo, double hi) {
  json c = json::array();
  for (double x : centers) c.push_back(x);
  return profile_from_json({{"dimension", 1},
                            {"family", {{"kind", "power"}, {"delta", delta}, {"centers", c}}},
                            {"domain", {lo, hi}}});
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = a * std::pow(b / a, static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return v;
}

bool is_sabotage(const Scenario& s) { return !s.perturbations.empty(); }

/// Runs a builtin restricted to the named checks, without writing output.
DiagnosticsReport run_only(Scenario s, const std::set<std::string>& keep) {
  std::vector<CheckSpec> checks;
  for (auto& c : s.checks) {
    if (keep.count(c.name)) checks.push_back(c);
  }
  s.checks = std::move(checks);
  RunOptions o;
  o.write = false;
  o.plots = false;
  return run_scenario(s, o).report;
}

// ---------------------------------------------------------------------------

void criterion_1(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = power_1d(0.0, {0.0}, -8.0, 8.0);
  const auto mesh = build_mesh(1, p.domain(), 4096);
  const auto A = assemble(p, mesh, 0.0);
  const double t = 0.1;
  const std::size_t src = mesh.nearest({0.0, 0.0});
  const auto col = kernel_column(A, src, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double x = mesh.point(i)[0];
    if (std::abs(x) > 3.0) continue;
    const double g = std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
    worst = std::max(worst, std::abs(col.values[i] - g) / g);
  }
  o.require(worst < 0.02, "kernel column relative error");

  const double target = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  const auto times = logspace(0.01, 1.0, 9);
  const auto series = sup_kernel_series(A, times, SampleStrategy::interior(interior_margin(1.0, 1.0)));
  double sup_dev = 0.0;
  for (const auto& s : series) sup_dev = std::max(sup_dev, std::abs(s.value * std::sqrt(s.time) / target - 1.0));
  o.require(sup_dev <= 0.05, "sup t^1/2 deviation");

  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, "runtime");
  o.detail << "column_rel_err=" << worst << " sup_dev=" << sup_dev << " runtime_s=" << elapsed;
}

void criterion_2(Outcome& o) {
  double worst = 0.0;
  std::size_t scenarios = 0;
  for (const auto& s0 : builtin_scenarios()) {
    if (is_sabotage(s0)) continue;
    Scenario s = s0;
    s.checks = {CheckSpec{"conservation", json::object()}};
    RunOptions ro;
    ro.write = false;
    ro.plots = false;
    const auto rep = run_scenario(s, ro).report;
    for (const auto& r : rep.records) {
      worst = std::max(worst, r.value);
      o.require(r.status == Status::Holds, s.name + " " + r.name);
    }
    ++scenarios;
  }
  o.require(worst < 1e-9, "max defect");
  o.detail << "scenarios=" << scenarios << " max_defect=" << worst;
}

void criterion_3(Outcome& o) {
  for (const auto& s : builtin_scenarios()) {
    if (is_sabotage(s)) continue;
    const auto rep = run_only(s, {"offdiagonal", "offdiagonal_euclidean"});
    if (rep.records.empty()) continue;
    for (const auto& r : rep.records) {
      const auto evaluated = r.witness.value("evaluated", std::size_t{0});
      const auto violations = r.witness.value("violations", std::size_t{0});
      o.require(r.status == Status::Holds && violations == 0, s.name + " " + r.name + " violated");
      if (r.name.rfind("offdiagonal_gaussian", 0) == 0) {
        o.require(evaluated >= 50, s.name + " fewer than 50 combinations");
      }
      o.detail << s.name << ":" << r.name << " n=" << evaluated << " margin=" << r.value << "; ";
    }
  }
}

void criterion_4(Outcome& o) {
  const std::vector<double> times{0.5, 1.0, 2.0, 4.0};
  for (double delta : {0.0, 0.5}) {
    const auto p = power_1d(delta, {0.0}, -8.0, 8.0);
    const auto mesh = build_mesh(1, p.domain(), 1024);
    const auto A = assemble(p, mesh, 0.0);
    DistanceOptions dopt;
    dopt.weighting = EdgeWeighting::Midpoint;
    const auto field = distance_field(p, mesh, {-3.0, 0.0}, 0.0, dopt);
    const auto r = wave_speed_check(A, field, times);
    o.require(r.record.status == Status::Holds, "speed at delta " + std::to_string(delta));
    o.detail << "delta=" << delta << " speed=" << r.record.value << "; ";
  }
  // Exact cut: nothing may reach the far side.
  const auto p = power_1d(0.75, {0.0}, -8.0, 8.0);
  const auto mesh = build_mesh(1, p.domain(), 1023);
  const auto A = assemble(p, mesh, 0.0);
  DistanceOptions dopt;
  dopt.weighting = EdgeWeighting::Midpoint;
  const auto field = distance_field(p, mesh, {-3.0, 0.0}, 0.0, dopt);
  std::vector<unsigned char> forbidden(mesh.size(), 0);
  for (std::size_t i = 0; i < mesh.size(); ++i) forbidden[i] = mesh.point(i)[0] > 0.0;
  const auto r = wave_speed_check(A, field, std::vector<double>{0.5, 1.0, 2.0, 4.0, 8.0}, {}, forbidden);
  o.require(r.record.status == Status::Holds, "excitation beyond the cut");
  o.detail << "cut status=" << to_string(r.record.status);
}

void criterion_5(Outcome& o) {
  struct Case {
    double delta;
    SeparationVerdict expected;
  };
  for (const Case c : {Case{0.5, SeparationVerdict::Separating}, Case{0.75, SeparationVerdict::Separating},
                       Case{0.1, SeparationVerdict::NonSeparating},
                       Case{0.25, SeparationVerdict::NonSeparating}}) {
    const auto p = power_1d(c.delta, {0.0}, -4.0, 4.0);
    SeparationConfig cfg;
    const auto probe = separation_probe(p, cfg);
    const auto& leak = probe.leakage.at(0);
    const std::string tag = "delta " + std::to_string(c.delta);
    o.require(probe.verdict == c.expected, tag + " verdict");
    o.require(leak.size() >= 6, tag + " levels");
    if (c.expected == SeparationVerdict::Separating) {
      bool monotone = true;
      for (std::size_t k = 1; k < leak.size(); ++k) monotone = monotone && leak[k] < leak[k - 1];
      o.require(monotone, tag + " monotone decrease");
      if (c.delta == 0.5) o.require(leak.size() >= 7, tag + " needs 7 levels");
    } else {
      const double a = leak[leak.size() - 2], b = leak.back();
      o.require(std::abs(b - a) <= 0.05 * std::max(a, b), tag + " stabilisation");
    }
    const auto cls = classify(p).verdict;
    const bool agree = c.expected == SeparationVerdict::Separating ? cls == Verdict::Separating
                                                                    : cls == Verdict::ClosableDegenerate;
    o.require(agree, tag + " classifier");
    o.detail << "delta=" << c.delta << " " << to_string(probe.verdict) << "/" << to_string(cls)
             << " leak_last=" << leak.back() << "; ";
  }
}

void criterion_6(Outcome& o) {
  for (double delta : {0.25, 0.5, 0.75}) {
    const auto p = power_1d(delta, {0.0}, -4.0, 4.0);
    double worst = 0.0;
    for (double y : logspace(1e-3, 1e-1, 25)) {
      const double model = std::pow(y, 1.0 - delta) / (1.0 - delta);
      worst = std::max(worst, std::abs(distance_1d(p, 0.0, y, 0.0) / model - 1.0));
    }
    o.require(worst < 0.03, "distance model at delta " + std::to_string(delta));
    const auto fit = holder_fit(p, 0.0, {1e-3, 1e-1});
    o.require(std::abs(fit.gamma_hat - (1.0 - delta)) <= 0.02, "holder fit at delta " + std::to_string(delta));

    bool monotone = true;
    for (const auto& [x, y] : std::vector<std::pair<double, double>>{{-1.0, 1.0}, {0.0, 0.5}, {0.1, 2.0}}) {
      double prev = 0.0;
      for (int k = 1; k <= 40; ++k) {
        const double d = distance_1d(p, x, y, std::ldexp(1.0, -k));
        monotone = monotone && d >= prev;
        prev = d;
      }
      monotone = monotone && distance_1d(p, x, y, 0.0) >= prev;
    }
    o.require(monotone, "epsilon sweep at delta " + std::to_string(delta));
    o.detail << "delta=" << delta << " model_err=" << worst << " gamma=" << fit.gamma_hat << "; ";
  }
}

void criterion_7(Outcome& o) {
  const auto rep = run_only(*find_builtin("double-zero"), {"largetime_floor"});
  for (const auto& r : rep.records) {
    const bool primary = r.name == "largetime_floor" || r.name == "largetime_growth";
    if (primary) o.require(r.status == Status::Holds, r.name);
    o.detail << r.name << "=" << r.value << (primary ? "" : " (window)") << "; ";
  }
}

void criterion_8(Outcome& o) {
  const auto rep = run_only(*find_builtin("resolvent-volume"), {"resolvent_volume"});
  o.require(rep.records.size() == 2, "two origins");
  for (const auto& r : rep.records) {
    o.require(r.status == Status::Holds, r.name);
    o.detail << r.name << " slope=" << r.value << " ratio=" << r.witness.value("product_ratio", 0.0) << "; ";
  }
}

void criterion_9(Outcome& o) {
  for (const auto& s : builtin_scenarios()) {
    const auto rep = run_only(s, {"markov", "semigroup", "form_additivity"});
    for (const auto& r : rep.records) {
      if (is_sabotage(s)) {
        if (r.name.rfind("markov", 0) == 0) o.require(r.status == Status::Violated, s.name + " not detected");
      } else {
        o.require(r.status == Status::Holds, s.name + " " + r.name);
      }
    }
    if (is_sabotage(s)) {
      o.detail << s.name << " detected=" << rep.any_violated() << "; ";
    }
  }
  // Form additivity on an exact cut, built directly.
  const auto p = power_1d(0.75, {0.0}, -8.0, 8.0);
  const auto mesh = build_mesh(1, p.domain(), 1023);
  const auto A = assemble(p, mesh, 0.0);
  std::vector<unsigned char> left(mesh.size(), 0);
  for (std::size_t i = 0; i < mesh.size(); ++i) left[i] = mesh.point(i)[0] < 0.0;
  const auto f = form_additivity_defect(A, left);
  o.require(f.record.status == Status::Holds && f.record.value < 1e-12, "form additivity on the cut");
  o.detail << "cut_form_defect=" << f.record.value;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--criterion") only = std::atoi(argv[i + 1]);
  }
  const std::vector<std::function<void(Outcome&)>> criteria{criterion_1, criterion_2, criterion_3,
                                                            criterion_4, criterion_5, criterion_6,
                                                            criterion_7, criterion_8, criterion_9};
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "unknown criterion %d\n", only);
    return 64;
  }
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k + 1) != only) continue;
    Outcome o;
    try {
      criteria[k](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("criterion %zu: %s %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
