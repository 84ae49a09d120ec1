#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "degenlab/diagnose.hpp"
#include "degenlab/error.hpp"

namespace degenlab {

std::string to_string(SeparationVerdict v) {
  switch (v) {
    case SeparationVerdict::Separating: return "separating";
    case SeparationVerdict::NonSeparating: return "non-separating";
    case SeparationVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

std::string tail_name(quadrature::Tail t) {
  switch (t) {
    case quadrature::Tail::Convergent: return "convergent";
    case quadrature::Tail::Divergent: return "divergent";
    case quadrature::Tail::Ambiguous: return "ambiguous";
  }
  return "unknown";
}

SeparationVerdict decide(std::span<const double> L, std::span<const double> G, double stabilization) {
  const std::size_t n = L.size();
  if (n < 2) return SeparationVerdict::Inconclusive;
  if (std::all_of(L.begin(), L.end(), [](double v) { return v == 0.0; })) {
    return SeparationVerdict::Separating;
  }
  const double a = L[n - 2], b = L[n - 1];
  if (b > 0.0 && std::abs(b - a) <= stabilization * std::max(a, b)) {
    return SeparationVerdict::NonSeparating;
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (!(L[k] < L[k - 1])) return SeparationVerdict::Inconclusive;
  }
  // Leakage should track the series conductance across the cut.
  std::vector<double> ratio;
  for (std::size_t k = 0; k < n; ++k) {
    if (G[k] > 0.0 && L[k] > 0.0) ratio.push_back(L[k] / G[k]);
  }
  if (ratio.empty()) return SeparationVerdict::Separating;
  std::vector<double> sorted = ratio;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  for (double r : ratio) {
    if (r < 0.1 * median || r > 10.0 * median) return SeparationVerdict::Inconclusive;
  }
  return SeparationVerdict::Separating;
}

}  // namespace

SeparationProbe separation_probe(const CoefficientProfile& profile, const SeparationConfig& cfg) {
  if (profile.dimension() != 1) throw ArgumentError("separation probes are 1D only");
  if (cfg.levels.empty() || cfg.epsilons.empty()) throw ArgumentError("separation probe needs levels and epsilons");
  const double src = cfg.cut - 1.0;
  if (!cfg.box.contains(src - 0.5) || !cfg.box.contains(cfg.cut + 0.5)) {
    throw ArgumentError("box too small for the probe bump and cut window");
  }
  SeparationProbe out;
  out.leakage.assign(cfg.epsilons.size(), {});
  out.conductance.assign(cfg.epsilons.size(), {});
  HeatOptions heat;
  heat.backend = HeatBackend::BackwardEuler;
  heat.steps = cfg.steps;

  for (int k : cfg.levels) {
    const double h = std::ldexp(1.0, -k);
    const double cells = cfg.box.width() / h;
    const auto n = static_cast<std::size_t>(std::llround(cells));
    if (std::abs(cells - static_cast<double>(n)) > 1e-9 * cells) {
      throw ArgumentError("box width is not a multiple of 2^-level");
    }
    const Mesh mesh = build_mesh(1, {cfg.box, Interval{}}, n);
    out.h.push_back(mesh.spacing());
    const std::size_t N = mesh.size();
    std::vector<double> bump(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const double x = mesh.point(i)[0] - src;
      if (std::abs(x) < 0.5) {
        const double c = std::cos(std::numbers::pi * x);
        bump[i] = c * c;
      }
    }
    const double mass = mesh.cell_volume() * kernels::norm1(bump);
    for (double& v : bump) v /= mass;

    for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
      const double eps = cfg.epsilons[e];
      const auto A = assemble(profile, mesh, eps);
      const auto u = heat_evolve(A, bump, cfg.time, heat).values;
      double leak = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if (mesh.point(i)[0] > cfg.cut) leak += u[i];
      }
      out.leakage[e].push_back(leak * mesh.cell_volume());
      out.conductance[e].push_back(cut_conductance(profile, mesh, {cfg.cut - 0.5, cfg.cut + 0.5}, eps));
    }
  }
  std::size_t base = 0;
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    if (cfg.epsilons[e] == 0.0) {
      base = e;
      break;
    }
  }
  out.verdict = decide(out.leakage[base], out.conductance[base], cfg.stabilization);
  return out;
}

CheckResult separation_record(const CoefficientProfile& profile, const SeparationConfig& cfg,
                              std::optional<SeparationVerdict> expected) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult res;
  auto& r = res.record;
  r.name = "separation";
  r.anchor = "S_t L2(-inf, x0) is contained in L2(-inf, x0) when c^{-1} is not integrable at x0";
  const auto probe = separation_probe(profile, cfg);
  Table tab{"separation_leakage", {"h", "epsilon", "leakage", "conductance"}, {}};
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    for (std::size_t k = 0; k < probe.h.size(); ++k) {
      tab.rows.push_back({probe.h[k], cfg.epsilons[e], probe.leakage[e][k], probe.conductance[e][k]});
    }
  }
  r.label = to_string(probe.verdict);
  std::size_t base = 0;
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    if (cfg.epsilons[e] == 0.0) {
      base = e;
      break;
    }
  }
  r.value = probe.leakage[base].back();
  if (probe.verdict == SeparationVerdict::Inconclusive) {
    r.status = Status::Inconclusive;
  } else if (expected) {
    r.status = *expected == probe.verdict ? Status::Holds : Status::Violated;
  } else {
    r.status = Status::Fitted;
  }
  r.witness = {{"cut", cfg.cut}, {"t", cfg.time}, {"levels", cfg.levels},
               {"leakage", probe.leakage[base]}};
  if (expected) r.witness["expected"] = to_string(*expected);
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

CheckResult classification_record(const CoefficientProfile& profile) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult res;
  auto& r = res.record;
  r.name = "classification";
  r.anchor = "integrability of c^{-1} and c^{-1/2} at each zero decides separation and closability";
  const auto cls = classify(profile);
  r.status = cls.verdict == Verdict::Inconclusive ? Status::Inconclusive : Status::Fitted;
  r.label = to_string(cls.verdict);
  r.value = static_cast<double>(cls.cut_points.size());
  r.witness = {{"cut_points", cls.cut_points}, {"mu_lower", cls.mu_lower}};
  Table tab{"classification", {"zero", "side", "inverse", "inverse_sqrt", "exponent"}, {}};
  for (const auto& e : cls.integrability_table) {
    tab.rows.push_back({e.zero, e.side, tail_name(e.inverse), tail_name(e.inverse_sqrt), e.exponent});
  }
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace degenlab
