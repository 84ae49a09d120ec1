#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "degenlab/diagnose.hpp"
#include "degenlab/error.hpp"

namespace degenlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CheckResult make(std::string name, std::string anchor) {
  CheckResult r;
  r.record.name = std::move(name);
  r.record.anchor = std::move(anchor);
  return r;
}

void check_mask(const DiscreteOperator& A, std::span<const unsigned char> mask) {
  if (mask.size() != A.size()) throw ArgumentError("mask size does not match the operator");
}

// log of the admissible value over lhs, including the absolute slack.
double log_margin(double lhs, double bound) {
  if (lhs <= 0.0) return kInf;
  return std::log((bound * (1.0 + 1e-6) + 1e-12) / lhs);
}

/// Least-squares slope and its standard error.
std::pair<double, double> fit_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) return {0.0, kInf};
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - slope * (x[i] - mx);
    rss += e * e;
  }
  const double se = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  return {slope, se};
}

}  // namespace

// ---------------------------------------------------------------------------

Semigroup::Semigroup(const DiscreteOperator& A, bool prefer_spectral, HeatOptions options)
    : A_(&A), options_(options) {
  options_.backend = HeatBackend::ChebyshevExp;
  if (prefer_spectral && A.mesh().dimension == 1 && A.size() <= kSpectralLimit) {
    spectrum_ = Spectrum::compute(A);
  }
}

std::vector<double> Semigroup::apply(std::span<const double> phi, double t) const {
  if (t == 0.0) return {phi.begin(), phi.end()};
  if (spectrum_) return spectrum_->apply([t](double l) { return std::exp(-t * l); }, phi);
  return heat_evolve(*A_, phi, t, options_).values;
}

double mass_inner(const Mesh& mesh, std::span<const double> a, std::span<const double> b) {
  return mesh.cell_volume() * kernels::dot(a, b);
}

// ---------------------------------------------------------------------------
// Structural checks

CheckResult markov_record(const DiscreteOperator& A, std::uint64_t seed) {
  Stopwatch sw;
  auto res = make("markov_structure", "A symmetric, A 1 = 0, A_ij <= 0 off the diagonal, A >= 0");
  const auto m = markov_check(A, seed);
  const double scale = std::max(m.norm_inf, 1.0);
  const bool ok = m.max_positive_offdiag == 0.0 && m.max_asymmetry == 0.0 &&
                  m.max_row_sum <= 1e-13 * scale && m.min_rayleigh >= -1e-10 * scale;
  auto& r = res.record;
  r.status = ok ? Status::Holds : Status::Violated;
  r.value = std::max({m.max_row_sum, m.max_positive_offdiag, m.max_asymmetry, -m.min_rayleigh, 0.0});
  r.label = "max structural defect";
  r.witness = {{"max_row_sum", m.max_row_sum},
               {"max_positive_offdiag", m.max_positive_offdiag},
               {"min_rayleigh", m.min_rayleigh},
               {"max_asymmetry", m.max_asymmetry},
               {"norm_inf", m.norm_inf}};
  r.runtime_seconds = sw.seconds();
  return res;
}

CheckResult conservation_defect(const DiscreteOperator& A, std::span<const double> times,
                                std::span<const unsigned char> omega, const HeatOptions& options,
                                double tolerance) {
  Stopwatch sw;
  const bool whole = omega.empty();
  if (!whole) check_mask(A, omega);
  auto res = make(whole ? "conservation" : "conservation_block",
                  whole ? "e^{-tA} 1 = 1" : "e^{-tA} 1_Omega = 1_Omega");
  const std::size_t N = A.size();
  std::vector<double> one(N);
  for (std::size_t i = 0; i < N; ++i) one[i] = whole || omega[i] ? 1.0 : 0.0;

  Table tab{res.record.name, {"t", "defect"}, {}};
  double worst = 0.0, worst_t = 0.0;
  std::size_t worst_i = 0;
  for (double t : times) {
    const auto u = heat_evolve(A, one, t, options).values;
    double d = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = std::abs(u[i] - one[i]);
      if (e > d) {
        d = e;
        at = i;
      }
    }
    tab.rows.push_back({t, d});
    if (d >= worst) {
      worst = d;
      worst_t = t;
      worst_i = at;
    }
  }
  auto& r = res.record;
  r.value = worst;
  r.status = worst < tolerance ? Status::Holds : Status::Violated;
  r.label = "max sup-norm defect";
  r.witness = {{"t", worst_t}, {"index", worst_i}, {"defect", worst}, {"tolerance", tolerance}};
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

CheckResult semigroup_invariants(const DiscreteOperator& A, std::uint64_t seed, int samples,
                                 const HeatOptions& options) {
  Stopwatch sw;
  auto res = make("semigroup_invariants",
                  "S_s S_t = S_{s+t}, S_t self-adjoint, positive and contractive on l1, l2, linf");
  const std::size_t N = A.size();
  const Mesh& mesh = A.mesh();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0), time(0.01, 0.5);

  double law = 0.0, adj = 0.0, positivity = 0.0;
  std::array<double, 3> contraction{0.0, 0.0, 0.0};
  std::vector<double> phi(N), psi(N), pos(N);
  for (int k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < N; ++i) {
      phi[i] = normal(rng);
      psi[i] = normal(rng);
      pos[i] = unit(rng);
    }
    const double s = time(rng), t = time(rng);
    const auto St = heat_evolve(A, phi, t, options).values;
    const auto SsSt = heat_evolve(A, St, s, options).values;
    const auto Sst = heat_evolve(A, phi, s + t, options).values;
    double e = 0.0;
    for (std::size_t i = 0; i < N; ++i) e = std::max(e, std::abs(SsSt[i] - Sst[i]));
    law = std::max(law, e / kernels::norm_inf(phi));

    const auto Stpsi = heat_evolve(A, psi, t, options).values;
    const double a = mass_inner(mesh, St, psi), b = mass_inner(mesh, phi, Stpsi);
    adj = std::max(adj, std::abs(a - b) / (mesh.cell_volume() * kernels::norm2(phi) * kernels::norm2(psi)));

    contraction[0] = std::max(contraction[0], kernels::norm1(St) / kernels::norm1(phi) - 1.0);
    contraction[1] = std::max(contraction[1], kernels::norm2(St) / kernels::norm2(phi) - 1.0);
    contraction[2] = std::max(contraction[2], kernels::norm_inf(St) / kernels::norm_inf(phi) - 1.0);

    const auto Spos = heat_evolve(A, pos, t, options).values;
    const double lo = *std::min_element(Spos.begin(), Spos.end());
    positivity = std::max(positivity, -lo / kernels::norm_inf(pos));
  }
  Table tab{"semigroup_invariants", {"property", "defect", "tolerance"}, {}};
  tab.rows.push_back({std::string("semigroup_law"), law, 1e-9});
  tab.rows.push_back({std::string("self_adjoint"), adj, 1e-10});
  tab.rows.push_back({std::string("l1_contraction"), contraction[0], 1e-10});
  tab.rows.push_back({std::string("l2_contraction"), contraction[1], 1e-10});
  tab.rows.push_back({std::string("linf_contraction"), contraction[2], 1e-10});
  tab.rows.push_back({std::string("positivity"), positivity, 1e-10});
  bool ok = true;
  double worst = 0.0;
  for (const auto& row : tab.rows) {
    const double d = std::get<double>(row[1]), tol = std::get<double>(row[2]);
    ok = ok && d <= tol;
    worst = std::max(worst, d / tol);
  }
  auto& r = res.record;
  r.status = ok ? Status::Holds : Status::Violated;
  r.value = worst;
  r.label = "worst defect over tolerance";
  r.witness = {{"seed", seed}, {"samples", samples}, {"semigroup_law", law}, {"self_adjoint", adj},
               {"positivity", positivity}, {"contraction", contraction}};
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

CheckResult invariance_defect(const DiscreteOperator& A, std::span<const unsigned char> omega,
                              double t, std::uint64_t seed, double tolerance,
                              const HeatOptions& options) {
  Stopwatch sw;
  check_mask(A, omega);
  auto res = make("invariance", "e^{-tA} L2(Omega) is contained in L2(Omega)");
  const std::size_t N = A.size();
  const double cv = A.mesh().cell_volume();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> phi(N);
  double worst = 0.0;
  std::size_t worst_sample = 0;
  for (std::size_t k = 0; k < 16; ++k) {
    for (std::size_t i = 0; i < N; ++i) phi[i] = omega[i] ? unit(rng) : 0.0;
    const auto u = heat_evolve(A, phi, t, options).values;
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (!omega[i]) s += u[i] * u[i];
    }
    const double d = std::sqrt(cv * s);
    if (d > worst) {
      worst = d;
      worst_sample = k;
    }
  }
  auto& r = res.record;
  r.value = worst;
  r.status = worst < tolerance ? Status::Holds : Status::Violated;
  r.label = "max leaked l2 mass";
  r.witness = {{"t", t}, {"seed", seed}, {"sample", worst_sample}, {"defect", worst},
               {"tolerance", tolerance}};
  r.runtime_seconds = sw.seconds();
  return res;
}

double form_cross_energy(const DiscreteOperator& A, std::span<const double> phi,
                         std::span<const unsigned char> omega) {
  check_mask(A, omega);
  const Mesh& mesh = A.mesh();
  double s = 0.0;
  for (int axis = 0; axis < mesh.dimension; ++axis) {
    const auto g = A.conductances(axis);
    for (std::size_t f = 0; f < g.size(); ++f) {
      const auto [i, j] = mesh.face_nodes(axis, f);
      if ((omega[i] != 0) != (omega[j] != 0)) s += 2.0 * g[f] * phi[i] * phi[j];
    }
  }
  return s;
}

CheckResult form_additivity_defect(const DiscreteOperator& A, std::span<const unsigned char> omega,
                                   std::uint64_t seed, double tolerance) {
  Stopwatch sw;
  check_mask(A, omega);
  auto res = make("form_additivity", "E(phi) = E(phi 1_Omega) + E(phi 1_{Omega^c})");
  const std::size_t N = A.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> phi(N), in(N), out(N);
  double worst = 0.0;
  for (int k = 0; k < 16; ++k) {
    for (std::size_t i = 0; i < N; ++i) {
      phi[i] = unit(rng);
      in[i] = omega[i] ? phi[i] : 0.0;
      out[i] = omega[i] ? 0.0 : phi[i];
    }
    const double full = A.quadratic_form(phi);
    const double d = std::abs(full - A.quadratic_form(in) - A.quadratic_form(out)) / (1.0 + full);
    worst = std::max(worst, d);
  }
  auto& r = res.record;
  r.value = worst;
  r.status = worst < tolerance ? Status::Holds : Status::Violated;
  r.label = "max relative cross energy";
  r.witness = {{"seed", seed}, {"defect", worst}, {"tolerance", tolerance}};
  r.runtime_seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Off-diagonal bounds

Ball make_ball(const DistanceField& field, double radius) {
  Ball b;
  b.center = field.origin_index;
  b.radius = radius;
  b.members.assign(field.values.size(), 0);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field.values[i] <= radius) {
      b.members[i] = 1;
      ++b.cells;
    }
  }
  return b;
}

std::vector<BallPair> make_ball_pairs(const CoefficientProfile& profile, const Mesh& mesh,
                                      std::span<const Point> centers, std::span<const double> radii,
                                      double epsilon, std::size_t min_cells) {
  DistanceOptions opts;
  opts.weighting = EdgeWeighting::Midpoint;
  std::vector<DistanceField> fields;
  for (const auto& c : centers) fields.push_back(distance_field(profile, mesh, c, epsilon, opts));
  std::vector<BallPair> out;
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = a + 1; b < centers.size(); ++b) {
      for (double r1 : radii) {
        for (double r2 : radii) {
          BallPair p{make_ball(fields[a], r1), make_ball(fields[b], r2),
                     fields[a].values[fields[b].origin_index]};
          if (p.first.cells < min_cells || p.second.cells < min_cells) continue;
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

namespace {

struct PairBound {
  const std::vector<unsigned char>* first;
  const std::vector<unsigned char>* second;
  double distance;        // d tilde or d_e
  double scale;           // 4 t multiplier: 1 for d_C, |C| for d_e
  std::size_t key_first;  // cache keys of the evolved second indicator
  std::size_t key_second;
  std::vector<Cell> label;
};

CheckResult offdiag_common(CheckResult res, const Semigroup& S, std::vector<PairBound>& pairs,
                           std::span<const double> times, std::vector<std::string> label_columns) {
  Stopwatch sw;
  const Mesh& mesh = S.op().mesh();
  const std::size_t N = mesh.size();
  const double cv = mesh.cell_volume();
  std::vector<std::string> cols = std::move(label_columns);
  for (const char* c : {"t", "distance", "lhs", "bound", "log_margin"}) cols.emplace_back(c);
  Table tab{res.record.name, cols, {}};

  double min_margin = kInf;
  std::size_t evaluated = 0, violations = 0;
  nlohmann::json witness = nlohmann::json::object();
  for (double t : times) {
    std::map<std::size_t, std::vector<double>> evolved;
    for (const auto& p : pairs) {
      auto it = evolved.find(p.key_second);
      if (it == evolved.end()) {
        std::vector<double> ind(N);
        for (std::size_t i = 0; i < N; ++i) ind[i] = (*p.second)[i] ? 1.0 : 0.0;
        it = evolved.emplace(p.key_second, S.apply(ind, t)).first;
      }
      double lhs = 0.0;
      std::size_t n1 = 0, n2 = 0;
      for (std::size_t i = 0; i < N; ++i) {
        if ((*p.first)[i]) {
          lhs += it->second[i];
          ++n1;
        }
        if ((*p.second)[i]) ++n2;
      }
      lhs = std::abs(cv * lhs);
      const double norms = std::sqrt(cv * static_cast<double>(n1)) * std::sqrt(cv * static_cast<double>(n2));
      const double bound = std::exp(-p.distance * p.distance / (4.0 * p.scale * t)) * norms;
      const double lm = log_margin(lhs, bound);
      ++evaluated;
      const bool bad = lhs > bound * (1.0 + 1e-6) + 1e-12;
      if (bad ? violations == 0 : violations == 0 && lm < min_margin) {
        witness = {{"t", t}, {"distance", p.distance}, {"lhs", lhs}, {"bound", bound}};
      }
      if (bad) ++violations;
      min_margin = std::min(min_margin, lm);
      auto row = p.label;
      for (double v : {t, p.distance, lhs, bound, lm}) row.emplace_back(v);
      tab.rows.push_back(std::move(row));
    }
  }
  auto& r = res.record;
  r.value = min_margin;
  r.witness = witness;
  r.witness["evaluated"] = evaluated;
  r.witness["violations"] = violations;
  if (evaluated == 0) {
    r.status = Status::Inconclusive;
    r.label = "no admissible pairs";
  } else {
    r.status = violations ? Status::Violated : Status::Holds;
    r.label = "min log margin";
  }
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

}  // namespace

CheckResult offdiagonal_gaussian_check(const Semigroup& S, std::span<const BallPair> pairs,
                                       std::span<const double> times) {
  auto res = make("offdiagonal_gaussian",
                  "|(phi1, S_t phi2)| <= exp(-d~_C(B1;B2)^2 / 4t) |phi1|_2 |phi2|_2");
  std::vector<PairBound> pb;
  std::map<std::pair<std::size_t, double>, std::size_t> keys;
  auto key = [&](const Ball& b) { return keys.emplace(std::make_pair(b.center, b.radius), keys.size()).first->second; };
  const Mesh& mesh = S.op().mesh();
  for (const auto& p : pairs) {
    const double dt = std::max(p.center_distance - p.first.radius - p.second.radius, 0.0);
    const Point c1 = mesh.point(p.first.center), c2 = mesh.point(p.second.center);
    std::vector<Cell> label{c1[0], c1[1], p.first.radius, c2[0], c2[1], p.second.radius};
    pb.push_back({&p.first.members, &p.second.members, dt, 1.0, key(p.first), key(p.second), std::move(label)});
  }
  return offdiag_common(std::move(res), S, pb, times, {"x1", "y1", "r1", "x2", "y2", "r2"});
}

std::vector<SetPair> make_set_pairs(const Mesh& mesh, std::span<const Point> centers,
                                    double half_width) {
  std::vector<std::vector<std::size_t>> sets;
  for (const auto& c : centers) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const Point p = mesh.point(i);
      if (std::hypot(p[0] - c[0], mesh.dimension == 2 ? p[1] - c[1] : 0.0) <= half_width) s.push_back(i);
    }
    if (s.empty()) throw ArgumentError("index set around a center is empty");
    sets.push_back(std::move(s));
  }
  std::vector<SetPair> out;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = a + 1; b < sets.size(); ++b) out.push_back({sets[a], sets[b]});
  }
  return out;
}

CheckResult euclidean_offdiagonal_check(const Semigroup& S, std::span<const SetPair> sets,
                                        std::span<const double> times, double coefficient_norm) {
  auto res = make("offdiagonal_euclidean",
                  "|(phi1, S_t phi2)| <= exp(-d_e(V1;V2)^2 / (4 |C| t)) |phi1|_2 |phi2|_2");
  const Mesh& mesh = S.op().mesh();
  const std::size_t N = mesh.size();
  std::vector<std::vector<unsigned char>> masks;
  std::vector<PairBound> pb;
  masks.reserve(2 * sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto& sp = sets[k];
    double de = kInf;
    for (auto i : sp.first) {
      const Point p = mesh.point(i);
      for (auto j : sp.second) {
        const Point q = mesh.point(j);
        de = std::min(de, std::hypot(p[0] - q[0], p[1] - q[1]));
      }
    }
    for (const auto* idx : {&sp.first, &sp.second}) {
      std::vector<unsigned char> m(N, 0);
      for (auto i : *idx) m.at(i) = 1;
      masks.push_back(std::move(m));
    }
    std::vector<Cell> label{static_cast<double>(k), static_cast<double>(sp.first.size()),
                            static_cast<double>(sp.second.size())};
    pb.push_back({nullptr, nullptr, de, coefficient_norm, 2 * k, 2 * k + 1, std::move(label)});
  }
  for (std::size_t k = 0; k < pb.size(); ++k) {
    pb[k].first = &masks[2 * k];
    pb[k].second = &masks[2 * k + 1];
  }
  return offdiag_common(std::move(res), S, pb, times, {"pair", "cells1", "cells2"});
}

// ---------------------------------------------------------------------------
// Propagation

CheckResult wave_speed_check(const DiscreteOperator& A, const DistanceField& dist,
                             std::span<const double> times, const WaveCheckOptions& options,
                             std::span<const unsigned char> forbidden) {
  Stopwatch sw;
  auto res = make("wave_speed", "(phi1, cos(t A^{1/2}) phi2) = 0 for t <= d~_C(B1;B2)");
  const std::size_t N = A.size();
  if (dist.values.size() != N) throw ArgumentError("distance field does not match the operator");
  if (!forbidden.empty()) check_mask(A, forbidden);
  const Mesh& mesh = A.mesh();
  const double r0 = options.source_radius;
  std::vector<double> phi0(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double q = dist.values[i] / r0;
    if (q < 1.0) phi0[i] = std::pow(1.0 - q * q, options.bump_power);
  }
  const double thr = options.threshold * kernels::norm_inf(phi0);

  Table tab{"wave_speed", {"t", "extent", "h_C", "margin", "speed", "cone_excess", "energy_drift", "forbidden_max"}, {}};
  double worst_speed = -kInf, worst_forbidden = 0.0;
  bool ok = true;
  nlohmann::json witness = nlohmann::json::object();
  for (double t : times) {
    const auto w = wave_evolve(A, phi0, t, options.wave);
    std::vector<unsigned char> reached(N, 0);
    double extent = 0.0, fmax = 0.0;
    std::size_t far = dist.origin_index;
    for (std::size_t i = 0; i < N; ++i) {
      const double a = std::abs(w.displacement[i]);
      if (a > thr) {
        reached[i] = 1;
        const double d = std::max(dist.values[i] - r0, 0.0);
        if (d > extent) {
          extent = d;
          far = i;
        }
      }
      if (!forbidden.empty() && forbidden[i]) fmax = std::max(fmax, a);
    }
    // Largest d_C width of a grid edge inside the excited region.
    double hc = 0.0;
    for (int axis = 0; axis < mesh.dimension; ++axis) {
      for (std::size_t f = 0; f < mesh.face_count(axis); ++f) {
        const auto [i, j] = mesh.face_nodes(axis, f);
        if (!(reached[i] || reached[j])) continue;
        const double d = std::abs(dist.values[i] - dist.values[j]);
        if (std::isfinite(d)) hc = std::max(hc, d);
      }
    }
    const double margin = 4.0 * hc * (1.0 + 0.01 * t / std::max(hc, 1e-300));
    const double speed = t > 0.0 ? (extent - margin) / t : 0.0;
    const bool crossed = fmax > thr;
    const bool bad = (t > 0.0 && speed > options.speed_limit) || (t == 0.0 && extent > margin) || crossed;
    if (bad && ok) {
      witness = {{"t", t}, {"index", far}, {"extent", extent}, {"margin", margin},
                 {"forbidden_max", fmax}};
    }
    ok = ok && !bad;
    if (t > 0.0) worst_speed = std::max(worst_speed, speed);
    worst_forbidden = std::max(worst_forbidden, fmax);
    tab.rows.push_back({t, extent, hc, margin, speed, extent - t - margin, w.energy_drift, fmax});
  }
  auto& r = res.record;
  r.status = ok ? Status::Holds : Status::Violated;
  r.value = std::isfinite(worst_speed) ? worst_speed : 0.0;
  r.label = "max speed beyond margin";
  r.witness = witness;
  r.witness["threshold"] = thr;
  r.witness["forbidden_max"] = worst_forbidden;
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

// ---------------------------------------------------------------------------
// Kernel decay and floors

CheckResult smalltime_decay_fit(const DiscreteOperator& A, std::span<const double> times,
                                double gamma, double coefficient_norm,
                                const SampleStrategy& strategy, const HeatOptions& options) {
  Stopwatch sw;
  auto res = make("smalltime_decay", "|K_t|_inf <= a t^{-d/(2 gamma)} for t <= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ArgumentError("gamma must lie in (0, 1]");
  const Mesh& mesh = A.mesh();
  const double h = mesh.spacing(0);
  const double tmin = 10.0 * h * h * coefficient_norm;
  std::vector<double> kept;
  for (double t : times) {
    if (t >= tmin && t <= 0.1) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end());
  auto& r = res.record;
  const double predicted = -static_cast<double>(mesh.dimension) / (2.0 * gamma);
  r.witness = {{"predicted_slope", predicted}, {"t_min", tmin}};
  if (kept.size() < 2) {
    r.status = Status::Inconclusive;
    r.label = "t range empty after resolution filter";
    r.runtime_seconds = sw.seconds();
    return res;
  }
  const auto series = sup_kernel_series(A, kept, strategy, options);
  std::vector<double> lx, ly;
  for (const auto& s : series) {
    lx.push_back(std::log(s.time));
    ly.push_back(std::log(s.value));
  }
  const auto [slope, se] = fit_slope(lx, ly);
  const auto& last = series.back();
  const double a_fit = last.value * std::pow(last.time, -predicted);
  Table tab{"smalltime_decay", {"t", "sup_kernel", "argmax", "bound_curve", "excess"}, {}};
  double worst = -kInf;
  std::size_t worst_k = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double curve = a_fit * std::pow(series[k].time, predicted);
    const double excess = series[k].value / curve - 1.0;
    if (excess > worst) {
      worst = excess;
      worst_k = k;
    }
    tab.rows.push_back({series[k].time, series[k].value, static_cast<double>(series[k].argmax), curve, excess});
  }
  r.value = slope;
  r.stderr_value = se;
  r.status = worst <= 0.1 ? Status::Holds : Status::Violated;
  r.label = "fitted log-log slope";
  r.witness["a_fit"] = a_fit;
  r.witness["worst_excess"] = worst;
  r.witness["t"] = series[worst_k].time;
  r.witness["index"] = series[worst_k].argmax;
  r.witness["strategy"] = strategy.tag();
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

std::vector<CheckResult> largetime_floor_check(const DiscreteOperator& A,
                                               std::span<const double> times, double floor,
                                               const SampleStrategy& strategy,
                                               double growth_factor, const HeatOptions& options) {
  Stopwatch sw;
  auto res = make("largetime_floor", "|K_t|_inf >= |Omega_0|^{-1} for every t > 0");
  std::vector<double> ts(times.begin(), times.end());
  std::sort(ts.begin(), ts.end());
  if (ts.empty()) throw ArgumentError("largetime_floor_check needs times");
  const auto series = sup_kernel_series(A, ts, strategy, options);
  const double d = A.mesh().dimension;
  Table tab{"largetime_floor", {"t", "sup_kernel", "argmax", "scaled"}, {}};
  double worst = kInf;
  std::size_t worst_k = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ratio = series[k].value / floor;
    if (ratio < worst) {
      worst = ratio;
      worst_k = k;
    }
    tab.rows.push_back({series[k].time, series[k].value, static_cast<double>(series[k].argmax),
                        series[k].value * std::pow(series[k].time, 0.5 * d)});
  }
  auto& r = res.record;
  r.value = worst;
  r.label = "min sup over floor";
  r.status = worst >= 1.0 - 1e-6 ? Status::Holds : Status::Violated;
  r.witness = {{"floor", floor}, {"t", series[worst_k].time}, {"index", series[worst_k].argmax},
               {"value", series[worst_k].value}};
  r.runtime_seconds = sw.seconds();
  res.tables.push_back(std::move(tab));

  auto growth = make("largetime_growth",
                     "no a > 0 with |K_t|_inf <= a t^{-d/2} for all t");
  const double first = series.front().value * std::pow(series.front().time, 0.5 * d);
  const double lastv = series.back().value * std::pow(series.back().time, 0.5 * d);
  auto& g = growth.record;
  g.value = lastv / first;
  g.label = "growth of sup times t^{d/2}";
  g.status = g.value >= growth_factor ? Status::Holds : Status::Violated;
  g.witness = {{"t_first", series.front().time}, {"t_last", series.back().time},
               {"scaled_first", first}, {"scaled_last", lastv}, {"required", growth_factor}};
  std::vector<CheckResult> out;
  out.push_back(std::move(res));
  out.push_back(std::move(growth));
  return out;
}

CheckResult largetime_gaussian_check(const DiscreteOperator& A, std::span<const double> times,
                                     const SampleStrategy& strategy, const HeatOptions& options) {
  Stopwatch sw;
  auto res = make("largetime_gaussian", "|K_t|_inf t^{d/2} stays within fixed constants");
  const double d = A.mesh().dimension;
  const double target = std::pow(4.0 * std::numbers::pi, -0.5 * d);
  const auto series = sup_kernel_series(A, times, strategy, options);
  Table tab{"largetime_gaussian", {"t", "sup_kernel", "scaled_ratio"}, {}};
  double lo = kInf, hi = -kInf;
  nlohmann::json witness = nlohmann::json::object();
  for (const auto& s : series) {
    const double ratio = s.value * std::pow(s.time, 0.5 * d) / target;
    if ((ratio < 0.8 || ratio > 1.2) && witness.empty()) {
      witness = {{"t", s.time}, {"index", s.argmax}, {"ratio", ratio}};
    }
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    tab.rows.push_back({s.time, s.value, ratio});
  }
  auto& r = res.record;
  r.status = lo >= 0.8 && hi <= 1.2 ? Status::Holds : Status::Violated;
  r.value = std::abs(lo - 1.0) > std::abs(hi - 1.0) ? lo : hi;
  r.label = "worst ratio to the free Gaussian";
  r.witness = witness;
  r.witness["strategy"] = strategy.tag();
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

CheckResult resolvent_volume_scaling(const DiscreteOperator& A, const DistanceField& dist,
                                     const ResolventScalingOptions& options) {
  Stopwatch sw;
  auto res = make("resolvent_volume",
                  "K_{(I + r^2 A)^{-2m}}(x;x) |B_C(x;r)| bounded above and below");
  const Mesh& mesh = A.mesh();
  if (4 * options.m <= mesh.dimension) throw ArgumentError("resolvent scaling needs 4m > d");
  if (dist.values.size() != A.size()) throw ArgumentError("distance field does not match the operator");

  std::vector<double> finite;
  for (double v : dist.values) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  std::sort(finite.begin(), finite.end());
  if (finite.size() <= options.min_cells) throw ArgumentError("too few reachable points for resolvent scaling");
  double box = mesh.box[0].width();
  if (mesh.dimension == 2) box = std::min(box, mesh.box[1].width());
  const double rmin = finite[options.min_cells - 1];
  const double rmax = options.max_fraction * box;
  if (!(rmax > rmin)) throw ArgumentError("radius range is empty at this resolution");

  Table tab{"resolvent_volume", {"r", "ball_volume", "kernel", "product"}, {}};
  std::vector<double> lb, lk, prod;
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < options.radii; ++k) {
    const double s = options.radii > 1 ? static_cast<double>(k) / static_cast<double>(options.radii - 1) : 0.0;
    const double r = rmin * std::pow(rmax / rmin, s);
    const double vol = ball_volume(dist, r);
    if (!(vol > 0.0) || !std::isfinite(vol)) {
      ++skipped;
      continue;
    }
    const double K = resolvent_diagonal(A, r, options.m, dist.origin_index);
    lb.push_back(std::log(vol));
    lk.push_back(std::log(K));
    prod.push_back(K * vol);
    tab.rows.push_back({r, vol, K, K * vol});
  }
  auto& r = res.record;
  if (lb.size() < 3) {
    r.status = Status::Inconclusive;
    r.label = "too few radii";
    res.tables.push_back(std::move(tab));
    r.runtime_seconds = sw.seconds();
    return res;
  }
  const auto [slope, se] = fit_slope(lb, lk);
  const auto [pmin, pmax] = std::minmax_element(prod.begin(), prod.end());
  const double ratio = *pmax / *pmin;
  r.value = slope;
  r.stderr_value = se;
  r.label = "fitted slope of log K against log volume";
  r.status = std::abs(slope + 1.0) <= options.slope_tolerance && ratio <= options.ratio_limit
                 ? Status::Holds
                 : Status::Violated;
  r.witness = {{"index", dist.origin_index}, {"m", options.m}, {"product_ratio", ratio},
               {"a_fit", 1.0 / *pmin}, {"skipped", skipped}, {"r_min", rmin}, {"r_max", rmax}};
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

CheckResult ondiagonal_lower_check(const Semigroup& S, double t, double diameter,
                                   std::span<const Point> centers, bool separated) {
  Stopwatch sw;
  auto res = make("ondiagonal_lower", "(phi, S_t phi) >= a' |phi|_1^2");
  const Mesh& mesh = S.op().mesh();
  const std::size_t N = mesh.size();
  const double cv = mesh.cell_volume();
  const double rad = 0.5 * diameter;
  Table tab{"ondiagonal_lower", {"x", "y", "value"}, {}};
  double lo = kInf, hi = -kInf;
  std::size_t lo_k = 0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Point c = centers[k];
    std::vector<double> phi(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const Point p = mesh.point(i);
      const double e = std::hypot(p[0] - c[0], mesh.dimension == 2 ? p[1] - c[1] : 0.0);
      if (e < rad) {
        const double v = std::cos(0.5 * std::numbers::pi * e / rad);
        phi[i] = v * v;
      }
    }
    const double l1 = cv * kernels::norm1(phi);
    if (!(l1 > 0.0)) throw ArgumentError("bump support contains no grid points");
    const auto u = S.apply(phi, t);
    const double val = mass_inner(mesh, phi, u) / (l1 * l1);
    if (val < lo) {
      lo = val;
      lo_k = k;
    }
    hi = std::max(hi, val);
    tab.rows.push_back({c[0], c[1], val});
  }
  auto& r = res.record;
  if (centers.empty()) {
    r.status = Status::Inconclusive;
    r.label = "no centers";
    return res;
  }
  if (separated) {
    r.value = lo;
    r.label = "min value";
    r.status = lo > 0.0 ? Status::Holds : Status::Violated;
  } else {
    r.value = lo / hi;
    r.label = "min over max";
    r.status = r.value >= 1e-3 ? Status::Holds : Status::Violated;
  }
  r.witness = {{"t", t}, {"center", {centers[lo_k][0], centers[lo_k][1]}}, {"min", lo}, {"max", hi}};
  res.tables.push_back(std::move(tab));
  r.runtime_seconds = sw.seconds();
  return res;
}

}  // namespace degenlab
