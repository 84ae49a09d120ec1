#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "degenlab/error.hpp"
#include "degenlab/evolve.hpp"

namespace degenlab {

std::string to_string(HeatBackend b) {
  switch (b) {
    case HeatBackend::ChebyshevExp: return "chebyshev";
    case HeatBackend::CrankNicolson: return "crank-nicolson";
    case HeatBackend::BackwardEuler: return "backward-euler";
    case HeatBackend::Spectral: return "spectral";
  }
  return "unknown";
}

HeatBackend heat_backend_from_string(const std::string& s) {
  for (auto b : {HeatBackend::ChebyshevExp, HeatBackend::CrankNicolson, HeatBackend::BackwardEuler,
                 HeatBackend::Spectral}) {
    if (to_string(b) == s) return b;
  }
  throw ArgumentError("unknown heat backend '" + s + "'");
}

double HeatField::mass(double cell_volume) const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell_volume;
}

namespace {

void write_field(const std::filesystem::path& path, const Mesh& mesh,
                 std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << (mesh.dimension == 1 ? "x,value\n" : "x,y,value\n");
  char buf[128];
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Point p = mesh.point(i);
    if (mesh.dimension == 1) {
      std::snprintf(buf, sizeof buf, "%.10g,%.17g\n", p[0], values[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.17g\n", p[0], p[1], values[i]);
    }
    out << buf;
  }
}

std::size_t step_count(double t, const HeatOptions& o) {
  if (o.dt > 0.0) return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / o.dt - 1e-12)));
  return std::max<std::size_t>(1, o.steps);
}

std::vector<double> implicit_steps(const DiscreteOperator& A, std::span<const double> phi0,
                                   double t, const HeatOptions& o) {
  const std::size_t N = A.size();
  const std::size_t steps = step_count(t, o);
  const double dt = t / static_cast<double>(steps);
  const bool cn = o.backend == HeatBackend::CrankNicolson;
  const double s = cn ? 0.5 * dt : dt;
  std::vector<double> u(phi0.begin(), phi0.end()), rhs(N), Au(N);
  if (A.mesh().dimension == 1) {
    const auto solver = shifted_solver(A, s);
    for (std::size_t k = 0; k < steps; ++k) {
      if (cn) {
        kernels::apply(A, u, Au, o.exec);
        for (std::size_t i = 0; i < N; ++i) rhs[i] = u[i] - s * Au[i];
      } else {
        rhs = u;
      }
      solver.solve(rhs, u);
    }
    return u;
  }
  for (std::size_t k = 0; k < steps; ++k) {
    if (cn) {
      kernels::apply(A, u, Au, o.exec);
      for (std::size_t i = 0; i < N; ++i) rhs[i] = u[i] - s * Au[i];
    } else {
      rhs = u;
    }
    cg_shifted(A, s, rhs, u, o.cg_tolerance);
  }
  return u;
}

bool spectral_eligible(const DiscreteOperator& A) {
  return A.mesh().dimension == 1 && A.size() <= kSpectralLimit;
}

}  // namespace

void HeatField::export_csv(const std::filesystem::path& path, const Mesh& mesh) const {
  write_field(path, mesh, values);
}

void WaveField::export_csv(const std::filesystem::path& path, const Mesh& mesh) const {
  write_field(path, mesh, displacement);
}

HeatField heat_evolve(const DiscreteOperator& A, std::span<const double> phi0, double t,
                      const HeatOptions& options) {
  if (!(t >= 0.0)) throw ArgumentError("evolution time must be nonnegative");
  if (phi0.size() != A.size()) throw ArgumentError("initial datum does not match the operator");
  HeatField out;
  out.time = t;
  if (t == 0.0) {
    out.values.assign(phi0.begin(), phi0.end());
    return out;
  }
  switch (options.backend) {
    case HeatBackend::ChebyshevExp: {
      const ChebyshevExp ce(A, t, options.tolerance, options.max_degree);
      out.values.resize(A.size());
      ce.apply(phi0, out.values, options.exec);
      break;
    }
    case HeatBackend::CrankNicolson:
    case HeatBackend::BackwardEuler:
      out.values = implicit_steps(A, phi0, t, options);
      break;
    case HeatBackend::Spectral: {
      const auto sp = Spectrum::compute(A);
      out.values = sp->apply([t](double l) { return std::exp(-t * l); }, phi0);
      break;
    }
  }
  return out;
}

HeatField kernel_column(const DiscreteOperator& A, std::size_t source, double t,
                        const HeatOptions& options) {
  if (!(t > 0.0)) throw ArgumentError("kernel columns need t > 0");
  if (source >= A.size()) throw ArgumentError("source index out of range");
  std::vector<double> delta(A.size(), 0.0);
  delta[source] = 1.0 / A.mesh().cell_volume();
  HeatField f = heat_evolve(A, delta, t, options);
  f.source = source;
  return f;
}

SampleStrategy SampleStrategy::interior(double margin) {
  SampleStrategy s;
  s.kind = Kind::Interior;
  s.margin = margin;
  return s;
}

SampleStrategy SampleStrategy::within(Interval window) {
  SampleStrategy s;
  s.kind = Kind::Window;
  s.window = window;
  return s;
}

SampleStrategy SampleStrategy::at(std::vector<std::size_t> indices) {
  SampleStrategy s;
  s.kind = Kind::Indices;
  s.indices = std::move(indices);
  return s;
}

std::string SampleStrategy::tag() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::All: os << "all"; break;
    case Kind::Interior: os << "interior(margin=" << margin << ")"; break;
    case Kind::Window: os << "window[" << window.lo << "," << window.hi << "]"; break;
    case Kind::Indices: os << "indices(" << indices.size() << ")"; break;
  }
  return os.str();
}

std::vector<std::size_t> SampleStrategy::select(const Mesh& mesh) const {
  std::vector<std::size_t> out;
  const std::size_t N = mesh.size();
  if (kind == Kind::Indices) {
    for (auto i : indices) {
      if (i >= N) throw ArgumentError("sample index out of range");
      out.push_back(i);
    }
    return out;
  }
  for (std::size_t i = 0; i < N; ++i) {
    const Point p = mesh.point(i);
    bool keep = true;
    if (kind == Kind::Interior) {
      for (int a = 0; a < mesh.dimension; ++a) {
        keep = keep && p[a] - mesh.box[a].lo >= margin && mesh.box[a].hi - p[a] >= margin;
      }
    } else if (kind == Kind::Window) {
      keep = window.contains(p[0]);
    }
    if (keep) out.push_back(i);
  }
  if (out.empty()) throw ArgumentError("sample strategy " + tag() + " selects no grid points");
  return out;
}

double interior_margin(double t, double coefficient_norm) {
  return 2.0 * std::sqrt(t * coefficient_norm * std::log(1e6));
}

std::vector<SupKernel> sup_kernel_series(const DiscreteOperator& A, std::span<const double> times,
                                         const SampleStrategy& strategy,
                                         const HeatOptions& options) {
  const auto samples = strategy.select(A.mesh());
  const double cv = A.mesh().cell_volume();
  std::vector<SupKernel> out;
  std::shared_ptr<const Spectrum> sp;
  if (spectral_eligible(A)) sp = Spectrum::compute(A);
  for (double t : times) {
    if (!(t > 0.0)) throw ArgumentError("sup_kernel needs t > 0");
    std::vector<double> vals(samples.size());
    if (sp) {
      const auto d = sp->diagonal([t](double l) { return std::exp(-t * l); });
      for (std::size_t k = 0; k < samples.size(); ++k) vals[k] = d[samples[k]] / cv;
    } else {
      const ChebyshevExp ce(A, t, options.tolerance, options.max_degree);
      const std::size_t N = A.size();
#pragma omp parallel
      {
        std::vector<double> e(N, 0.0), col(N);
#pragma omp for schedule(dynamic)
        for (std::size_t k = 0; k < samples.size(); ++k) {
          e[samples[k]] = 1.0;
          ce.apply(e, col, kernels::Exec::Serial);
          e[samples[k]] = 0.0;
          vals[k] = col[samples[k]] / cv;
        }
      }
    }
    SupKernel s;
    s.time = t;
    s.strategy = strategy.tag();
    s.value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (vals[k] > s.value) {
        s.value = vals[k];
        s.argmax = samples[k];
      }
    }
    out.push_back(s);
  }
  return out;
}

SupKernel sup_kernel(const DiscreteOperator& A, double t, const SampleStrategy& strategy,
                     const HeatOptions& options) {
  const double ts[] = {t};
  return sup_kernel_series(A, ts, strategy, options).front();
}

void export_sup_series_csv(const std::filesystem::path& path, std::span<const SupKernel> series) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "t,value,argmax\n";
  char buf[96];
  for (const auto& s : series) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%zu\n", s.time, s.value, s.argmax);
    out << buf;
  }
}

}  // namespace degenlab
