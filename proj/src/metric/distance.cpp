#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>

#include "degenlab/error.hpp"
#include "degenlab/metric.hpp"

namespace degenlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> grading_points(const CoefficientProfile& profile, double x, double y) {
  std::vector<double> pts;
  if (std::holds_alternative<family::PowerDegenerate>(profile.family())) {
    for (double z : profile.known_zeros_1d()) {
      if (z >= x && z <= y) pts.push_back(z);
    }
    return pts;
  }
  QuadratureConfig cfg;
  cfg.scan_points = 2000;
  cfg.zero_threshold = 1e-3;
  auto c = [&](double z) { return profile.scalar_unchecked({z, 0.0}) - profile.epsilon(); };
  for (const auto& m : detail::locate_minima(c, {x, y}, cfg)) pts.push_back(m.first);
  return pts;
}

}  // namespace

double distance_1d(const CoefficientProfile& profile, double x, double y, double epsilon) {
  if (profile.dimension() != 1) throw ArgumentError("distance_1d needs a 1D profile");
  if (!(epsilon >= 0.0)) throw ArgumentError("viscosity epsilon must be nonnegative");
  if (x > y) std::swap(x, y);
  profile.scalar({x, 0.0});
  profile.scalar({y, 0.0});
  if (x == y) return 0.0;

  auto f = [&](double z) {
    return 1.0 / std::sqrt(profile.scalar_unchecked({z, 0.0}) + epsilon);
  };
  std::vector<double> knots{x};
  std::vector<bool> singular{false};
  bool y_singular = false;
  for (double z : grading_points(profile, x, y)) {
    if (z == x) {
      singular[0] = true;
    } else if (z == y) {
      y_singular = true;
    } else {
      knots.push_back(z);
      singular.push_back(true);
    }
  }
  knots.push_back(y);
  singular.push_back(y_singular);

  double total = 0.0;
  bool ambiguous = false;
  auto toward = [&](double z0, double far) {
    const auto r = quadrature::integrate_toward(f, z0, far);
    if (r.tail == quadrature::Tail::Ambiguous) ambiguous = true;
    return r.tail == quadrature::Tail::Divergent ? kInf : r.value;
  };
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k], b = knots[k + 1];
    if (singular[k] && singular[k + 1]) {
      const double m = 0.5 * (a + b);
      total += toward(a, m) + toward(b, m);
    } else if (singular[k]) {
      total += toward(a, b);
    } else if (singular[k + 1]) {
      total += toward(b, a);
    } else {
      total += quadrature::integrate(f, a, b).value;
    }
  }
  if (std::isinf(total)) return kInf;
  if (ambiguous) throw InconclusiveError("distance quadrature could not decide finiteness");
  return total;
}

DistanceField distance_field(const CoefficientProfile& profile, const Mesh& mesh,
                             const Point& origin, double epsilon, const DistanceOptions& options) {
  if (profile.dimension() != mesh.dimension) throw ArgumentError("profile and mesh dimensions differ");
  if (!profile.is_scalar()) throw UnsupportedError("distance fields need a scalar coefficient");
  if (!(epsilon >= 0.0)) throw ArgumentError("viscosity epsilon must be nonnegative");
  DistanceField out;
  out.mesh = mesh;
  out.origin = origin;
  out.origin_index = mesh.nearest(origin);
  out.epsilon = epsilon;
  out.method = DistanceMethod::GraphGeodesic;
  const std::size_t N = mesh.size();
  out.values.assign(N, kInf);

  auto weight = [&](std::size_t i, std::size_t j) {
    const Point p = mesh.point(i), q = mesh.point(j);
    const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
    const Point m{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
    const double integrand = 1.0 / std::sqrt(profile.scalar_unchecked(m) + epsilon);
    if (options.weighting == EdgeWeighting::Midpoint || integrand * options.edge_floor <= 1.0) {
      return len * integrand;
    }
    return segment_integral(profile, p, q, epsilon, 0.5).value;
  };

  const long n1 = static_cast<long>(mesh.n) + 1;
  std::vector<std::pair<long, long>> offsets;
  if (mesh.dimension == 1) {
    offsets = {{-1, 0}, {1, 0}};
  } else {
    offsets = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  }
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<unsigned char> done(N, 0);
  out.values[out.origin_index] = 0.0;
  heap.emplace(0.0, out.origin_index);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    const auto [iu, ju] = mesh.coords(u);
    for (const auto& [di, dj] : offsets) {
      const long i = static_cast<long>(iu) + di, j = static_cast<long>(ju) + dj;
      if (i < 0 || i >= n1 || j < 0 || (mesh.dimension == 2 ? j >= n1 : j > 0)) continue;
      const std::size_t v = mesh.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (done[v]) continue;
      const double nd = d + weight(u, v);
      if (nd < out.values[v]) {
        out.values[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return out;
}

DistanceField distance_field_1d_exact(const CoefficientProfile& profile, const Mesh& mesh,
                                      const Point& origin, double epsilon) {
  if (mesh.dimension != 1) throw ArgumentError("exact distance fields are 1D only");
  DistanceField out;
  out.mesh = mesh;
  out.origin = origin;
  out.origin_index = mesh.nearest(origin);
  out.epsilon = epsilon;
  out.method = DistanceMethod::Quadrature1D;
  out.values.assign(mesh.size(), 0.0);
  // Accumulate cell by cell outward so the cost stays linear in N.
  for (int dir : {-1, 1}) {
    double acc = 0.0;
    std::size_t i = out.origin_index;
    while ((dir < 0 && i > 0) || (dir > 0 && i < mesh.n)) {
      const std::size_t j = dir < 0 ? i - 1 : i + 1;
      if (!std::isinf(acc)) acc += distance_1d(profile, mesh.point(i)[0], mesh.point(j)[0], epsilon);
      out.values[j] = acc;
      i = j;
    }
  }
  return out;
}

double ball_volume(const DistanceField& field, double r, std::span<const unsigned char> mask) {
  if (!(r >= 0.0)) throw ArgumentError("ball radius must be nonnegative");
  if (!mask.empty() && mask.size() != field.values.size()) throw ArgumentError("mask size mismatch");
  std::size_t count = 0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field.values[i] <= r && (mask.empty() || mask[i])) ++count;
  }
  return static_cast<double>(count) * field.mesh.cell_volume();
}

void DistanceField::export_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << (mesh.dimension == 1 ? "x,d\n" : "x,y,d\n");
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

void export_ball_volumes_csv(const std::filesystem::path& path, const DistanceField& field,
                             std::span<const double> radii) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "r,volume\n";
  char buf[96];
  for (double r : radii) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g\n", r, ball_volume(field, r));
    out << buf;
  }
}

HolderFit holder_fit(std::span<const double> r, std::span<const double> d) {
  if (r.size() != d.size()) throw ArgumentError("holder_fit needs matching samples");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] > 0.0 && d[i] > 0.0 && std::isfinite(d[i])) {
      lx.push_back(std::log(r[i]));
      ly.push_back(std::log(d[i]));
    }
  }
  if (lx.size() < 12) throw ArgumentError("holder_fit needs at least 12 usable samples");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw ArgumentError("holder_fit samples have zero variance");
  HolderFit fit;
  fit.gamma_hat = sxy / sxx;
  const double intercept = my - fit.gamma_hat * mx;
  fit.a_hat = std::exp(intercept);
  fit.samples = lx.size();
  for (std::size_t i = 0; i < lx.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(ly[i] - (intercept + fit.gamma_hat * lx[i])));
  }
  return fit;
}

HolderFit holder_fit(const CoefficientProfile& profile, double origin, Interval range,
                     std::size_t samples, double epsilon, double side) {
  if (samples < 12) throw ArgumentError("holder_fit needs at least 12 sample radii");
  if (!(range.lo > 0.0 && range.hi > range.lo)) throw ArgumentError("holder_fit range must be positive");
  std::vector<double> r(samples), d(samples);
  const double l0 = std::log(range.lo), l1 = std::log(range.hi);
  for (std::size_t k = 0; k < samples; ++k) {
    r[k] = std::exp(l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(samples - 1));
    d[k] = distance_1d(profile, origin, origin + (side >= 0.0 ? r[k] : -r[k]), epsilon);
  }
  return holder_fit(r, d);
}

HolderFit holder_fit(const DistanceField& field, Interval range) {
  std::vector<double> r, d;
  const Point o = field.mesh.point(field.origin_index);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const Point p = field.mesh.point(i);
    const double e = std::hypot(p[0] - o[0], p[1] - o[1]);
    if (e >= range.lo && e <= range.hi) {
      r.push_back(e);
      d.push_back(field.values[i]);
    }
  }
  return holder_fit(r, d);
}

}  // namespace degenlab
