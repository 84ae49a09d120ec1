#include <algorithm>
#include <cmath>
#include <limits>

#include "degenlab/error.hpp"
#include "degenlab/grid.hpp"

namespace degenlab {

namespace {

constexpr int kEdgeSamples = 33;

double golden_min(const std::function<double(double)>& f, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + 1e-300); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

void check_box(const CoefficientProfile& profile, const Mesh& mesh) {
  for (int a = 0; a < mesh.dimension; ++a) {
    const Interval& d = profile.domain()[a];
    const double slack = 1e-12 * d.width();
    if (!d.contains(mesh.box[a].lo, slack) || !d.contains(mesh.box[a].hi, slack)) {
      throw DomainError("mesh box extends outside the profile domain");
    }
  }
}

}  // namespace

quadrature::SingularResult segment_integral(const CoefficientProfile& profile, const Point& p,
                                            const Point& q, double epsilon, double power) {
  using quadrature::Tail;
  const double dx = q[0] - p[0], dy = q[1] - p[1];
  const double L = std::hypot(dx, dy);
  quadrature::SingularResult out;
  out.tail = Tail::Convergent;
  if (L == 0.0) return out;
  auto coeff = [&](double s) {
    const double u = s / L;
    return profile.scalar_unchecked({p[0] + u * dx, p[1] + u * dy}) + epsilon;
  };
  auto integrand = [&](double s) { return std::pow(coeff(s), -power); };

  double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
  int kmin = 0;
  for (int k = 0; k < kEdgeSamples; ++k) {
    const double v = coeff(L * k / (kEdgeSamples - 1));
    if (v < vmin) {
      vmin = v;
      kmin = k;
    }
    vmax = std::max(vmax, v);
  }
  if (vmin > 0.25 * vmax) {
    out.value = quadrature::integrate(integrand, 0.0, L).value;
    return out;
  }
  const double a = L * std::max(kmin - 1, 0) / (kEdgeSamples - 1);
  const double b = L * std::min(kmin + 1, kEdgeSamples - 1) / (kEdgeSamples - 1);
  const double s0 = golden_min(coeff, a, b);
  const double v0 = coeff(s0);
  if (v0 > 1e-6 * vmax) {
    out.value = quadrature::integrate(integrand, 0.0, s0).value +
                quadrature::integrate(integrand, s0, L).value;
    return out;
  }
  // The integrand is evaluated through p + u (q - p): offsets finer than the
  // coordinate spacing near the zero are meaningless.
  quadrature::SingularConfig scfg;
  scfg.resolution = std::ldexp(std::numeric_limits<double>::epsilon(), 20) *
                    std::max({std::abs(p[0]), std::abs(p[1]), std::abs(q[0]), std::abs(q[1])});
  for (double far : {0.0, L}) {
    if (far == s0) continue;
    auto side = quadrature::integrate_toward(integrand, s0, far, scfg);
    if (side.tail == Tail::Divergent) {
      out.tail = Tail::Divergent;
      out.value = std::numeric_limits<double>::infinity();
      out.exponent = side.exponent;
      return out;
    }
    if (side.tail == Tail::Ambiguous) out.tail = Tail::Ambiguous;
    out.value += side.value;
    out.exponent = std::max(out.exponent, side.exponent);
  }
  return out;
}

DiscreteOperator assemble(const CoefficientProfile& profile, const Mesh& mesh, double epsilon,
                          const AssemblyOptions& options) {
  if (profile.dimension() != mesh.dimension) {
    throw ArgumentError("profile and mesh dimensions differ");
  }
  if (!profile.is_scalar()) {
    throw UnsupportedError("assembly supports scalar coefficient fields c(x) I only");
  }
  if (!(epsilon >= 0.0)) throw ArgumentError("viscosity epsilon must be nonnegative");
  check_box(profile, mesh);

  std::array<std::vector<double>, 2> cond;
  for (int a = 0; a < mesh.dimension; ++a) {
    const double h = mesh.h[a];
    auto& g = cond[a];
    g.resize(mesh.face_count(a));
    for (std::size_t f = 0; f < g.size(); ++f) {
      if (options.sampling == FaceSampling::Midpoint) {
        g[f] = (profile.scalar_unchecked(mesh.face_midpoint(a, f)) + epsilon) / (h * h);
      } else {
        const auto [i, j] = mesh.face_nodes(a, f);
        const auto r = segment_integral(profile, mesh.point(i), mesh.point(j), epsilon, 1.0);
        g[f] = r.tail == quadrature::Tail::Divergent || !(r.value > 0.0) ? 0.0 : 1.0 / (h * r.value);
      }
    }
  }
  return DiscreteOperator(mesh, profile.epsilon() + epsilon, std::move(cond));
}

double cut_conductance(const CoefficientProfile& profile, const Mesh& mesh, Interval cut,
                       double epsilon) {
  if (mesh.dimension != 1 || profile.dimension() != 1) {
    throw ArgumentError("cut conductance is defined on 1D meshes");
  }
  if (!(epsilon >= 0.0)) throw ArgumentError("viscosity epsilon must be nonnegative");
  check_box(profile, mesh);
  const double h = mesh.h[0];
  double resistance = 0.0;
  std::size_t faces = 0;
  for (std::size_t f = 0; f < mesh.face_count(0); ++f) {
    const Point m = mesh.face_midpoint(0, f);
    if (m[0] < cut.lo || m[0] > cut.hi) continue;
    ++faces;
    const double c = profile.scalar_unchecked(m) + epsilon;
    if (c <= 0.0) return 0.0;
    resistance += h / c;
  }
  if (faces == 0) throw ArgumentError("cut interval contains no faces");
  return 1.0 / resistance;
}

}  // namespace degenlab
