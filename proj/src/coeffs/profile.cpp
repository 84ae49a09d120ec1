#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degenlab/coeffs.hpp"
#include "degenlab/error.hpp"

namespace degenlab {

double CoefficientMatrix::smallest_eigenvalue() const {
  if (dimension == 1) return xx;
  const double half_trace = 0.5 * (xx + yy);
  const double det = xx * yy - xy * xy;
  const double disc = std::max(half_trace * half_trace - det, 0.0);
  return half_trace - std::sqrt(disc);
}

double CoefficientMatrix::largest_eigenvalue() const {
  if (dimension == 1) return xx;
  const double half_trace = 0.5 * (xx + yy);
  const double det = xx * yy - xy * xy;
  const double disc = std::max(half_trace * half_trace - det, 0.0);
  return half_trace + std::sqrt(disc);
}

double CoefficientMatrix::spectral_norm() const {
  return std::max(std::abs(smallest_eigenvalue()), std::abs(largest_eigenvalue()));
}

double power_profile(double rho, double delta) {
  if (delta == 0.0) return 1.0;
  const double r2 = rho * rho;
  return std::pow(r2 / (1.0 + r2), delta);
}

double family::SurfaceDegenerate::operator()(double y) const {
  if (phi.empty()) return 0.0;
  if (phi.size() == 1) return phi.front();
  const double step = support.width() / static_cast<double>(phi.size() - 1);
  const double u = std::clamp((y - support.lo) / step, 0.0, static_cast<double>(phi.size() - 1));
  const auto k = std::min(static_cast<std::size_t>(u), phi.size() - 2);
  const double w = u - static_cast<double>(k);
  return (1.0 - w) * phi[k] + w * phi[k + 1];
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_delta(double delta, double upper) {
  if (!(delta >= 0.0 && delta < upper)) {
    std::ostringstream os;
    os << "delta must lie in [0, " << upper << "), got " << delta;
    throw ValidationError(os.str());
  }
}

// Projects tiny negative eigenvalues (>= -tol) to zero; throws below that.
CoefficientMatrix project_psd(CoefficientMatrix m, double tol) {
  if (m.dimension == 1) {
    if (m.xx < -tol) throw ValidationError("sampled coefficient is negative");
    m.xx = std::max(m.xx, 0.0);
    return m;
  }
  const double lo = m.smallest_eigenvalue();
  if (lo < -tol) throw ValidationError("sampled coefficient matrix is not positive semidefinite");
  if (lo < 0.0) {
    // Shift only the offending eigen-direction: M - lo * v v^T.
    const double hi = m.largest_eigenvalue();
    double vx = 1.0, vy = 0.0;
    if (m.xy != 0.0) {
      vx = lo - m.yy;
      vy = m.xy;
    } else if (m.yy < m.xx) {
      vx = 0.0;
      vy = 1.0;
    }
    const double nrm = std::hypot(vx, vy);
    vx /= nrm;
    vy /= nrm;
    m.xx -= lo * vx * vx;
    m.xy -= lo * vx * vy;
    m.yy -= lo * vy * vy;
    (void)hi;
  }
  return m;
}

}  // namespace

CoefficientProfile::CoefficientProfile(int dimension, Family fam, std::array<Interval, 2> domain,
                                       ProfileMetadata metadata)
    : dimension_(dimension), family_(std::move(fam)), domain_(domain),
      metadata_(std::move(metadata)) {
  if (dimension_ != 1 && dimension_ != 2) throw ValidationError("dimension must be 1 or 2");
  for (int a = 0; a < dimension_; ++a) {
    if (!(domain_[a].hi > domain_[a].lo)) throw ValidationError("degenerate domain box");
  }
  if (dimension_ == 1) domain_[1] = {0.0, 0.0};

  std::visit(overloaded{
                 [&](family::PowerDegenerate& f) {
                   require_delta(f.delta, 1.0);
                   if (f.centers.empty()) throw ValidationError("power family needs a center");
                 },
                 [&](family::RadialShell& f) {
                   require_delta(f.delta, 1.0);
                   if (dimension_ != 2) throw ValidationError("radial shell is two-dimensional");
                   if (!(f.radius > 0.0)) throw ValidationError("shell radius must be positive");
                 },
                 [&](family::SurfaceDegenerate& f) {
                   require_delta(f.delta, 1.0);
                   if (dimension_ != 2) throw ValidationError("surface family is two-dimensional");
                   if (f.phi.size() < 2 || !(f.support.width() > 0.0)) {
                     throw ValidationError("surface needs at least two samples on a proper interval");
                   }
                 },
                 [&](family::StronglyElliptic& f) {
                   f.matrix.dimension = dimension_;
                   if (!(f.matrix.smallest_eigenvalue() > 0.0)) {
                     throw ValidationError("strongly elliptic matrix must be positive definite");
                   }
                 },
                 [&](family::Sampled& f) {
                   const std::size_t ny = dimension_ == 1 ? 1 : f.points[1];
                   f.points[1] = ny;
                   if (f.points[0] < 2 || (dimension_ == 2 && ny < 2)) {
                     throw ValidationError("sampled grid needs at least two points per axis");
                   }
                   if (f.entries.size() != f.points[0] * ny) {
                     throw ValidationError("sampled grid entry count does not match its shape");
                   }
                   double scale = 0.0;
                   for (auto& m : f.entries) {
                     m.dimension = dimension_;
                     scale = std::max(scale, std::max(std::abs(m.xx), std::abs(m.yy)) + std::abs(m.xy));
                   }
                   const double tol = 1e-12 * std::max(scale, 1e-300);
                   for (auto& m : f.entries) m = project_psd(m, tol);
                 },
             },
             family_);

  // Essential bound over a sample lattice.
  const std::size_t nx = dimension_ == 1 ? 4097 : 257;
  const std::size_t ny = dimension_ == 1 ? 1 : 257;
  double nrm = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      Point p{domain_[0].lo + domain_[0].width() * static_cast<double>(i) / static_cast<double>(nx - 1),
              ny == 1 ? 0.0
                      : domain_[1].lo + domain_[1].width() * static_cast<double>(j) /
                                            static_cast<double>(ny - 1)};
      nrm = std::max(nrm, base_matrix(p).spectral_norm());
    }
  }
  if (const auto* s = std::get_if<family::Sampled>(&family_)) {
    for (const auto& m : s->entries) nrm = std::max(nrm, m.spectral_norm());
  }
  norm_ = nrm;
}

bool CoefficientProfile::is_scalar() const {
  return std::visit(overloaded{
                        [](const family::StronglyElliptic& f) { return f.matrix.is_scalar(); },
                        [](const family::Sampled& f) {
                          return std::all_of(f.entries.begin(), f.entries.end(),
                                             [](const CoefficientMatrix& m) { return m.is_scalar(); });
                        },
                        [](const auto&) { return true; },
                    },
                    family_);
}

std::string CoefficientProfile::kind() const {
  return std::visit(overloaded{
                        [](const family::PowerDegenerate&) { return std::string("power"); },
                        [](const family::RadialShell&) { return std::string("radial"); },
                        [](const family::SurfaceDegenerate&) { return std::string("surface"); },
                        [](const family::StronglyElliptic&) { return std::string("elliptic"); },
                        [](const family::Sampled&) { return std::string("sampled"); },
                    },
                    family_);
}

void CoefficientProfile::check_domain(const Point& x) const {
  for (int a = 0; a < dimension_; ++a) {
    const double slack = 1e-12 * domain_[a].width();
    if (!domain_[a].contains(x[a], slack)) {
      std::ostringstream os;
      os << "point (" << x[0];
      if (dimension_ == 2) os << ", " << x[1];
      os << ") lies outside the profile domain";
      throw DomainError(os.str());
    }
  }
}

double CoefficientProfile::base_scalar(const Point& x) const {
  return std::visit(
      overloaded{
          [&](const family::PowerDegenerate& f) {
            double rho = std::numeric_limits<double>::infinity();
            for (const auto& c : f.centers) {
              const double d = dimension_ == 1 ? std::abs(x[0] - c[0])
                                               : std::hypot(x[0] - c[0], x[1] - c[1]);
              rho = std::min(rho, d);
            }
            return power_profile(rho, f.delta);
          },
          [&](const family::RadialShell& f) {
            return power_profile(std::abs(std::hypot(x[0], x[1]) - f.radius), f.delta);
          },
          [&](const family::SurfaceDegenerate& f) {
            return power_profile(std::abs(x[1] - f(x[0])), f.delta);
          },
          [&](const auto&) { return base_matrix(x).xx; },
      },
      family_);
}

CoefficientMatrix CoefficientProfile::base_matrix(const Point& x) const {
  if (const auto* e = std::get_if<family::StronglyElliptic>(&family_)) return e->matrix;
  if (const auto* s = std::get_if<family::Sampled>(&family_)) {
    const auto nx = s->points[0];
    const auto ny = s->points[1];
    auto locate = [](double v, const Interval& iv, std::size_t n, std::size_t& k, double& w) {
      const double u = std::clamp((v - iv.lo) / iv.width() * static_cast<double>(n - 1), 0.0,
                                  static_cast<double>(n - 1));
      k = std::min(static_cast<std::size_t>(u), n - 2);
      w = u - static_cast<double>(k);
    };
    std::size_t i = 0, j = 0;
    double wx = 0.0, wy = 0.0;
    locate(x[0], domain_[0], nx, i, wx);
    if (ny > 1) locate(x[1], domain_[1], ny, j, wy);
    auto at = [&](std::size_t ii, std::size_t jj) -> const CoefficientMatrix& {
      return s->entries[jj * nx + ii];
    };
    auto mix = [](const CoefficientMatrix& a, const CoefficientMatrix& b, double w) {
      return CoefficientMatrix{a.dimension, (1 - w) * a.xx + w * b.xx, (1 - w) * a.xy + w * b.xy,
                               (1 - w) * a.yy + w * b.yy};
    };
    if (ny == 1) return mix(at(i, 0), at(i + 1, 0), wx);
    return mix(mix(at(i, j), at(i + 1, j), wx), mix(at(i, j + 1), at(i + 1, j + 1), wx), wy);
  }
  const double c = base_scalar(x);
  return {dimension_, c, 0.0, dimension_ == 2 ? c : 0.0};
}

CoefficientMatrix CoefficientProfile::eval(const Point& x) const {
  check_domain(x);
  CoefficientMatrix m = base_matrix(x);
  m.xx += epsilon_;
  if (dimension_ == 2) m.yy += epsilon_;
  return m;
}

double CoefficientProfile::scalar(const Point& x) const {
  if (!is_scalar()) throw UnsupportedError("profile is not a scalar multiple of the identity");
  check_domain(x);
  return scalar_unchecked(x);
}

double CoefficientProfile::scalar_unchecked(const Point& x) const {
  return base_scalar(x) + epsilon_;
}

CoefficientProfile CoefficientProfile::viscosity_shift(double epsilon) const {
  if (!(epsilon >= 0.0)) throw ArgumentError("viscosity epsilon must be nonnegative");
  CoefficientProfile out = *this;
  out.epsilon_ += epsilon;
  out.norm_ += epsilon;
  return out;
}

std::vector<double> CoefficientProfile::known_zeros_1d() const {
  std::vector<double> z;
  if (dimension_ != 1) return z;
  if (const auto* p = std::get_if<family::PowerDegenerate>(&family_)) {
    if (p->delta == 0.0) return z;
    for (const auto& c : p->centers) z.push_back(c[0]);
    std::sort(z.begin(), z.end());
  }
  return z;
}

}  // namespace degenlab
