#include <algorithm>
#include <cmath>
#include <limits>

#include "degenlab/coeffs.hpp"
#include "degenlab/error.hpp"

namespace degenlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::StronglyElliptic: return "StronglyElliptic";
    case Verdict::ClosableDegenerate: return "ClosableDegenerate";
    case Verdict::Separating: return "Separating";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

struct Minimum {
  double x;
  double value;
};

// Golden-section search on [a, b]; runs until the bracket collapses to a few ulps
// so that cusp minima (|x - z0|^beta) are located essentially exactly. Both interior
// points are recomputed from the bracket each step: recycled points carry the
// rounding of the initial bracket and stall the search far from a zero at the origin.
Minimum golden(const std::function<double(double)>& f, double a, double b) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = a, fc = f(a);
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid) ||
        b - a < 1e-300) {
      break;
    }
    c = b - inv_phi * (b - a);
    const double d = a + inv_phi * (b - a);
    fc = f(c);
    const double fd = f(d);
    if (fc == 0.0) return {c, fc};
    if (fd == 0.0) return {d, fd};
    if (fc <= fd) {
      b = d;
    } else {
      a = c;
      c = d;
      fc = fd;
    }
  }
  return {c, fc};
}

// Extrapolated limit of f at x0 from one side: fits v(eta) = v0 + A eta^beta to
// three geometrically spaced offsets. Returns +inf when the data are not a
// monotone power-law approach.
double extrapolated_floor(const std::function<double(double)>& f, double x0, double side,
                          double width, Interval range) {
  const double q = 1e-2;
  const double e1 = 1e-4 * width;
  const double e3 = e1 * q * q;
  if (e3 < 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x0), width)) {
    return std::numeric_limits<double>::infinity();
  }
  const double x1 = x0 + side * e1, x2 = x0 + side * e1 * q, x3 = x0 + side * e3;
  if (!range.contains(x1) || !range.contains(x3)) return std::numeric_limits<double>::infinity();
  const double v1 = f(x1), v2 = f(x2), v3 = f(x3);
  const double d1 = v1 - v2, d2 = v2 - v3;
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(d2 < d1)) return std::numeric_limits<double>::infinity();
  const double ratio = d2 / d1;
  return v3 - d2 * ratio / (1.0 - ratio);
}

}  // namespace

namespace detail {

std::vector<std::pair<double, double>> locate_minima(const std::function<double(double)>& f,
                                                     Interval range, const QuadratureConfig& cfg) {
  const std::size_t n = std::max<std::size_t>(cfg.scan_points, 3);
  const double w = range.width();
  std::vector<double> xs(n), fs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = range.lo + w * static_cast<double>(i) / static_cast<double>(n - 1);
    fs[i] = f(xs[i]);
  }
  std::vector<std::pair<double, double>> zeros;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || fs[i] < fs[i - 1];
    const bool right_ok = i + 1 == n || fs[i] <= fs[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double a = xs[i == 0 ? 0 : i - 1];
    const double b = xs[i + 1 == n ? n - 1 : i + 1];
    const Minimum m = golden(f, a, b);
    // A cusp that keeps decaying toward the minimiser extrapolates to its floor
    // even when floating point cannot reach the zero itself (small delta, x0 != 0).
    const double floor = std::min({m.value, extrapolated_floor(f, m.x, 1.0, w, range),
                                   extrapolated_floor(f, m.x, -1.0, w, range)});
    if (floor <= cfg.zero_threshold) zeros.emplace_back(m.x, std::max(floor, 0.0));
  }
  std::sort(zeros.begin(), zeros.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& z : zeros) {
    if (!merged.empty() && z.first - merged.back().first < cfg.merge_fraction * w) {
      if (z.second < merged.back().second) merged.back() = z;
      continue;
    }
    merged.push_back(z);
  }
  return merged;
}

}  // namespace detail

std::vector<double> find_zeros(const std::function<double(double)>& f, Interval range,
                               const QuadratureConfig& cfg) {
  std::vector<double> out;
  for (const auto& z : detail::locate_minima(f, range, cfg)) out.push_back(z.first);
  return out;
}

namespace {

Classification classify_1d(const std::function<double(double)>& mu, Interval range,
                            const QuadratureConfig& cfg) {
  Classification out;
  double lower = std::numeric_limits<double>::infinity();
  const std::size_t n = std::max<std::size_t>(cfg.scan_points, 3);
  for (std::size_t i = 0; i < n; ++i) {
    lower = std::min(lower, mu(range.lo + range.width() * static_cast<double>(i) /
                                              static_cast<double>(n - 1)));
  }
  std::vector<double> zeros;
  for (const auto& z : detail::locate_minima(mu, range, cfg)) {
    zeros.push_back(z.first);
    lower = std::min(lower, z.second);
  }
  out.mu_lower = std::max(lower, 0.0);

  if (zeros.empty()) {
    out.verdict = out.mu_lower > cfg.strong_ellipticity_threshold ? Verdict::StronglyElliptic
                                                                  : Verdict::Inconclusive;
    return out;
  }

  bool any_divergent = false;
  bool any_ambiguous = false;
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    const double z = zeros[k];
    bool cut_here = false;
    for (double side : {-1.0, 1.0}) {
      double reach = cfg.alpha;
      if (side > 0) {
        reach = std::min(reach, range.hi - z);
        if (k + 1 < zeros.size()) reach = std::min(reach, 0.5 * (zeros[k + 1] - z));
      } else {
        reach = std::min(reach, z - range.lo);
        if (k > 0) reach = std::min(reach, 0.5 * (z - zeros[k - 1]));
      }
      if (reach <= 0.0) continue;
      IntegrabilityEntry e;
      e.zero = z;
      e.side = side;
      const auto inv = quadrature::integrate_toward(
          [&](double x) { return 1.0 / mu(x); }, z, z + side * reach, cfg.singular);
      const auto inv_sqrt = quadrature::integrate_toward(
          [&](double x) { return 1.0 / std::sqrt(mu(x)); }, z, z + side * reach, cfg.singular);
      e.inverse = inv.tail;
      e.inverse_value = inv.value;
      e.inverse_sqrt = inv_sqrt.tail;
      e.inverse_sqrt_value = inv_sqrt.value;
      e.exponent = inv.exponent;
      if (inv.tail == quadrature::Tail::Divergent) cut_here = true;
      if (inv.tail == quadrature::Tail::Ambiguous) any_ambiguous = true;
      out.integrability_table.push_back(e);
    }
    if (cut_here) {
      any_divergent = true;
      out.cut_points.push_back(z);
    }
  }
  if (any_divergent) {
    out.verdict = Verdict::Separating;
  } else if (any_ambiguous) {
    out.verdict = Verdict::Inconclusive;
  } else {
    out.verdict = Verdict::ClosableDegenerate;
  }
  return out;
}

}  // namespace

Classification classify(const CoefficientProfile& profile, const QuadratureConfig& cfg) {
  if (profile.dimension() == 1) {
    return classify_1d([&](double x) { return profile.smallest_eigenvalue({x, 0.0}); },
                       profile.domain()[0], cfg);
  }

  // 2D: first the cheap strong-ellipticity screen over a lattice.
  double lower = std::numeric_limits<double>::infinity();
  const auto& dom = profile.domain();
  constexpr int m = 257;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const Point p{dom[0].lo + dom[0].width() * i / (m - 1), dom[1].lo + dom[1].width() * j / (m - 1)};
      lower = std::min(lower, profile.smallest_eigenvalue(p));
    }
  }
  if (lower > cfg.strong_ellipticity_threshold) {
    Classification out;
    out.verdict = Verdict::StronglyElliptic;
    out.mu_lower = lower;
    return out;
  }

  // Declared codimension-one degeneracy: classify the normal profile c(rho).
  double delta = -1.0;
  if (const auto* r = std::get_if<family::RadialShell>(&profile.family())) delta = r->delta;
  if (const auto* s = std::get_if<family::SurfaceDegenerate>(&profile.family())) delta = s->delta;
  if (delta < 0.0) {
    throw ArgumentError(
        "classification in 2D needs a radial or surface degeneracy (normal profile)");
  }
  const double eps = profile.epsilon();
  const double reach = 2.0 * cfg.alpha;
  auto out = classify_1d([&](double rho) { return power_profile(rho, delta) + eps; },
                         {-reach, reach}, cfg);
  out.mu_lower = std::min(out.mu_lower, std::max(lower, 0.0));
  return out;
}

}  // namespace degenlab
