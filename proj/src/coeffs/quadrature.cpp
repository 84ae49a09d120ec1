#include "degenlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace degenlab::quadrature {

Result integrate(const Integrand& f, double a, double b, double rel_tol, unsigned max_depth) {
  if (a == b) return {};
  // Work on [0, 1]: the adaptive error estimate misbehaves on tiny intervals.
  const double w = b - a;
  auto g = [&](double s) { return f(a + w * s); };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      g, 0.0, 1.0, max_depth, rel_tol, &err);
  return {w * v, std::abs(w) * err};
}

namespace {

bool settled(const std::vector<double>& ratios, double threshold, bool below) {
  if (ratios.size() < 3) return false;
  for (std::size_t i = ratios.size() - 3; i < ratios.size(); ++i) {
    if (below ? !(ratios[i] < threshold) : !(ratios[i] >= threshold)) return false;
  }
  return true;
}

}  // namespace

SingularResult integrate_toward(const Integrand& f, double z0, double z_far,
                                const SingularConfig& cfg) {
  SingularResult out;
  const double length = std::abs(z_far - z0);
  if (length == 0.0) {
    out.tail = Tail::Convergent;
    return out;
  }
  const double dir = z_far > z0 ? 1.0 : -1.0;
  // Shells narrower than ~1e6 ulps of z0 hold too few distinct points to integrate.
  const double floor_eta =
      std::max({std::ldexp(std::numeric_limits<double>::epsilon(), 20) * std::abs(z0),
                std::numeric_limits<double>::min() * 1e10, cfg.resolution});

  if (0.5 * length < floor_eta) {
    // The whole segment lies below the resolution of the singular point.
    out.tail = Tail::Convergent;
    return out;
  }

  std::vector<double> ratios;
  double partial = 0.0;
  double prev_inc = 0.0;
  double outer = length;
  for (int k = 1; k <= cfg.max_levels; ++k) {
    const double eta = length * std::ldexp(1.0, -k);
    if (eta < floor_eta) break;
    const double lo = z0 + dir * eta;
    const double hi = z0 + dir * outer;
    // Rounding of z0 + offset limits the attainable accuracy of thin shells.
    const double tol = std::max(1e-11, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(z0) / eta +
                                           std::ldexp(cfg.resolution, -20) / eta);
    const double inc = std::abs(integrate(f, std::min(lo, hi), std::max(lo, hi), tol).value);
    partial += inc;
    out.levels.push_back({eta, partial, inc});
    if (k > 1) ratios.push_back(prev_inc > 0.0 ? inc / prev_inc : 0.0);
    prev_inc = inc;
    outer = eta;

    if (!std::isfinite(partial)) {
      out.tail = Tail::Divergent;
      out.value = std::numeric_limits<double>::infinity();
      out.exponent = 1.0;
      return out;
    }
    if (k < cfg.min_levels) continue;
    if (settled(ratios, cfg.increment_ratio_threshold, false)) {
      out.tail = Tail::Divergent;
      out.value = std::numeric_limits<double>::infinity();
      out.exponent = 1.0 + std::log2(ratios.back());
      return out;
    }
    if (settled(ratios, cfg.increment_ratio_threshold, true)) {
      const double r = ratios.back();
      const double tail = inc * r / (1.0 - r);
      const double drift = std::abs(ratios.back() - ratios[ratios.size() - 2]);
      if (tail <= cfg.rel_tol * partial && drift < 1e-3) {
        out.tail = Tail::Convergent;
        out.value = partial + tail;
        out.exponent = r > 0.0 ? 1.0 + std::log2(r) : 0.0;
        return out;
      }
    }
  }
  // Level budget exhausted: accept a settled geometric tail, otherwise ambiguous.
  if (settled(ratios, cfg.increment_ratio_threshold, true)) {
    const double r = ratios.back();
    out.tail = Tail::Convergent;
    out.value = partial + prev_inc * r / (1.0 - r);
    out.exponent = r > 0.0 ? 1.0 + std::log2(r) : 0.0;
  } else if (settled(ratios, cfg.increment_ratio_threshold, false)) {
    out.tail = Tail::Divergent;
    out.value = std::numeric_limits<double>::infinity();
    out.exponent = 1.0 + std::log2(ratios.back());
  } else {
    out.tail = Tail::Ambiguous;
    out.value = partial;
  }
  return out;
}

}  // namespace degenlab::quadrature
