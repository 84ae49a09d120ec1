#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace degenlab::quadrature {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15 point) on [a, b].
Result integrate(const Integrand& f, double a, double b, double rel_tol = 1e-11,
                 unsigned max_depth = 15);

enum class Tail { Convergent, Divergent, Ambiguous };

/// One level of a dyadic-shell integration toward a singular point.
struct ShellLevel {
  double eta = 0.0;      ///< distance of the inner shell edge from the singular point
  double partial = 0.0;  ///< integral over [eta, alpha] measured from the singular point
  double increment = 0.0;
};

struct SingularConfig {
  int min_levels = 12;
  int max_levels = 120;
  double increment_ratio_threshold = 0.99;  ///< r_k >= threshold counts as non-decaying
  double rel_tol = 1e-10;
  /// Smallest meaningful offset from the singular point, e.g. the spacing of
  /// representable coordinates when the integrand is evaluated through them.
  double resolution = 0.0;
};

struct SingularResult {
  Tail tail = Tail::Ambiguous;
  double value = 0.0;  ///< +inf when divergent
  double exponent = 0.0;  ///< beta in f ~ |z - z0|^(-beta), estimated from increment ratios
  std::vector<ShellLevel> levels;
};

/// Integrates f over the segment from the singular point z0 to z_far (either
/// orientation) by dyadic shells |z - z0| in [eta_k, eta_{k-1}], eta_k = L 2^-k.
/// Divergence is declared when the last three increment ratios are all >= the
/// threshold; convergence adds the extrapolated geometric tail of the increments.
SingularResult integrate_toward(const Integrand& f, double z0, double z_far,
                                const SingularConfig& cfg = {});

}  // namespace degenlab::quadrature
