#include <algorithm>
#include <cmath>

#include "degenlab/error.hpp"
#include "degenlab/evolve.hpp"

namespace degenlab {

WaveField wave_evolve(const DiscreteOperator& A, std::span<const double> phi0, double t,
                      const WaveOptions& options) {
  if (!(t >= 0.0)) throw ArgumentError("evolution time must be nonnegative");
  if (!(options.cfl_safety > 0.0 && options.cfl_safety <= 1.0)) {
    throw ArgumentError("CFL safety factor must lie in (0, 1]");
  }
  const std::size_t N = A.size();
  if (phi0.size() != N) throw ArgumentError("initial datum does not match the operator");

  WaveField w;
  w.displacement.assign(phi0.begin(), phi0.end());
  w.previous = w.displacement;
  const double lmax = A.spectral_norm_bound();
  if (t == 0.0) return w;
  if (lmax <= 0.0) {
    w.time = t;
    w.dt = t;
    w.steps = 1;
    return w;
  }
  const double dt_max = options.cfl_safety * 2.0 / std::sqrt(lmax);
  w.steps = static_cast<std::size_t>(std::ceil(t / dt_max - 1e-12));
  w.steps = std::max<std::size_t>(w.steps, 1);
  const double dt = t / static_cast<double>(w.steps);
  w.dt = dt;
  const double dt2 = dt * dt;
  const double bound = options.blowup_factor * std::max(kernels::norm_inf(phi0), 1e-300);

  std::vector<double> prev(phi0.begin(), phi0.end()), cur(N), Au(N);
  // u^1 from u^{-1} = u^1: u^1 = u^0 - dt^2/2 A u^0.
  kernels::apply(A, prev, Au, options.exec);
  for (std::size_t i = 0; i < N; ++i) cur[i] = prev[i] - 0.5 * dt2 * Au[i];

  // Leapfrog invariant E^{k+1/2} = |u^{k+1} - u^k|^2 / dt^2 + (u^{k+1})^T A u^k.
  auto energy = [&](std::span<const double> older, std::span<const double> newer,
                    std::span<const double> A_older) {
    double kin = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double d = newer[i] - older[i];
      kin += d * d;
    }
    return kin / dt2 + kernels::dot(newer, A_older, options.exec);
  };
  const double e0 = energy(prev, cur, Au);
  double drift = 0.0;

  for (std::size_t k = 1; k < w.steps; ++k) {
    kernels::apply(A, cur, Au, options.exec);
    for (std::size_t i = 0; i < N; ++i) prev[i] = 2.0 * cur[i] - prev[i] - dt2 * Au[i];
    std::swap(prev, cur);
    const double e = energy(prev, cur, Au);
    if (e0 != 0.0) drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
    if (k % 16 == 0 && kernels::norm_inf(cur) > bound) {
      throw CflError("leapfrog amplitude exceeded " + std::to_string(options.blowup_factor) +
                     "x the initial sup-norm");
    }
  }
  if (kernels::norm_inf(cur) > bound) {
    throw CflError("leapfrog amplitude exceeded the blow-up bound");
  }
  w.displacement = std::move(cur);
  w.previous = std::move(prev);
  w.time = t;
  w.energy_drift = drift;
  return w;
}

}  // namespace degenlab
