#include <algorithm>
#include <cmath>

#include "degenlab/error.hpp"
#include "degenlab/evolve.hpp"

namespace degenlab {

std::vector<double> scaled_bessel_i(double alpha, double tail) {
  if (!(alpha >= 0.0)) throw ArgumentError("Bessel argument must be nonnegative");
  if (alpha == 0.0) return {1.0};
  const double digits = std::max(-std::log(tail), 10.0) + 10.0;
  const auto M = static_cast<std::size_t>(
      40.0 + std::ceil(std::max(digits, 1.5 * std::sqrt(2.0 * alpha * digits))));
  std::vector<double> b(M + 2, 0.0);
  b[M] = 1.0;
  for (std::size_t k = M; k >= 1; --k) {
    b[k - 1] = b[k + 1] + (2.0 * static_cast<double>(k) / alpha) * b[k];
    if (b[k - 1] > 1e250) {
      for (std::size_t j = k - 1; j <= M; ++j) b[j] *= 1e-250;
    }
  }
  double sum = b[0];
  for (std::size_t k = 1; k <= M; ++k) sum += 2.0 * b[k];
  for (auto& v : b) v /= sum;

  double rest = 0.0;
  std::size_t K = M;
  while (K > 0 && rest + 2.0 * b[K] <= tail) {
    rest += 2.0 * b[K];
    --K;
  }
  b.resize(K + 1);
  return b;
}

ChebyshevExp::ChebyshevExp(const DiscreteOperator& A, double t, double tolerance,
                           std::size_t max_degree)
    : A_(&A) {
  if (!(t >= 0.0)) throw ArgumentError("evolution time must be nonnegative");
  if (max_degree < 8) throw ArgumentError("Chebyshev degree cap must be at least 8");
  const double lo = std::min(0.0, A.gershgorin_lower());
  const double hi = A.spectral_norm_bound();
  if (t == 0.0 || hi - lo <= 0.0) {
    identity_ = true;
    identity_factor_ = std::exp(-t * lo);
    return;
  }
  // Degree grows like sqrt(alpha); split t until one substep fits under the cap.
  for (substeps_ = 1;; substeps_ *= 2) {
    const double ts = t / static_cast<double>(substeps_);
    const double a = 0.5 * ts * (hi - lo);
    auto b = scaled_bessel_i(a, tolerance / static_cast<double>(substeps_));
    if (b.size() - 1 <= max_degree) {
      const double pref = std::exp(-ts * lo);
      coeffs_.resize(b.size());
      for (std::size_t k = 0; k < b.size(); ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        coeffs_[k] = pref * sign * (k == 0 ? b[0] : 2.0 * b[k]);
      }
      break;
    }
  }
  alpha_ = 2.0 / (hi - lo);
  beta_ = -(hi + lo) / (hi - lo);
}

void ChebyshevExp::apply(std::span<const double> in, std::span<double> out,
                         kernels::Exec exec) const {
  const std::size_t N = A_->size();
  if (in.size() != N || out.size() != N) throw ArgumentError("vector size does not match the operator");
  if (identity_) {
    for (std::size_t i = 0; i < N; ++i) out[i] = identity_factor_ * in[i];
    return;
  }
  std::vector<double> cur(in.begin(), in.end()), next(N), acc(N);
  for (std::size_t s = 0; s < substeps_; ++s) {
    for (std::size_t i = 0; i < N; ++i) {
      acc[i] = coeffs_[0] * cur[i];
      next[i] = 0.0;
    }
    if (coeffs_.size() > 1) {
      // T_1 = B T_0, then T_{k+1} = 2 B T_k - T_{k-1}.
      kernels::chebyshev_step(*A_, 0.5 * alpha_, 0.5 * beta_, cur, next, acc, coeffs_[1], exec);
      std::swap(cur, next);
      for (std::size_t k = 2; k < coeffs_.size(); ++k) {
        kernels::chebyshev_step(*A_, alpha_, beta_, cur, next, acc, coeffs_[k], exec);
        std::swap(cur, next);
      }
    }
    std::swap(cur, acc);
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

}  // namespace degenlab
