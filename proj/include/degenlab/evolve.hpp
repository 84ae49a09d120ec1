#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degenlab/grid.hpp"
#include "degenlab/kernels.hpp"

namespace degenlab {

// ---------------------------------------------------------------------------
// Heat semigroup

enum class HeatBackend { ChebyshevExp, CrankNicolson, BackwardEuler, Spectral };

std::string to_string(HeatBackend b);
HeatBackend heat_backend_from_string(const std::string& s);

struct HeatOptions {
  HeatBackend backend = HeatBackend::ChebyshevExp;
  double tolerance = 1e-14;        ///< Chebyshev truncation, relative to |phi0|
  std::size_t max_degree = 4000;   ///< larger degrees split t into substeps
  double dt = 0.0;                 ///< time-step cap for CN/BE; 0 uses t / steps
  std::size_t steps = 200;         ///< CN/BE step count when dt == 0
  double cg_tolerance = 1e-12;     ///< CN/BE in 2D
  kernels::Exec exec = kernels::Exec::Parallel;
};

struct HeatField {
  std::vector<double> values;
  double time = 0.0;
  std::optional<std::size_t> source;

  double mass(double cell_volume) const;
  void export_csv(const std::filesystem::path& path, const Mesh& mesh) const;
};

/// e^{-tA} by a Chebyshev expansion on the Gershgorin interval. Coefficients are
/// e^{-alpha} I_k(alpha) (scaled modified Bessel values) times the interval shift.
class ChebyshevExp {
 public:
  ChebyshevExp(const DiscreteOperator& A, double t, double tolerance = 1e-14,
               std::size_t max_degree = 4000);

  void apply(std::span<const double> in, std::span<double> out,
             kernels::Exec exec = kernels::Exec::Parallel) const;

  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  std::size_t substeps() const { return substeps_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  const DiscreteOperator* A_;
  std::vector<double> coeffs_;
  std::size_t substeps_ = 1;
  double alpha_ = 0.0;  // scale of A in the map to [-1, 1]
  double beta_ = 0.0;
  bool identity_ = false;
  double identity_factor_ = 1.0;
};

/// e^{-alpha} I_k(alpha) for k = 0..K where the tail 2 sum_{k>K} falls below `tail`.
/// Computed by Miller's backward recurrence normalised with I_0 + 2 sum I_k = e^alpha.
std::vector<double> scaled_bessel_i(double alpha, double tail = 1e-16);

HeatField heat_evolve(const DiscreteOperator& A, std::span<const double> phi0, double t,
                      const HeatOptions& options = {});

/// Evolves the density-normalised delta (1 / cell_volume at `source`).
HeatField kernel_column(const DiscreteOperator& A, std::size_t source, double t,
                        const HeatOptions& options = {});

// ---------------------------------------------------------------------------
// Spectral decomposition (1D)

inline constexpr std::size_t kSpectralLimit = 4097;

/// Full eigendecomposition of a 1D operator (tridiagonal), A = V diag(lambda) V^T.
/// Memoised on disk when DEGENLAB_CACHE names a directory.
class Spectrum {
 public:
  static std::shared_ptr<const Spectrum> compute(const DiscreteOperator& A);

  std::size_t size() const { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// Component i of eigenvector k.
  double vector(std::size_t i, std::size_t k) const { return vectors_[k * size() + i]; }

  /// diag f(A)_ii = sum_k f(lambda_k) V_ik^2
  template <class F>
  std::vector<double> diagonal(F&& f) const {
    const std::size_t N = size();
    std::vector<double> d(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      const double fk = f(eigenvalues_[k]);
      if (fk == 0.0) continue;
      const double* v = vectors_.data() + k * N;
      for (std::size_t i = 0; i < N; ++i) d[i] += fk * v[i] * v[i];
    }
    return d;
  }

  /// f(A) x
  template <class F>
  std::vector<double> apply(F&& f, std::span<const double> x) const {
    const std::size_t N = size();
    std::vector<double> y(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      const double* v = vectors_.data() + k * N;
      double c = 0.0;
      for (std::size_t i = 0; i < N; ++i) c += v[i] * x[i];
      c *= f(eigenvalues_[k]);
      for (std::size_t i = 0; i < N; ++i) y[i] += c * v[i];
    }
    return y;
  }

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> vectors_;  // column-major, N x N
};

// ---------------------------------------------------------------------------
// Kernel sup-norms

struct SampleStrategy {
  enum class Kind { All, Interior, Window, Indices };
  Kind kind = Kind::All;
  double margin = 0.0;       ///< Interior: minimum distance to the box boundary
  Interval window{};         ///< Window: first-axis range
  std::vector<std::size_t> indices;

  static SampleStrategy all() { return {}; }
  static SampleStrategy interior(double margin);
  static SampleStrategy within(Interval window);
  static SampleStrategy at(std::vector<std::size_t> indices);

  std::string tag() const;
  std::vector<std::size_t> select(const Mesh& mesh) const;
};

/// Margin that keeps the mirror image of a wall below 1e-6 of the free kernel.
double interior_margin(double t, double coefficient_norm);

struct SupKernel {
  double time = 0.0;
  double value = 0.0;
  std::size_t argmax = 0;
  std::string strategy;
};

/// max over sampled i of K_t(x_i; x_i). 1D operators up to kSpectralLimit points
/// use one eigendecomposition; otherwise one Chebyshev column per sample.
SupKernel sup_kernel(const DiscreteOperator& A, double t, const SampleStrategy& strategy,
                     const HeatOptions& options = {});

std::vector<SupKernel> sup_kernel_series(const DiscreteOperator& A, std::span<const double> times,
                                         const SampleStrategy& strategy,
                                         const HeatOptions& options = {});

void export_sup_series_csv(const std::filesystem::path& path, std::span<const SupKernel> series);

// ---------------------------------------------------------------------------
// Linear solves and resolvent powers

/// Thomas elimination for a symmetric tridiagonal matrix, factored once.
class TridiagonalSolver {
 public:
  TridiagonalSolver(std::vector<double> diag, std::vector<double> off);
  void solve(std::span<const double> rhs, std::span<double> x) const;
  /// Normwise backward error |M x - rhs|_inf / (|M|_inf |x|_inf + |rhs|_inf).
  double relative_residual(std::span<const double> x, std::span<const double> rhs) const;

 private:
  std::vector<double> diag_, off_;
  std::vector<double> cprime_, inv_denom_;
};

/// (I + s A) as a tridiagonal system; 1D operators only.
TridiagonalSolver shifted_solver(const DiscreteOperator& A, double s);

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned CG for (I + s A) x = rhs; `x` holds the initial guess.
/// Throws SolverError when `max_iterations` is reached.
CgResult cg_shifted(const DiscreteOperator& A, double s, std::span<const double> rhs,
                    std::span<double> x, double tolerance, std::size_t max_iterations = 0);

struct ResolventOptions {
  double direct_residual = 1e-12;
  double cg_tolerance = 1e-10;
  std::size_t max_iterations = 0;  ///< 0 picks 10 N
};

/// m successive solves of (I + r^2 A) u = v.
std::vector<double> resolvent_power_apply(const DiscreteOperator& A, double r, int m,
                                          std::span<const double> phi,
                                          const ResolventOptions& options = {});

/// Density of (I + r^2 A)^{-2m} on the diagonal: |(I + r^2 A)^{-m} e_i|^2 / cell_volume.
double resolvent_diagonal(const DiscreteOperator& A, double r, int m, std::size_t index,
                          const ResolventOptions& options = {});

// ---------------------------------------------------------------------------
// Wave propagator

struct WaveOptions {
  double cfl_safety = 0.5;
  double blowup_factor = 10.0;
  kernels::Exec exec = kernels::Exec::Parallel;
};

struct WaveField {
  std::vector<double> displacement;
  std::vector<double> previous;
  double time = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  double energy_drift = 0.0;  ///< max relative change of the leapfrog energy

  void export_csv(const std::filesystem::path& path, const Mesh& mesh) const;
};

/// Leapfrog approximation of cos(t A^{1/2}) phi0 with u^{-1} = u^{1}.
WaveField wave_evolve(const DiscreteOperator& A, std::span<const double> phi0, double t,
                      const WaveOptions& options = {});

}  // namespace degenlab
