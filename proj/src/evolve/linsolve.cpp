#include <algorithm>
#include <cmath>
#include <limits>

#include "degenlab/error.hpp"
#include "degenlab/evolve.hpp"

namespace degenlab {

TridiagonalSolver::TridiagonalSolver(std::vector<double> diag, std::vector<double> off)
    : diag_(std::move(diag)), off_(std::move(off)) {
  const std::size_t N = diag_.size();
  if (N == 0 || off_.size() + 1 != N) throw ArgumentError("tridiagonal band sizes are inconsistent");
  cprime_.assign(N, 0.0);
  inv_denom_.assign(N, 0.0);
  double denom = diag_[0];
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) denom = diag_[i] - off_[i - 1] * cprime_[i - 1];
    if (denom == 0.0) throw SolverError("singular tridiagonal pivot", 0.0);
    inv_denom_[i] = 1.0 / denom;
    if (i + 1 < N) cprime_[i] = off_[i] * inv_denom_[i];
  }
}

void TridiagonalSolver::solve(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t N = diag_.size();
  if (rhs.size() != N || x.size() != N) throw ArgumentError("vector size does not match the system");
  x[0] = rhs[0] * inv_denom_[0];
  for (std::size_t i = 1; i < N; ++i) x[i] = (rhs[i] - off_[i - 1] * x[i - 1]) * inv_denom_[i];
  for (std::size_t i = N - 1; i-- > 0;) x[i] -= cprime_[i] * x[i + 1];
}

double TridiagonalSolver::relative_residual(std::span<const double> x,
                                            std::span<const double> rhs) const {
  const std::size_t N = diag_.size();
  double r = 0.0, bnorm = 0.0, xnorm = 0.0, mnorm = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double v = diag_[i] * x[i];
    double row = std::abs(diag_[i]);
    if (i > 0) {
      v += off_[i - 1] * x[i - 1];
      row += std::abs(off_[i - 1]);
    }
    if (i + 1 < N) {
      v += off_[i] * x[i + 1];
      row += std::abs(off_[i]);
    }
    r = std::max(r, std::abs(v - rhs[i]));
    bnorm = std::max(bnorm, std::abs(rhs[i]));
    xnorm = std::max(xnorm, std::abs(x[i]));
    mnorm = std::max(mnorm, row);
  }
  return r / std::max(mnorm * xnorm + bnorm, std::numeric_limits<double>::min());
}

TridiagonalSolver shifted_solver(const DiscreteOperator& A, double s) {
  auto d = A.diagonal();
  auto e = A.off_diagonal_1d();
  for (auto& v : d) v = 1.0 + s * v;
  for (auto& v : e) v *= s;
  return TridiagonalSolver(std::move(d), std::move(e));
}

CgResult cg_shifted(const DiscreteOperator& A, double s, std::span<const double> rhs,
                    std::span<double> x, double tolerance, std::size_t max_iterations) {
  using kernels::dot;
  const std::size_t N = A.size();
  if (rhs.size() != N || x.size() != N) throw ArgumentError("vector size does not match the operator");
  if (max_iterations == 0) max_iterations = 10 * N + 100;
  const auto diag = A.diagonal();
  std::vector<double> r(N), z(N), p(N), q(N), inv(N);
  for (std::size_t i = 0; i < N; ++i) inv[i] = 1.0 / (1.0 + s * diag[i]);

  auto op = [&](std::span<const double> v, std::span<double> out) {
    kernels::apply(A, v, out);
    for (std::size_t i = 0; i < N; ++i) out[i] = v[i] + s * out[i];
  };
  const double bnorm = std::max(kernels::norm2(rhs), std::numeric_limits<double>::min());
  op(x, q);
  for (std::size_t i = 0; i < N; ++i) r[i] = rhs[i] - q[i];
  for (std::size_t i = 0; i < N; ++i) z[i] = inv[i] * r[i];
  p = z;
  double rz = dot(r, z);
  CgResult res;
  res.relative_residual = kernels::norm2(r) / bnorm;
  while (res.relative_residual > tolerance) {
    if (res.iterations >= max_iterations) {
      throw SolverError("conjugate gradient did not converge", res.relative_residual);
    }
    op(p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = inv[i] * r[i];
    }
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
    ++res.iterations;
    res.relative_residual = kernels::norm2(r) / bnorm;
  }
  // Confirm against the true residual.
  op(x, q);
  for (std::size_t i = 0; i < N; ++i) r[i] = rhs[i] - q[i];
  res.relative_residual = kernels::norm2(r) / bnorm;
  return res;
}

std::vector<double> resolvent_power_apply(const DiscreteOperator& A, double r, int m,
                                          std::span<const double> phi,
                                          const ResolventOptions& options) {
  if (!(r > 0.0)) throw ArgumentError("resolvent scale r must be positive");
  if (m < 1) throw ArgumentError("resolvent power m must be at least 1");
  if (phi.size() != A.size()) throw ArgumentError("vector size does not match the operator");
  const double s = r * r;
  std::vector<double> v(phi.begin(), phi.end()), u(phi.size());
  if (A.mesh().dimension == 1) {
    const auto solver = shifted_solver(A, s);
    for (int k = 0; k < m; ++k) {
      solver.solve(v, u);
      const double res = solver.relative_residual(u, v);
      if (res > options.direct_residual) throw SolverError("tridiagonal solve inaccurate", res);
      std::swap(u, v);
    }
    return v;
  }
  for (int k = 0; k < m; ++k) {
    std::copy(v.begin(), v.end(), u.begin());
    cg_shifted(A, s, v, u, options.cg_tolerance, options.max_iterations);
    std::swap(u, v);
  }
  return v;
}

double resolvent_diagonal(const DiscreteOperator& A, double r, int m, std::size_t index,
                          const ResolventOptions& options) {
  if (index >= A.size()) throw ArgumentError("source index out of range");
  std::vector<double> e(A.size(), 0.0);
  e[index] = 1.0;
  const auto u = resolvent_power_apply(A, r, m, e, options);
  return kernels::dot(u, u) / A.mesh().cell_volume();
}

}  // namespace degenlab
