#include "degenlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "degenlab/error.hpp"

namespace degenlab::kernels {

namespace {

constexpr std::size_t kParallelThreshold = 4096;
constexpr std::size_t kReduceBlocks = 64;

bool parallel(Exec exec, std::size_t n) { return exec == Exec::Parallel && n >= kParallelThreshold; }

// Row i of A x, shared by apply and chebyshev_step.
struct Stencil {
  const DiscreteOperator& A;
  std::span<const double> gx, gy, shift;
  std::size_t n, stride;
  int dim;

  explicit Stencil(const DiscreteOperator& op)
      : A(op),
        gx(op.conductances(0)),
        gy(op.conductances(1)),
        shift(op.diagonal_shift()),
        n(op.mesh().n),
        stride(op.mesh().n + 1),
        dim(op.mesh().dimension) {}

  double row(std::size_t idx, std::span<const double> x) const {
    const double xi = x[idx];
    double s = shift.empty() ? 0.0 : shift[idx] * xi;
    if (dim == 1) {
      if (idx > 0) s += gx[idx - 1] * (xi - x[idx - 1]);
      if (idx < n) s += gx[idx] * (xi - x[idx + 1]);
      return s;
    }
    const std::size_t i = idx % stride, j = idx / stride;
    if (i > 0) s += gx[j * n + i - 1] * (xi - x[idx - 1]);
    if (i < n) s += gx[j * n + i] * (xi - x[idx + 1]);
    if (j > 0) s += gy[idx - stride] * (xi - x[idx - stride]);
    if (j < n) s += gy[idx] * (xi - x[idx + stride]);
    return s;
  }
};

void check_sizes(const DiscreteOperator& A, std::size_t a, std::size_t b) {
  if (a != A.size() || b != A.size()) throw ArgumentError("vector size does not match the operator");
}

}  // namespace

void apply(const DiscreteOperator& A, std::span<const double> x, std::span<double> y, Exec exec) {
  check_sizes(A, x.size(), y.size());
  const Stencil st(A);
  const std::size_t N = x.size();
#pragma omp parallel for schedule(static) if (parallel(exec, N))
  for (std::size_t i = 0; i < N; ++i) y[i] = st.row(i, x);
}

void apply_csr(const Csr& A, std::span<const double> x, std::span<double> y) {
  const std::size_t N = A.row_ptr.size() - 1;
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) acc += A.val[k] * x[A.col[k]];
    y[i] = acc;
  }
}

void chebyshev_step(const DiscreteOperator& A, double alpha, double beta,
                    std::span<const double> cur, std::span<double> next, std::span<double> acc,
                    double coeff, Exec exec) {
  check_sizes(A, cur.size(), next.size());
  const Stencil st(A);
  const std::size_t N = cur.size();
#pragma omp parallel for schedule(static) if (parallel(exec, N))
  for (std::size_t i = 0; i < N; ++i) {
    const double v = 2.0 * (alpha * st.row(i, cur) + beta * cur[i]) - next[i];
    next[i] = v;
    acc[i] += coeff * v;
  }
}

double dot(std::span<const double> a, std::span<const double> b, Exec exec) {
  const std::size_t N = a.size();
  if (b.size() != N) throw ArgumentError("dot product of vectors with different sizes");
  const std::size_t blocks = std::min<std::size_t>(kReduceBlocks, std::max<std::size_t>(N, 1));
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static) if (parallel(exec, N))
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::size_t lo = N * k / blocks, hi = N * (k + 1) / blocks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[k] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double norm2(std::span<const double> a, Exec exec) { return std::sqrt(dot(a, a, exec)); }

double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y, Exec exec) {
  const std::size_t N = x.size();
  if (y.size() != N) throw ArgumentError("axpby of vectors with different sizes");
#pragma omp parallel for schedule(static) if (parallel(exec, N))
  for (std::size_t i = 0; i < N; ++i) y[i] = a * x[i] + b * y[i];
}

}  // namespace degenlab::kernels
