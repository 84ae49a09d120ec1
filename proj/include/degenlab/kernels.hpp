#pragma once

#include <span>

#include "degenlab/grid.hpp"

namespace degenlab::kernels {

/// Serial runs on the calling thread; use it inside an outer parallel loop.
enum class Exec { Serial, Parallel };

/// y = A x through the face stencil (flux form, so A 1 = 0 exactly without a diagonal shift).
void apply(const DiscreteOperator& A, std::span<const double> x, std::span<double> y,
           Exec exec = Exec::Parallel);

/// y = A x from the assembled CSR entries; serial reference for tests.
void apply_csr(const Csr& A, std::span<const double> x, std::span<double> y);

/// next = 2 (alpha A cur + beta cur) - next; acc += coeff * next.
/// `next` holds the previous iterate on entry.
void chebyshev_step(const DiscreteOperator& A, double alpha, double beta,
                    std::span<const double> cur, std::span<double> next, std::span<double> acc,
                    double coeff, Exec exec = Exec::Parallel);

/// Reductions use a fixed block partition so results do not depend on the thread count.
double dot(std::span<const double> a, std::span<const double> b, Exec exec = Exec::Parallel);
double norm2(std::span<const double> a, Exec exec = Exec::Parallel);
double norm1(std::span<const double> a);
double norm_inf(std::span<const double> a);

/// y = a x + b y
void axpby(double a, std::span<const double> x, double b, std::span<double> y,
           Exec exec = Exec::Parallel);

}  // namespace degenlab::kernels
