#include <gtest/gtest.h>

#include <cmath>

#include "degenlab/error.hpp"
#include "degenlab/grid.hpp"
#include "degenlab/kernels.hpp"
#include "degenlab/quadrature.hpp"
#include "support.hpp"

using namespace degenlab;
using namespace testing_support;

TEST(Mesh, Geometry) {
  const auto m = build_mesh(1, {Interval{-1.0, 1.0}, {}}, 8);
  EXPECT_EQ(m.size(), 9u);
  EXPECT_DOUBLE_EQ(m.spacing(), 0.25);
  EXPECT_DOUBLE_EQ(m.point(4)[0], 0.0);
  EXPECT_EQ(m.nearest({0.13, 0.0}), 5u);
  EXPECT_EQ(m.nearest({9.0, 0.0}), 8u);
  EXPECT_EQ(m.face_count(0), 8u);
  EXPECT_DOUBLE_EQ(m.face_midpoint(0, 0)[0], -0.875);

  const auto m2 = build_mesh(2, {Interval{0.0, 1.0}, Interval{0.0, 2.0}}, 10);
  EXPECT_EQ(m2.size(), 121u);
  EXPECT_EQ(m2.face_count(0), 110u);
  EXPECT_EQ(m2.face_count(1), 110u);
  EXPECT_DOUBLE_EQ(m2.cell_volume(), 0.1 * 0.2);
  const auto idx = m2.index(3, 7);
  EXPECT_EQ(m2.coords(idx)[0], 3u);
  EXPECT_EQ(m2.coords(idx)[1], 7u);
  for (int axis : {0, 1}) {
    for (std::size_t f = 0; f < m2.face_count(axis); f += 13) {
      const auto [a, b] = m2.face_nodes(axis, f);
      const auto pa = m2.point(a), pb = m2.point(b), mid = m2.face_midpoint(axis, f);
      EXPECT_NEAR(0.5 * (pa[0] + pb[0]), mid[0], 1e-15);
      EXPECT_NEAR(0.5 * (pa[1] + pb[1]), mid[1], 1e-15);
      EXPECT_NEAR(std::hypot(pa[0] - pb[0], pa[1] - pb[1]), m2.spacing(axis), 1e-15);
    }
  }
}

TEST(Mesh, Preconditions) {
  EXPECT_THROW(build_mesh(1, {Interval{0.0, 1.0}, {}}, 7), ArgumentError);
  EXPECT_THROW(build_mesh(1, {Interval{1.0, 1.0}, {}}, 16), ArgumentError);
  EXPECT_THROW(build_mesh(2, {Interval{0.0, 1.0}, Interval{0.0, 1.0}}, 4096), ResourceError);
  EXPECT_NO_THROW(build_mesh(2, {Interval{0.0, 1.0}, Interval{0.0, 1.0}}, 4096, std::size_t{1} << 25));
}

// Independent dense assembly straight from the finite-volume rule.
Eigen::MatrixXd oracle_1d(const CoefficientProfile& p, const Mesh& m, double eps) {
  const auto N = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  const double h = m.spacing();
  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    const double mid = m.box[0].lo + (static_cast<double>(i) + 0.5) * h;
    const double g = (p.scalar({mid, 0.0}) + eps) / (h * h);
    M(i, i) += g;
    M(i + 1, i + 1) += g;
    M(i, i + 1) -= g;
    M(i + 1, i) -= g;
  }
  return M;
}

TEST(Assemble, MatchesDenseOracle1d) {
  for (double delta : {0.0, 0.25, 0.75}) {
    const auto p = power_1d(delta, {0.1});
    const auto m = build_mesh(1, p.domain(), 64);
    for (double eps : {0.0, 0.01}) {
      const auto A = assemble(p, m, eps);
      const Eigen::MatrixXd diff = dense(A) - oracle_1d(p, m, eps);
      EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-12 * dense(A).cwiseAbs().maxCoeff());
    }
  }
}

TEST(Assemble, FivePointStencil2d) {
  const auto p = radial_2d(0.5);
  const auto m = build_mesh(2, p.domain(), 16);
  const auto A = assemble(p, m, 0.0);
  const double h = m.spacing(0);
  const std::size_t i = m.index(5, 9);
  const auto pt = m.point(i);
  auto g = [&](double x, double y) { return p.scalar({x, y}) / (h * h); };
  EXPECT_NEAR(A.entry(i, m.index(6, 9)), -g(pt[0] + h / 2, pt[1]), 1e-12);
  EXPECT_NEAR(A.entry(i, m.index(5, 8)), -g(pt[0], pt[1] - h / 2), 1e-12);
  const double diag = g(pt[0] + h / 2, pt[1]) + g(pt[0] - h / 2, pt[1]) + g(pt[0], pt[1] + h / 2) +
                      g(pt[0], pt[1] - h / 2);
  EXPECT_NEAR(A.entry(i, i), diag, 1e-10);
  EXPECT_EQ(A.entry(i, m.index(6, 10)), 0.0);
}

class MarkovProperty : public ::testing::TestWithParam<int> {};

TEST_P(MarkovProperty, AssembledOperatorsAreMMatrices) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double delta = 0.95 * u(rng);
  const double center = -2.0 + 4.0 * u(rng);
  const double eps = u(rng) < 0.5 ? 0.0 : std::pow(10.0, -6.0 * u(rng));
  const std::size_t n = 8 + static_cast<std::size_t>(200 * u(rng));
  const bool two_d = u(rng) < 0.3;
  const auto p = two_d ? radial_2d(delta, 0.5 + u(rng)) : power_1d(delta, {center});
  const auto m = build_mesh(two_d ? 2 : 1, p.domain(), two_d ? n / 4 + 8 : n);
  const auto A = assemble(p, m, eps, {u(rng) < 0.5 ? FaceSampling::Midpoint : FaceSampling::EdgeHarmonic});
  const auto r = markov_check(A, 7);
  EXPECT_EQ(r.max_asymmetry, 0.0);
  EXPECT_EQ(r.max_positive_offdiag, 0.0);
  EXPECT_LE(r.max_row_sum, 1e-13 * r.norm_inf);
  EXPECT_GE(r.min_rayleigh, -1e-13 * r.norm_inf);
  EXPECT_LE(A.gershgorin_lower(), 1e-12 * r.norm_inf);
  EXPECT_GE(A.spectral_norm_bound(), r.norm_inf / 2.0);
}

INSTANTIATE_TEST_SUITE_P(Random, MarkovProperty, ::testing::Range(1, 25));

TEST(Assemble, QuadraticFormMatchesDense) {
  const auto p = power_1d(0.5, {0.3});
  const auto m = build_mesh(1, p.domain(), 100);
  const auto A = assemble(p, m, 1e-3);
  const auto phi = random_vector(A.size(), 3);
  const Eigen::Map<const Eigen::VectorXd> v(phi.data(), static_cast<Eigen::Index>(phi.size()));
  const double dense_value = v.dot(dense(A) * v);
  EXPECT_NEAR(A.quadratic_form(phi), dense_value, 1e-10 * std::abs(dense_value));
}

TEST(Assemble, FormIsMonotoneInViscosity) {
  const auto p = power_1d(0.75, {0.0, 1.3});
  const auto m = build_mesh(1, p.domain(), 128);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto phi = random_vector(m.size(), seed);
    double prev = -1.0;
    for (double eps : {0.0, 1e-6, 1e-3, 1e-1}) {
      const double q = assemble(p, m, eps).quadratic_form(phi);
      EXPECT_GE(q, prev);
      prev = q;
    }
  }
}

TEST(Assemble, ExactCutSplitsTheOperator) {
  // 127 cells on [-8, 8] put a face midpoint within rounding of the zero; the
  // midpoint sample there is below 1e-20.
  const auto p = power_1d(0.75, {0.0}, -8.0, 8.0);
  const auto m = build_mesh(1, p.domain(), 127);
  const auto A = assemble(p, m, 0.0);
  const auto g = A.conductances(0);
  EXPECT_LT(g[63], 1e-18);
  EXPECT_GT(g[62], 1e-2);
  EXPECT_EQ(A.entry(63, 64), -g[63]);
}

TEST(Assemble, EdgeHarmonicOnDivergentEdgeIsZero) {
  const auto p = power_1d(0.75, {0.05});
  const auto m = build_mesh(1, p.domain(), 80);
  const auto A = assemble(p, m, 0.0, {FaceSampling::EdgeHarmonic});
  const auto g = A.conductances(0);
  const std::size_t face = 40;  // [0, 0.1] contains the zero
  EXPECT_EQ(g[face], 0.0);
  EXPECT_GT(g[face - 1], 0.0);
  EXPECT_GT(g[face + 1], 0.0);
  // With c == 1 the harmonic edge conductance is the midpoint one.
  const auto lap = assemble(laplacian_1d(), m, 0.0, {FaceSampling::EdgeHarmonic});
  EXPECT_NEAR(lap.conductances(0)[7], 1.0 / (m.spacing() * m.spacing()), 1e-9);
}

TEST(Assemble, CutConductanceConvergesToInverseIntegral) {
  const auto p = power_1d(0.25, {0.0});
  const auto m = build_mesh(1, p.domain(), std::size_t{1} << 15);  // h = 2^-12
  const Interval cut{0.5, 1.5};
  const double g = cut_conductance(p, m, cut, 0.0);
  const double integral =
      quadrature::integrate([&](double x) { return 1.0 / p.scalar({x, 0.0}); }, cut.lo, cut.hi).value;
  EXPECT_NEAR(g * integral, 1.0, 0.02);
  // c == 1: series conductance of a unit length is one.
  EXPECT_NEAR(cut_conductance(laplacian_1d(), m, {-0.5, 0.5}, 0.0), 1.0, 1e-3);
}

TEST(Assemble, CutConductanceVanishesAcrossAnExactZero) {
  const auto p = power_1d(0.75, {0.0}, -8.0, 8.0);
  const auto m = build_mesh(1, p.domain(), 127);
  EXPECT_LT(cut_conductance(p, m, {-0.5, 0.5}, 0.0), 1e-18);
  EXPECT_GT(cut_conductance(p, m, {-0.5, 0.5}, 1e-3), 0.0);
}

TEST(Perturbations, SabotageCopies) {
  const auto p = laplacian_1d();
  const auto m = build_mesh(1, p.domain(), 32);
  const auto A = assemble(p, m, 0.0);
  const auto B = A.with_diagonal_perturbation(5, 1e-3);
  EXPECT_GT(markov_check(B).max_row_sum, 0.9e-3);
  const auto C = A.with_face_conductance(0, 10, -2.0);
  EXPECT_GE(markov_check(C).max_positive_offdiag, 2.0);
  EXPECT_EQ(markov_check(A).max_row_sum, 0.0);
}

TEST(Kernels, StencilMatchesCsrAndDense) {
  for (bool two_d : {false, true}) {
    const auto p = two_d ? radial_2d(0.75) : power_1d(0.5, {0.2});
    const auto m = build_mesh(two_d ? 2 : 1, p.domain(), two_d ? 24 : 300);
    const auto A = assemble(p, m, 0.0);
    const auto x = random_vector(A.size(), 9);
    std::vector<double> ys(A.size()), yp(A.size()), yc(A.size());
    kernels::apply(A, x, ys, kernels::Exec::Serial);
    kernels::apply(A, x, yp, kernels::Exec::Parallel);
    kernels::apply_csr(A.csr(), x, yc);
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd yd = dense(A) * v;
    const double scale = A.spectral_norm_bound();
    EXPECT_EQ(max_abs_diff(ys, yp), 0.0);
    EXPECT_LT(max_abs_diff(ys, yc), 1e-12 * scale);
    EXPECT_LT(max_abs_diff(ys, std::vector<double>(yd.data(), yd.data() + yd.size())), 1e-12 * scale);
  }
}

TEST(Kernels, ReductionsAreThreadIndependent) {
  const auto x = random_vector(100003, 4);
  const auto y = random_vector(100003, 5);
  EXPECT_EQ(kernels::dot(x, y, kernels::Exec::Serial), kernels::dot(x, y, kernels::Exec::Parallel));
  EXPECT_EQ(kernels::norm2(x, kernels::Exec::Serial), kernels::norm2(x, kernels::Exec::Parallel));
  double ref = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ref += x[i] * y[i];
  EXPECT_NEAR(kernels::dot(x, y), ref, 1e-10);
  EXPECT_NEAR(kernels::norm1(std::vector<double>{1.0, -2.0, 3.0}), 6.0, 0.0);
  EXPECT_EQ(kernels::norm_inf(std::vector<double>{1.0, -7.0, 3.0}), 7.0);
}

TEST(SegmentIntegral, DivergesAcrossNonIntegrableZero) {
  const auto p = power_1d(0.75, {0.0});
  const auto r = segment_integral(p, {-0.5, 0.0}, {0.5, 0.0}, 0.0, 1.0);
  EXPECT_EQ(r.tail, quadrature::Tail::Divergent);
  const auto s = segment_integral(p, {-0.5, 0.0}, {0.5, 0.0}, 0.0, 0.5);
  EXPECT_EQ(s.tail, quadrature::Tail::Convergent);
}
