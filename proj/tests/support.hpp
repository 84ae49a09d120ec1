#pragma once

#include <Eigen/Dense>

#include <random>
#include <span>
#include <string>
#include <vector>

#include "degenlab/coeffs.hpp"
#include "degenlab/grid.hpp"
#include "degenlab/profile_io.hpp"

namespace testing_support {

using degenlab::CoefficientProfile;
using degenlab::DiscreteOperator;

inline CoefficientProfile power_1d(double delta, std::vector<double> centers = {0.0},
                                   double lo = -4.0, double hi = 4.0) {
  nlohmann::json c = nlohmann::json::array();
  for (double x : centers) c.push_back(x);
  return degenlab::profile_from_json({{"dimension", 1},
                                      {"family", {{"kind", "power"}, {"delta", delta}, {"centers", c}}},
                                      {"domain", {lo, hi}}});
}

inline CoefficientProfile laplacian_1d(double lo = -4.0, double hi = 4.0) {
  return power_1d(0.0, {0.0}, lo, hi);
}

inline CoefficientProfile radial_2d(double delta, double radius = 1.0, double half = 2.0) {
  return degenlab::profile_from_json(
      {{"dimension", 2},
       {"family", {{"kind", "radial"}, {"delta", delta}, {"radius", radius}}},
       {"domain", {{-half, half}, {-half, half}}}});
}

/// Dense copy of the assembled matrix, read entry by entry.
inline Eigen::MatrixXd dense(const DiscreteOperator& A) {
  const auto N = static_cast<Eigen::Index>(A.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  const auto& csr = A.csr();
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(csr.col[k])) += csr.val[k];
    }
  }
  return M;
}

/// f(A) x through a dense symmetric eigendecomposition.
template <class F>
std::vector<double> dense_function(const Eigen::MatrixXd& M, std::span<const double> x, F&& f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd c = es.eigenvectors().transpose() * v;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= f(es.eigenvalues()(k));
  Eigen::VectorXd y = es.eigenvectors() * c;
  return {y.data(), y.data() + y.size()};
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_abs(std::span<const double> a) {
  double d = 0.0;
  for (double x : a) d = std::max(d, std::abs(x));
  return d;
}

}  // namespace testing_support
