#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "degenlab/error.hpp"
#include "degenlab/grid.hpp"

namespace degenlab {

DiscreteOperator::DiscreteOperator(Mesh mesh, double epsilon,
                                   std::array<std::vector<double>, 2> conductances,
                                   std::vector<double> diagonal_shift)
    : mesh_(std::move(mesh)),
      epsilon_(epsilon),
      conductances_(std::move(conductances)),
      diagonal_shift_(std::move(diagonal_shift)) {
  for (int a = 0; a < 2; ++a) {
    if (conductances_[a].size() != mesh_.face_count(a)) {
      throw ArgumentError("conductance array does not match the mesh face count");
    }
  }
  if (!diagonal_shift_.empty() && diagonal_shift_.size() != mesh_.size()) {
    throw ArgumentError("diagonal shift does not match the mesh size");
  }
  build();
}

void DiscreteOperator::build() {
  const std::size_t N = mesh_.size();
  std::vector<double> diag(N, 0.0), off(N, 0.0);
  for (int a = 0; a < mesh_.dimension; ++a) {
    const auto& g = conductances_[a];
    for (std::size_t f = 0; f < g.size(); ++f) {
      const auto [p, q] = mesh_.face_nodes(a, f);
      diag[p] += g[f];
      diag[q] += g[f];
      off[p] += std::abs(g[f]);
      off[q] += std::abs(g[f]);
    }
  }
  if (!diagonal_shift_.empty()) {
    for (std::size_t i = 0; i < N; ++i) diag[i] += diagonal_shift_[i];
  }
  gershgorin_upper_ = 0.0;
  gershgorin_lower_ = N ? diag[0] - off[0] : 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    gershgorin_upper_ = std::max(gershgorin_upper_, diag[i] + off[i]);
    gershgorin_lower_ = std::min(gershgorin_lower_, diag[i] - off[i]);
  }

  // Row stencil in increasing column order: (j-1), (i-1), i, (i+1), (j+1).
  csr_.row_ptr.assign(N + 1, 0);
  csr_.col.clear();
  csr_.val.clear();
  const std::size_t n = mesh_.n;
  const std::size_t stride = n + 1;
  csr_.col.reserve(N * (mesh_.dimension == 1 ? 3 : 5));
  csr_.val.reserve(csr_.col.capacity());
  for (std::size_t idx = 0; idx < N; ++idx) {
    const auto [i, j] = mesh_.coords(idx);
    auto push = [&](std::size_t c, double v) {
      csr_.col.push_back(c);
      csr_.val.push_back(v);
    };
    if (mesh_.dimension == 1) {
      if (i > 0) push(idx - 1, -conductances_[0][i - 1]);
      push(idx, diag[idx]);
      if (i < n) push(idx + 1, -conductances_[0][i]);
    } else {
      if (j > 0) push(idx - stride, -conductances_[1][(j - 1) * stride + i]);
      if (i > 0) push(idx - 1, -conductances_[0][j * n + i - 1]);
      push(idx, diag[idx]);
      if (i < n) push(idx + 1, -conductances_[0][j * n + i]);
      if (j < n) push(idx + stride, -conductances_[1][j * stride + i]);
    }
    csr_.row_ptr[idx + 1] = csr_.col.size();
  }
}

double DiscreteOperator::entry(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw ArgumentError("operator index out of range");
  const auto b = csr_.col.begin() + static_cast<std::ptrdiff_t>(csr_.row_ptr[i]);
  const auto e = csr_.col.begin() + static_cast<std::ptrdiff_t>(csr_.row_ptr[i + 1]);
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return csr_.val[static_cast<std::size_t>(it - csr_.col.begin())];
}

std::vector<double> DiscreteOperator::diagonal() const {
  std::vector<double> d(size());
  for (std::size_t i = 0; i < size(); ++i) d[i] = entry(i, i);
  return d;
}

std::vector<double> DiscreteOperator::off_diagonal_1d() const {
  if (mesh_.dimension != 1) throw ArgumentError("off-diagonal band is defined for 1D operators");
  std::vector<double> e(conductances_[0].size());
  for (std::size_t f = 0; f < e.size(); ++f) e[f] = -conductances_[0][f];
  return e;
}

double DiscreteOperator::quadratic_form(std::span<const double> phi) const {
  if (phi.size() != size()) throw ArgumentError("vector size does not match the operator");
  double s = 0.0;
  for (int a = 0; a < mesh_.dimension; ++a) {
    const auto& g = conductances_[a];
    for (std::size_t f = 0; f < g.size(); ++f) {
      const auto [p, q] = mesh_.face_nodes(a, f);
      const double d = phi[p] - phi[q];
      s += g[f] * d * d;
    }
  }
  for (std::size_t i = 0; i < diagonal_shift_.size(); ++i) s += diagonal_shift_[i] * phi[i] * phi[i];
  return s;
}

DiscreteOperator DiscreteOperator::with_diagonal_perturbation(std::size_t index,
                                                              double value) const {
  if (index >= size()) throw ArgumentError("perturbation index out of range");
  std::vector<double> shift = diagonal_shift_;
  if (shift.empty()) shift.assign(size(), 0.0);
  shift[index] += value;
  return DiscreteOperator(mesh_, epsilon_, conductances_, std::move(shift));
}

DiscreteOperator DiscreteOperator::with_face_conductance(int axis, std::size_t face,
                                                         double g) const {
  if (axis < 0 || axis >= mesh_.dimension || face >= conductances_[axis].size()) {
    throw ArgumentError("face index out of range");
  }
  auto cond = conductances_;
  cond[axis][face] = g;
  return DiscreteOperator(mesh_, epsilon_, std::move(cond), diagonal_shift_);
}

void DiscreteOperator::export_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "row,col,value\n";
  char buf[96];
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = csr_.row_ptr[i]; k < csr_.row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", i, csr_.col[k], csr_.val[k]);
      out << buf;
    }
  }
}

MarkovReport markov_check(const DiscreteOperator& op, std::uint64_t seed, int rayleigh_samples) {
  MarkovReport r;
  const Csr& A = op.csr();
  const std::size_t N = op.size();
  for (std::size_t i = 0; i < N; ++i) {
    double row = 0.0, abs_row = 0.0;
    for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      const std::size_t j = A.col[k];
      const double v = A.val[k];
      row += v;
      abs_row += std::abs(v);
      if (j != i) {
        r.max_positive_offdiag = std::max(r.max_positive_offdiag, v);
        r.max_asymmetry = std::max(r.max_asymmetry, std::abs(v - op.entry(j, i)));
      }
    }
    r.max_row_sum = std::max(r.max_row_sum, std::abs(row));
    r.norm_inf = std::max(r.norm_inf, abs_row);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> phi(N), Aphi(N);
  r.min_rayleigh = std::numeric_limits<double>::infinity();
  for (int s = 0; s < rayleigh_samples; ++s) {
    for (auto& v : phi) v = normal(rng);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (std::size_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) acc += A.val[k] * phi[A.col[k]];
      num += phi[i] * acc;
      den += phi[i] * phi[i];
    }
    r.min_rayleigh = std::min(r.min_rayleigh, den > 0.0 ? num / den : 0.0);
  }
  if (rayleigh_samples <= 0) r.min_rayleigh = 0.0;
  return r;
}

}  // namespace degenlab
