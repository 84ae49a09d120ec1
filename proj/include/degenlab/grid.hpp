#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "degenlab/coeffs.hpp"

namespace degenlab {

enum class Boundary { Reflecting };

/// Uniform point grid on a box: x_i = a + i h, i = 0..n per axis.
struct Mesh {
  int dimension = 1;
  std::array<Interval, 2> box{};
  std::size_t n = 0;
  std::array<double, 2> h{0.0, 0.0};
  Boundary boundary = Boundary::Reflecting;

  std::size_t points_per_axis() const { return n + 1; }
  std::size_t size() const { return dimension == 1 ? n + 1 : (n + 1) * (n + 1); }
  double spacing(int axis = 0) const { return h[axis]; }
  double cell_volume() const { return dimension == 1 ? h[0] : h[0] * h[1]; }

  std::size_t index(std::size_t i, std::size_t j = 0) const { return j * (n + 1) + i; }
  std::array<std::size_t, 2> coords(std::size_t idx) const { return {idx % (n + 1), idx / (n + 1)}; }
  Point point(std::size_t idx) const;
  /// Grid point closest to p (clamped into the box).
  std::size_t nearest(const Point& p) const;
  /// Number of faces normal to `axis`.
  std::size_t face_count(int axis) const;
  /// Endpoints (node indices) of a face.
  std::array<std::size_t, 2> face_nodes(int axis, std::size_t face) const;
  Point face_midpoint(int axis, std::size_t face) const;
};

inline constexpr std::size_t kDefaultPointCap = std::size_t{1} << 22;

/// Throws ArgumentError for n < 8 or an empty box, ResourceError above the point cap.
Mesh build_mesh(int dimension, std::array<Interval, 2> box, std::size_t n,
                std::size_t cap = kDefaultPointCap);

/// Compressed sparse rows of a square matrix.
struct Csr {
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<double> val;
};

/// Symmetric discrete generator stored by face conductances: every face with
/// conductance g between nodes i and j contributes g to A_ii and A_jj and -g to
/// A_ij and A_ji. An optional diagonal shift exists only for sabotage controls.
class DiscreteOperator {
 public:
  DiscreteOperator(Mesh mesh, double epsilon, std::array<std::vector<double>, 2> conductances,
                   std::vector<double> diagonal_shift = {});

  const Mesh& mesh() const { return mesh_; }
  std::size_t size() const { return mesh_.size(); }
  double epsilon() const { return epsilon_; }

  std::span<const double> conductances(int axis) const { return conductances_[axis]; }
  std::span<const double> diagonal_shift() const { return diagonal_shift_; }
  bool has_diagonal_shift() const { return !diagonal_shift_.empty(); }

  /// Gershgorin interval [lower, upper] containing the spectrum.
  double spectral_norm_bound() const { return gershgorin_upper_; }
  double gershgorin_lower() const { return gershgorin_lower_; }

  const Csr& csr() const { return csr_; }
  double entry(std::size_t i, std::size_t j) const;

  /// Diagonal entries of A.
  std::vector<double> diagonal() const;

  /// Off-diagonal band of a 1D operator (A_{i,i+1}); ArgumentError in 2D.
  std::vector<double> off_diagonal_1d() const;

  /// phi^T A phi evaluated face by face (no cancellation between rows).
  double quadratic_form(std::span<const double> phi) const;

  /// Copies with a perturbed entry, used by sabotage controls.
  DiscreteOperator with_diagonal_perturbation(std::size_t index, double value) const;
  DiscreteOperator with_face_conductance(int axis, std::size_t face, double g) const;

  /// Writes `row,col,value` triples.
  void export_csv(const std::filesystem::path& path) const;

 private:
  void build();

  Mesh mesh_;
  double epsilon_;
  std::array<std::vector<double>, 2> conductances_;
  std::vector<double> diagonal_shift_;
  Csr csr_;
  double gershgorin_upper_ = 0.0;
  double gershgorin_lower_ = 0.0;
};

enum class FaceSampling {
  Midpoint,      ///< g = (c(face midpoint) + eps) / h^2
  EdgeHarmonic,  ///< g = 1 / (h * integral over the edge of (c + eps)^-1); zero when divergent
};

struct AssemblyOptions {
  FaceSampling sampling = FaceSampling::Midpoint;
};

/// Finite-volume assembly of the viscosity operator H_eps for a scalar profile.
DiscreteOperator assemble(const CoefficientProfile& profile, const Mesh& mesh, double epsilon,
                          const AssemblyOptions& options = {});

/// Series (harmonic) conductance (sum over faces with midpoint in `cut` of h / (c + eps))^-1
/// on a 1D mesh. Zero when any face in the cut has zero conductance.
double cut_conductance(const CoefficientProfile& profile, const Mesh& mesh, Interval cut,
                       double epsilon);

struct MarkovReport {
  double max_row_sum = 0.0;            ///< max_i |sum_j A_ij|
  double max_positive_offdiag = 0.0;   ///< max(0, max_{i != j} A_ij)
  double min_rayleigh = 0.0;           ///< min over random phi of phi^T A phi / |phi|^2
  double max_asymmetry = 0.0;          ///< max |A_ij - A_ji|
  double norm_inf = 0.0;               ///< max_i sum_j |A_ij|
};

/// Invariant diagnostics computed from the assembled entries; never throws.
MarkovReport markov_check(const DiscreteOperator& op, std::uint64_t seed = 7,
                          int rayleigh_samples = 32);

/// Line integral of (c + eps)^-power along the segment p -> q with singular
/// handling at interior zeros of c. Returns +inf when it diverges.
quadrature::SingularResult segment_integral(const CoefficientProfile& profile, const Point& p,
                                            const Point& q, double epsilon, double power);

}  // namespace degenlab
