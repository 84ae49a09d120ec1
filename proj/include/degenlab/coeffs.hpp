#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "degenlab/quadrature.hpp"

namespace degenlab {

/// A point in R^1 or R^2; the second coordinate is ignored in 1D.
using Point = std::array<double, 2>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

/// Symmetric d x d coefficient matrix, d in {1, 2}. In 1D only `xx` is used.
struct CoefficientMatrix {
  int dimension = 1;
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double smallest_eigenvalue() const;
  double largest_eigenvalue() const;
  double spectral_norm() const;
  bool is_scalar() const { return dimension == 1 || (xy == 0.0 && xx == yy); }
};

namespace family {

/// c = (rho^2 / (1 + rho^2))^delta with rho the distance to the nearest center.
struct PowerDegenerate {
  double delta = 0.0;
  std::vector<Point> centers;
};

/// rho = | |x| - radius |.
struct RadialShell {
  double delta = 0.0;
  double radius = 1.0;
};

/// rho(y, z) = |z - Phi(y)| with Phi sampled on a uniform grid and linearly interpolated.
struct SurfaceDegenerate {
  double delta = 0.0;
  Interval support;               ///< y-range of the samples
  std::vector<double> phi;        ///< Phi at support.lo + k * support.width() / (size-1)

  double operator()(double y) const;
};

struct StronglyElliptic {
  CoefficientMatrix matrix;
};

/// Grid of symmetric PSD matrices with bilinear interpolation. Entries are
/// stored row-major over grid points (x fastest), upper-triangular components.
struct Sampled {
  std::array<std::size_t, 2> points{2, 1};
  std::vector<CoefficientMatrix> entries;
  std::string source;  ///< CSV path it was loaded from, empty when built in memory
};

}  // namespace family

using Family = std::variant<family::PowerDegenerate, family::RadialShell,
                            family::SurfaceDegenerate, family::StronglyElliptic, family::Sampled>;

struct ProfileMetadata {
  std::optional<double> predicted_gamma;
  std::vector<Point> predicted_cuts;
  std::optional<double> mu;  ///< subellipticity constants, informational only
  std::optional<double> nu;
};

/// Immutable coefficient field C(x) on a box, optionally shifted by epsilon * I.
class CoefficientProfile {
 public:
  /// Validates the family (delta range, PSD samples) and caches ||C||.
  CoefficientProfile(int dimension, Family family, std::array<Interval, 2> domain,
                     ProfileMetadata metadata = {});

  int dimension() const { return dimension_; }
  const Family& family() const { return family_; }
  const std::array<Interval, 2>& domain() const { return domain_; }
  const ProfileMetadata& metadata() const { return metadata_; }
  double epsilon() const { return epsilon_; }

  /// True when C(x) = c(x) I everywhere.
  bool is_scalar() const;

  /// Family tag as used in the JSON schema ("power", "radial", ...).
  std::string kind() const;

  /// Throws DomainError when x is outside the box.
  CoefficientMatrix eval(const Point& x) const;

  /// c(x) + epsilon for scalar profiles; UnsupportedError otherwise.
  double scalar(const Point& x) const;

  /// Scalar coefficient without the domain check; used in hot assembly loops
  /// where the caller guarantees x is in the box.
  double scalar_unchecked(const Point& x) const;

  double smallest_eigenvalue(const Point& x) const { return eval(x).smallest_eigenvalue(); }

  /// Essential bound: max spectral norm over a sample lattice, epsilon included.
  double norm() const { return norm_; }

  /// New profile evaluating to eval(x) + epsilon I; epsilons accumulate.
  CoefficientProfile viscosity_shift(double epsilon) const;

  /// Known degeneracy locations along the first axis for 1D families
  /// (PowerDegenerate centers); empty when not known analytically.
  std::vector<double> known_zeros_1d() const;

 private:
  double base_scalar(const Point& x) const;
  CoefficientMatrix base_matrix(const Point& x) const;
  void check_domain(const Point& x) const;

  int dimension_;
  Family family_;
  std::array<Interval, 2> domain_;
  ProfileMetadata metadata_;
  double epsilon_ = 0.0;
  double norm_ = 0.0;
};

/// (rho^2 / (1 + rho^2))^delta, the bounded power-degenerate profile.
double power_profile(double rho, double delta);

// ---------------------------------------------------------------------------
// Classification

enum class Verdict { StronglyElliptic, ClosableDegenerate, Separating, Inconclusive };

std::string to_string(Verdict v);

struct IntegrabilityEntry {
  double zero = 0.0;
  double side = 1.0;  ///< +1 integrates to the right of the zero, -1 to the left
  quadrature::Tail inverse = quadrature::Tail::Ambiguous;       ///< mu^-1
  quadrature::Tail inverse_sqrt = quadrature::Tail::Ambiguous;  ///< mu^-1/2
  double inverse_value = 0.0;
  double inverse_sqrt_value = 0.0;
  double exponent = 0.0;  ///< estimated beta in mu ~ |z - z0|^beta
};

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> cut_points;
  double mu_lower = 0.0;
  std::vector<IntegrabilityEntry> integrability_table;
};

struct QuadratureConfig {
  std::size_t scan_points = 10000;
  double merge_fraction = 1e-3;
  double zero_threshold = 1e-8;
  double strong_ellipticity_threshold = 1e-8;
  double alpha = 0.5;  ///< length of the one-sided integration window from a zero
  quadrature::SingularConfig singular{};
};

/// Locates isolated zeros of f on [a, b]: scan for local minima then golden-section
/// refinement; zeros closer than merge_fraction * (b - a) merge.
std::vector<double> find_zeros(const std::function<double(double)>& f, Interval range,
                               const QuadratureConfig& cfg);

namespace detail {
/// Zero locations with the extrapolated floor value of f at each.
std::vector<std::pair<double, double>> locate_minima(const std::function<double(double)>& f,
                                                     Interval range, const QuadratureConfig& cfg);
}  // namespace detail

Classification classify(const CoefficientProfile& profile, const QuadratureConfig& cfg = {});

}  // namespace degenlab
