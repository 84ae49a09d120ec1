#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "degenlab/coeffs.hpp"
#include "degenlab/grid.hpp"

namespace degenlab {

enum class DistanceMethod { Quadrature1D, GraphGeodesic };

enum class EdgeWeighting {
  Midpoint,  ///< |p - q| (c(mid) + eps)^-1/2, the metric seen by the assembled operator
  Refined,   ///< midpoint rule, switching to a singular-aware edge integral near degeneracies
};

struct DistanceOptions {
  EdgeWeighting weighting = EdgeWeighting::Refined;
  double edge_floor = 0.3;  ///< refine edges whose midpoint integrand exceeds 1 / edge_floor
};

/// d_C(origin; .) on mesh points; +inf marks unreachable points.
struct DistanceField {
  Mesh mesh;
  Point origin{};
  std::size_t origin_index = 0;
  std::vector<double> values;
  double epsilon = 0.0;
  DistanceMethod method = DistanceMethod::GraphGeodesic;

  void export_csv(const std::filesystem::path& path) const;
};

/// Integral of (c + eps)^-1/2 between x and y, graded toward every zero of c in
/// between. Returns +inf on divergence; InconclusiveError when the tail test is ambiguous.
double distance_1d(const CoefficientProfile& profile, double x, double y, double epsilon);

/// Dijkstra on the 2-neighbour (1D) or 8-neighbour (2D) grid graph.
DistanceField distance_field(const CoefficientProfile& profile, const Mesh& mesh,
                             const Point& origin, double epsilon,
                             const DistanceOptions& options = {});

/// Exact 1D field from distance_1d at every mesh point.
DistanceField distance_field_1d_exact(const CoefficientProfile& profile, const Mesh& mesh,
                                      const Point& origin, double epsilon);

/// Sum of cell volumes over points with d <= r (r = 0 gives the origin cell),
/// optionally restricted to mask[i] != 0.
double ball_volume(const DistanceField& field, double r, std::span<const unsigned char> mask = {});

void export_ball_volumes_csv(const std::filesystem::path& path, const DistanceField& field,
                             std::span<const double> radii);

struct HolderFit {
  double gamma_hat = 0.0;
  double a_hat = 0.0;
  double residual = 0.0;  ///< max |log d - fit|
  std::size_t samples = 0;
};

/// Least squares of log d against log r. Needs >= 12 samples with positive finite values.
HolderFit holder_fit(std::span<const double> r, std::span<const double> d);

/// Samples d_C(origin; origin + side * y) at `samples` log-spaced y in `range`.
HolderFit holder_fit(const CoefficientProfile& profile, double origin, Interval range,
                     std::size_t samples = 16, double epsilon = 0.0, double side = 1.0);

/// Uses the field values at mesh points whose Euclidean offset from the origin lies in `range`.
HolderFit holder_fit(const DistanceField& field, Interval range);

}  // namespace degenlab
