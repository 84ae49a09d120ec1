#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "degenlab/coeffs.hpp"
#include "degenlab/evolve.hpp"
#include "degenlab/grid.hpp"
#include "degenlab/metric.hpp"
#include "json.hpp"

namespace degenlab {

enum class Status { Holds, Violated, Fitted, Inconclusive };

std::string to_string(Status s);

/// Numeric or text cell of a CSV table.
using Cell = std::variant<double, std::string>;

std::string format_cell(const Cell& c);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write_csv(const std::filesystem::path& path) const;
};

struct CheckRecord {
  std::string name;
  std::string anchor;  ///< statement under test
  Status status = Status::Inconclusive;
  double value = 0.0;  ///< margin, defect or fitted value
  double stderr_value = 0.0;
  std::string label;   ///< verdict or short tag; never contains numbers
  nlohmann::json witness = nlohmann::json::object();
  double runtime_seconds = 0.0;
  std::vector<std::string> tables;
};

struct CheckResult {
  CheckRecord record;
  std::vector<Table> tables;
};

struct DiagnosticsReport {
  std::string scenario;
  std::vector<std::pair<std::string, Cell>> environment;
  std::vector<CheckRecord> records;
  std::vector<Table> tables;

  void add(CheckResult result);
  bool any_violated() const;
  nlohmann::json to_json() const;
  /// Every number shown comes from checks.csv or environment.csv.
  std::string to_markdown() const;
  /// report.json, report.md, checks.csv, environment.csv and one CSV per table.
  void write(const std::filesystem::path& dir) const;
};

/// e^{-tA} applied through one eigendecomposition (small 1D operators, when requested)
/// or a Chebyshev expansion per call.
class Semigroup {
 public:
  /// Keeps a reference to A, which must outlive the semigroup.
  explicit Semigroup(const DiscreteOperator& A, bool prefer_spectral = true,
                     HeatOptions options = {});
  Semigroup(DiscreteOperator&&, bool = true, HeatOptions = {}) = delete;
  std::vector<double> apply(std::span<const double> phi, double t) const;
  const DiscreteOperator& op() const { return *A_; }
  bool spectral() const { return static_cast<bool>(spectrum_); }

 private:
  const DiscreteOperator* A_;
  HeatOptions options_;
  std::shared_ptr<const Spectrum> spectrum_;
};

/// Mass-weighted inner product cv * sum a_i b_i.
double mass_inner(const Mesh& mesh, std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Structural checks

CheckResult markov_record(const DiscreteOperator& A, std::uint64_t seed = 7);

/// max_t |e^{-tA} 1_Omega - 1_Omega|_inf with Omega the whole mesh when `omega` is empty.
CheckResult conservation_defect(const DiscreteOperator& A, std::span<const double> times,
                                std::span<const unsigned char> omega = {},
                                const HeatOptions& options = {}, double tolerance = 1e-9);

/// Semigroup law, self-adjointness, l1/l2/linf contraction and positivity on random data.
CheckResult semigroup_invariants(const DiscreteOperator& A, std::uint64_t seed = 11,
                                 int samples = 4, const HeatOptions& options = {});

/// max over random phi of |1_{Omega^c} e^{-tA} (phi 1_Omega)|_2.
CheckResult invariance_defect(const DiscreteOperator& A, std::span<const unsigned char> omega,
                              double t, std::uint64_t seed = 13, double tolerance = 1e-8,
                              const HeatOptions& options = {});

/// max over random phi of the cross energy relative to 1 + phi^T A phi.
CheckResult form_additivity_defect(const DiscreteOperator& A, std::span<const unsigned char> omega,
                                   std::uint64_t seed = 17, double tolerance = 1e-12);

/// The exact cross term 2 sum_{faces crossing Omega} g phi_i phi_j is what the defect measures.
double form_cross_energy(const DiscreteOperator& A, std::span<const double> phi,
                         std::span<const unsigned char> omega);

// ---------------------------------------------------------------------------
// Off-diagonal bounds

struct Ball {
  std::size_t center = 0;
  double radius = 0.0;
  std::vector<unsigned char> members;
  std::size_t cells = 0;
};

Ball make_ball(const DistanceField& field, double radius);

struct BallPair {
  Ball first;
  Ball second;
  double center_distance = 0.0;  ///< d_C between the centers
};

/// All pairs of distinct centers and every radius, distances from midpoint-weighted fields
/// (the metric the assembled operator sees). Balls with fewer than `min_cells` cells are dropped.
std::vector<BallPair> make_ball_pairs(const CoefficientProfile& profile, const Mesh& mesh,
                                      std::span<const Point> centers, std::span<const double> radii,
                                      double epsilon, std::size_t min_cells = 8);

CheckResult offdiagonal_gaussian_check(const Semigroup& S, std::span<const BallPair> pairs,
                                       std::span<const double> times);

struct SetPair {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

/// Interval/disc index sets of the given half-width around each center, all distinct pairs.
std::vector<SetPair> make_set_pairs(const Mesh& mesh, std::span<const Point> centers,
                                    double half_width);

CheckResult euclidean_offdiagonal_check(const Semigroup& S, std::span<const SetPair> sets,
                                        std::span<const double> times, double coefficient_norm);

// ---------------------------------------------------------------------------
// Propagation

struct WaveCheckOptions {
  double source_radius = 0.5;  ///< d_C radius of the initial support
  int bump_power = 4;
  double threshold = 1e-8;     ///< support threshold relative to |phi0|_inf
  double speed_limit = 1.05;
  WaveOptions wave{};
};

/// `dist` is the d_C field from the source center; `forbidden` marks points that
/// must never be excited (the far side of an exact cut). Holds when
/// (extent - margin) / t <= speed_limit at every t > 0, margin = 4 h_C (1 + 0.01 t / h_C)
/// with h_C the largest d_C edge width in the excited region.
CheckResult wave_speed_check(const DiscreteOperator& A, const DistanceField& dist,
                             std::span<const double> times, const WaveCheckOptions& options = {},
                             std::span<const unsigned char> forbidden = {});

// ---------------------------------------------------------------------------
// Separation

enum class SeparationVerdict { Separating, NonSeparating, Inconclusive };

std::string to_string(SeparationVerdict v);

struct SeparationConfig {
  Interval box{-4.0, 4.0};
  double cut = 0.0;
  double time = 1.0;
  std::vector<int> levels{6, 7, 8, 9, 10, 11, 12};  ///< h = 2^-k
  std::vector<double> epsilons{0.0};
  std::size_t steps = 200;
  double stabilization = 0.05;
};

struct SeparationProbe {
  SeparationVerdict verdict = SeparationVerdict::Inconclusive;
  std::vector<double> h;
  std::vector<std::vector<double>> leakage;      ///< [epsilon][level]
  std::vector<std::vector<double>> conductance;  ///< [epsilon][level]
};

SeparationProbe separation_probe(const CoefficientProfile& profile, const SeparationConfig& cfg);

/// Record form; when `expected` is given the status reports agreement with it.
CheckResult separation_record(const CoefficientProfile& profile, const SeparationConfig& cfg,
                              std::optional<SeparationVerdict> expected = std::nullopt);

CheckResult classification_record(const CoefficientProfile& profile);

// ---------------------------------------------------------------------------
// Kernel decay and floors

struct DecayFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double predicted_slope = 0.0;
  double a_fit = 0.0;
  double worst_excess = 0.0;  ///< max sup / (a_fit t^predicted) - 1
};

/// Keeps 10 h^2 |C| <= t <= 0.1; Inconclusive if nothing remains.
CheckResult smalltime_decay_fit(const DiscreteOperator& A, std::span<const double> times,
                                double gamma, double coefficient_norm,
                                const SampleStrategy& strategy, const HeatOptions& options = {});

/// Separated: sup_t >= floor (1 - 1e-6) for every t. Also emits the growth record for
/// sup * t^{d/2} between the first and last time.
std::vector<CheckResult> largetime_floor_check(const DiscreteOperator& A,
                                               std::span<const double> times, double floor,
                                               const SampleStrategy& strategy,
                                               double growth_factor = 3.0,
                                               const HeatOptions& options = {});

/// Strongly elliptic control: sup * t^{d/2} within [0.8, 1.2] (4 pi)^{-d/2}.
CheckResult largetime_gaussian_check(const DiscreteOperator& A, std::span<const double> times,
                                     const SampleStrategy& strategy, const HeatOptions& options = {});

struct ResolventScalingOptions {
  int m = 1;
  std::size_t radii = 14;
  std::size_t min_cells = 16;
  double max_fraction = 0.2;  ///< largest radius as a fraction of the box width
  double slope_tolerance = 0.15;
  double ratio_limit = 3.0;
};

/// Fits log K_{(I + r^2 A)^{-2m}}(x; x) against log |B_C(x; r)| over log-spaced radii.
CheckResult resolvent_volume_scaling(const DiscreteOperator& A, const DistanceField& dist,
                                     const ResolventScalingOptions& options = {});

/// (phi, e^{-tA} phi) / |phi|_1^2 over cos^2 bumps of the given diameter.
CheckResult ondiagonal_lower_check(const Semigroup& S, double t, double diameter,
                                   std::span<const Point> centers, bool separated);

}  // namespace degenlab
