#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "degenlab/diagnose.hpp"
#include "degenlab/error.hpp"
#include "support.hpp"

using namespace degenlab;
using namespace testing_support;

namespace {

Mesh three_point_mesh() {
  Mesh m;
  m.dimension = 1;
  m.box = {Interval{0.0, 2.0}, Interval{}};
  m.n = 2;
  m.h = {1.0, 0.0};
  return m;
}

CoefficientProfile elliptic_1d(double c, double lo = -8.0, double hi = 8.0) {
  return profile_from_json({{"dimension", 1},
                            {"family", {{"kind", "elliptic"}, {"matrix", c}}},
                            {"domain", {lo, hi}}});
}

std::vector<unsigned char> left_of(const Mesh& m, double cut) {
  std::vector<unsigned char> mask(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) mask[i] = m.point(i)[0] < cut;
  return mask;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(FormCrossEnergy, ExactIdentityOnThreePointMeshes) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double g01 = trial % 5 == 0 ? 0.0 : u(rng), g12 = u(rng);
    const DiscreteOperator A(three_point_mesh(), 0.0, {std::vector<double>{g01, g12}, {}});
    const std::vector<double> phi{u(rng) - 1.5, u(rng) - 1.5, u(rng) - 1.5};
    for (int bits = 0; bits < 8; ++bits) {
      const std::vector<unsigned char> omega{static_cast<unsigned char>(bits & 1),
                                             static_cast<unsigned char>((bits >> 1) & 1),
                                             static_cast<unsigned char>((bits >> 2) & 1)};
      std::vector<double> in(3), out(3);
      for (int i = 0; i < 3; ++i) {
        in[i] = omega[i] ? phi[i] : 0.0;
        out[i] = omega[i] ? 0.0 : phi[i];
      }
      // Hand expansion: every face crossing Omega contributes -2 g phi_i phi_j.
      double expect = 0.0;
      if (omega[0] != omega[1]) expect += 2.0 * g01 * phi[0] * phi[1];
      if (omega[1] != omega[2]) expect += 2.0 * g12 * phi[1] * phi[2];
      EXPECT_NEAR(form_cross_energy(A, phi, omega), expect, 1e-14);
      const double split = A.quadratic_form(phi) - A.quadratic_form(in) - A.quadratic_form(out);
      EXPECT_NEAR(split, -expect, 1e-13);
    }
  }
}

TEST(FormAdditivity, HoldsOnExactCutAndFailsOtherwise) {
  const auto p = power_1d(0.75, {0.0}, -8.0, 8.0);
  const auto exact = build_mesh(1, p.domain(), 127);
  const auto r = form_additivity_defect(assemble(p, exact, 0.0), left_of(exact, 0.0));
  EXPECT_EQ(r.record.status, Status::Holds);
  EXPECT_LT(r.record.value, 1e-12);

  const auto offset = build_mesh(1, p.domain(), 128);
  const auto s = form_additivity_defect(assemble(p, offset, 0.0), left_of(offset, 0.0));
  EXPECT_EQ(s.record.status, Status::Violated);
  const auto v = form_additivity_defect(assemble(p, exact, 1e-3), left_of(exact, 0.0));
  EXPECT_EQ(v.record.status, Status::Violated);
}

TEST(Invariance, ExactCutKeepsHalfLinesInvariant) {
  const auto p = power_1d(0.75, {0.0}, -8.0, 8.0);
  const auto m = build_mesh(1, p.domain(), 127);
  const auto mask = left_of(m, 0.0);
  const auto r = invariance_defect(assemble(p, m, 0.0), mask, 2.0);
  EXPECT_EQ(r.record.status, Status::Holds);
  const auto c = conservation_defect(assemble(p, m, 0.0), std::vector<double>{0.1, 1.0, 10.0}, mask);
  EXPECT_EQ(c.record.status, Status::Holds);
  const auto leak = invariance_defect(assemble(p, m, 1e-2), mask, 2.0);
  EXPECT_EQ(leak.record.status, Status::Violated);
}

TEST(Structural, ControlsHoldAndSabotageIsDetected) {
  const auto p = power_1d(0.5, {0.3});
  const auto m = build_mesh(1, p.domain(), 256);
  const auto A = assemble(p, m, 0.0);
  const std::vector<double> ts{0.01, 0.1, 1.0};
  EXPECT_EQ(markov_record(A).record.status, Status::Holds);
  EXPECT_EQ(conservation_defect(A, ts).record.status, Status::Holds);
  EXPECT_EQ(semigroup_invariants(A).record.status, Status::Holds);

  const auto rowsum = A.with_diagonal_perturbation(128, 1e-3);
  EXPECT_EQ(markov_record(rowsum).record.status, Status::Violated);
  EXPECT_EQ(conservation_defect(rowsum, ts).record.status, Status::Violated);

  const auto offdiag = A.with_face_conductance(0, 100, -50.0);
  EXPECT_EQ(markov_record(offdiag).record.status, Status::Violated);
  EXPECT_EQ(semigroup_invariants(offdiag).record.status, Status::Violated);

  const auto asym = A.with_face_conductance(0, 17, -1e-9);
  EXPECT_EQ(markov_record(asym).record.status, Status::Violated);
}

TEST(Semigroup, SpectralAndChebyshevRoutesAgree) {
  const auto p = power_1d(0.25, {0.0});
  const auto A = assemble(p, build_mesh(1, p.domain(), 300), 0.0);
  const Semigroup spec(A, true), cheb(A, false);
  EXPECT_TRUE(spec.spectral());
  EXPECT_FALSE(cheb.spectral());
  const auto phi = random_vector(A.size(), 12);
  for (double t : {0.0, 0.01, 1.0}) {
    EXPECT_LT(max_abs_diff(spec.apply(phi, t), cheb.apply(phi, t)), 1e-11);
  }
}

TEST(OffDiagonal, LaplacianHoldsAndFasterOperatorIsCaught) {
  const auto p = elliptic_1d(1.0, -4.0, 4.0);
  const auto m = build_mesh(1, p.domain(), 512);
  const std::vector<Point> centers{{-1.0, 0.0}, {0.0, 0.0}, {1.5, 0.0}};
  const std::vector<double> radii{0.2, 0.5};
  const auto pairs = make_ball_pairs(p, m, centers, radii, 0.0);
  EXPECT_EQ(pairs.size(), 3u * 4u);
  const std::vector<double> ts{0.01, 0.1, 1.0};
  const auto A = assemble(p, m, 0.0);
  const Semigroup S(A);
  const auto ok = offdiagonal_gaussian_check(S, pairs, ts);
  EXPECT_EQ(ok.record.status, Status::Holds);
  EXPECT_GT(ok.record.value, 0.0);
  ASSERT_EQ(ok.tables.size(), 1u);
  EXPECT_EQ(ok.tables[0].rows.size(), pairs.size() * ts.size());

  // Kernel of 4x the coefficient measured in the metric of the original one.
  const auto A4 = assemble(elliptic_1d(4.0, -4.0, 4.0), m, 0.0);
  const Semigroup fast(A4);
  EXPECT_EQ(offdiagonal_gaussian_check(fast, pairs, ts).record.status, Status::Violated);

  const auto sets = make_set_pairs(m, centers, 0.25);
  EXPECT_EQ(sets.size(), 3u);
  EXPECT_EQ(euclidean_offdiagonal_check(S, sets, ts, 1.0).record.status, Status::Holds);
  EXPECT_EQ(euclidean_offdiagonal_check(fast, sets, ts, 1.0).record.status, Status::Violated);
}

TEST(OffDiagonal, BallsBelowMinimumCellCountAreDropped) {
  const auto p = elliptic_1d(1.0, -4.0, 4.0);
  const auto m = build_mesh(1, p.domain(), 64);  // h = 1/8
  const std::vector<Point> centers{{-1.0, 0.0}, {1.0, 0.0}};
  EXPECT_TRUE(make_ball_pairs(p, m, centers, std::vector<double>{0.2}, 0.0, 8).empty());
  EXPECT_EQ(make_ball_pairs(p, m, centers, std::vector<double>{0.6}, 0.0, 8).size(), 1u);
}

TEST(Wave, SpeedOneHoldsAndSpeedTwoIsCaught) {
  const auto p = elliptic_1d(1.0);
  const auto m = build_mesh(1, p.domain(), 1024);
  const auto dist = distance_field(p, m, {-3.0, 0.0}, 0.0, {EdgeWeighting::Midpoint});
  const std::vector<double> ts{0.5, 1.0, 2.0, 4.0};
  const auto ok = wave_speed_check(assemble(p, m, 0.0), dist, ts);
  EXPECT_EQ(ok.record.status, Status::Holds);
  EXPECT_LE(ok.record.value, 1.05);
  EXPECT_GT(ok.record.value, 0.9);
  const auto bad = wave_speed_check(assemble(elliptic_1d(4.0), m, 0.0), dist, ts);
  EXPECT_EQ(bad.record.status, Status::Violated);
  EXPECT_GT(bad.record.value, 1.8);
}

TEST(Wave, NothingCrossesAnExactCut) {
  const auto p = power_1d(0.75, {0.0}, -8.0, 8.0);
  const auto m = build_mesh(1, p.domain(), 1023);
  const auto dist = distance_field(p, m, {-1.0, 0.0}, 0.0, {EdgeWeighting::Midpoint});
  std::vector<unsigned char> right(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) right[i] = m.point(i)[0] > 0.0;
  const auto r = wave_speed_check(assemble(p, m, 0.0), dist, std::vector<double>{1.0, 4.0, 8.0}, {}, right);
  EXPECT_EQ(r.record.status, Status::Holds);
  const auto leak = wave_speed_check(assemble(p, m, 1e-2), dist, std::vector<double>{1.0, 4.0, 8.0}, {}, right);
  EXPECT_EQ(leak.record.status, Status::Violated);
}

TEST(Separation, ProbeDichotomy) {
  SeparationConfig cfg;
  cfg.levels = {6, 7, 8, 9, 10, 11};
  const auto low = separation_probe(power_1d(0.1), cfg);
  EXPECT_EQ(low.verdict, SeparationVerdict::NonSeparating);
  const auto high = separation_probe(power_1d(0.75), cfg);
  EXPECT_EQ(high.verdict, SeparationVerdict::Separating);
  ASSERT_EQ(high.leakage.size(), 1u);
  for (std::size_t k = 1; k < high.leakage[0].size(); ++k) {
    EXPECT_LE(high.leakage[0][k], high.leakage[0][k - 1]);
  }
  const auto rec = separation_record(power_1d(0.75), cfg, SeparationVerdict::NonSeparating);
  EXPECT_EQ(rec.record.status, Status::Violated);
  EXPECT_EQ(rec.record.label, "separating");
}

TEST(Decay, LaplacianSmallTimeSlope) {
  const auto p = elliptic_1d(1.0);
  const auto m = build_mesh(1, p.domain(), 2048);
  const auto A = assemble(p, m, 0.0);
  const std::vector<double> ts{0.003, 0.01, 0.03, 0.1};
  const auto r = smalltime_decay_fit(A, ts, 1.0, 1.0, SampleStrategy::interior(2.0));
  EXPECT_EQ(r.record.status, Status::Holds);
  EXPECT_NEAR(r.record.value, -0.5, 0.02);
  const auto g = largetime_gaussian_check(A, std::vector<double>{0.5, 1.0, 2.0}, SampleStrategy::interior(5.0));
  EXPECT_EQ(g.record.status, Status::Holds);
}

TEST(Decay, DoubleZeroFloor) {
  const auto p = power_1d(0.75, {-1.0, 1.0}, -8.0, 8.0);
  const auto m = build_mesh(1, p.domain(), 504);
  const auto A = assemble(p, m, 0.0);
  const auto recs = largetime_floor_check(A, std::vector<double>{1.0, 10.0, 50.0}, 0.5,
                                          SampleStrategy::within({-0.5, 0.5}));
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].record.status, Status::Holds);
  EXPECT_EQ(recs[1].record.status, Status::Holds);
  // Free line: the same floor fails.
  const auto free = largetime_floor_check(assemble(elliptic_1d(1.0), m, 0.0), std::vector<double>{1.0, 10.0}, 0.5,
                                          SampleStrategy::interior(5.0));
  EXPECT_EQ(free[0].record.status, Status::Violated);
}

TEST(Resolvent, VolumeScalingOnLaplacian) {
  const auto p = elliptic_1d(1.0, -4.0, 4.0);
  const auto m = build_mesh(1, p.domain(), 2048);
  const auto A = assemble(p, m, 0.0);
  const auto dist = distance_field(p, m, {0.0, 0.0}, 0.0, {EdgeWeighting::Midpoint});
  const auto r = resolvent_volume_scaling(A, dist);
  EXPECT_EQ(r.record.status, Status::Holds);
  EXPECT_NEAR(r.record.value, -1.0, 0.15);
}

TEST(OnDiagonal, LowerBoundPositive) {
  const auto p = power_1d(0.5, {0.0}, -4.0, 4.0);
  const auto m = build_mesh(1, p.domain(), 1024);
  const auto A = assemble(p, m, 0.0);
  const Semigroup S(A);
  const std::vector<Point> centers{{-2.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}};
  const auto r = ondiagonal_lower_check(S, 1.0, 0.5, centers, false);
  EXPECT_EQ(r.record.status, Status::Holds);
  EXPECT_GT(r.record.value, 0.0);
}

TEST(Report, WritesConsistentFiles) {
  const auto p = power_1d(0.5, {0.3});
  const auto A = assemble(p, build_mesh(1, p.domain(), 128), 0.0);
  auto make_report = [&] {
    DiagnosticsReport rep;
    rep.scenario = "unit";
    rep.environment = {{"n", 128.0}, {"profile", std::string("power, delta 0.5")}};
    rep.add(markov_record(A));
    rep.add(conservation_defect(A, std::vector<double>{0.1, 1.0}));
    rep.add(conservation_defect(A, std::vector<double>{0.5}));
    return rep;
  };
  const auto base = std::filesystem::temp_directory_path() / "degenlab_report_test";
  std::filesystem::remove_all(base);
  make_report().write(base / "a");
  make_report().write(base / "b");
  for (const char* f : {"checks.csv", "environment.csv", "conservation.csv", "conservation_2.csv", "report.md",
                        "report.json"}) {
    ASSERT_TRUE(std::filesystem::exists(base / "a" / f)) << f;
    EXPECT_EQ(slurp(base / "a" / f), slurp(base / "b" / f)) << f;
  }
  EXPECT_FALSE(make_report().any_violated());

  // Every number in the markdown appears in checks.csv or environment.csv.
  const std::string md = slurp(base / "a" / "report.md");
  const std::string csvs = slurp(base / "a" / "checks.csv") + slurp(base / "a" / "environment.csv");
  const std::regex number(R"([-+]?\d+(\.\d+)?([eE][-+]?\d+)?)");
  std::size_t seen = 0;
  for (auto it = std::sregex_iterator(md.begin(), md.end(), number); it != std::sregex_iterator(); ++it) {
    EXPECT_NE(csvs.find(it->str()), std::string::npos) << it->str();
    ++seen;
  }
  EXPECT_GT(seen, 3u);

  const auto doc = make_report().to_json();
  EXPECT_EQ(doc.at("checks").size(), 3u);
  EXPECT_EQ(doc.at("checks")[2].at("name"), "conservation_2");
}

TEST(Report, CsvEscaping) {
  Table t{"x", {"a", "b"}, {{std::string("has,comma"), 1.5}, {std::string("quote\"d"), 2.0}}};
  const auto path = std::filesystem::temp_directory_path() / "degenlab_escape.csv";
  t.write_csv(path);
  EXPECT_EQ(slurp(path), "a,b\n\"has,comma\",1.5\n\"quote\"\"d\",2\n");
}
