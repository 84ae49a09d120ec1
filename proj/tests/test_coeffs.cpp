#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "degenlab/coeffs.hpp"
#include "degenlab/error.hpp"
#include "degenlab/profile_io.hpp"
#include "degenlab/quadrature.hpp"
#include "support.hpp"

using namespace degenlab;
using testing_support::power_1d;
using testing_support::radial_2d;

TEST(PowerProfile, MatchesClosedForm) {
  for (double delta : {0.1, 0.5, 0.75}) {
    for (double rho : {0.0, 1e-3, 0.5, 1.0, 3.0}) {
      const double expect = std::pow(rho * rho / (1.0 + rho * rho), delta);
      EXPECT_NEAR(power_profile(rho, delta), expect, 1e-15 * (1.0 + expect));
    }
  }
  EXPECT_EQ(power_profile(0.0, 0.0), 1.0);
}

TEST(Profile, NearestCenterDefinesRho) {
  const auto p = power_1d(0.5, {-1.0, 1.0});
  EXPECT_EQ(p.scalar({-1.0, 0.0}), 0.0);
  EXPECT_EQ(p.scalar({1.0, 0.0}), 0.0);
  EXPECT_NEAR(p.scalar({0.0, 0.0}), power_profile(1.0, 0.5), 1e-15);
  EXPECT_NEAR(p.scalar({0.6, 0.0}), power_profile(0.4, 0.5), 1e-15);
}

TEST(Profile, EvalIsSymmetricAndPsd) {
  const auto p = radial_2d(0.75);
  for (double x = -2.0; x <= 2.0; x += 0.25) {
    for (double y = -2.0; y <= 2.0; y += 0.25) {
      const auto m = p.eval({x, y});
      EXPECT_EQ(m.xy, 0.0);
      EXPECT_GE(m.smallest_eigenvalue(), 0.0);
      EXPECT_LE(m.largest_eigenvalue(), p.norm() + 1e-12);
    }
  }
}

TEST(Profile, OutsideDomainThrows) {
  const auto p = power_1d(0.5);
  EXPECT_THROW(p.eval({4.5, 0.0}), DomainError);
  EXPECT_THROW(p.scalar({-5.0, 0.0}), DomainError);
}

TEST(Profile, RejectsInvalidParameters) {
  EXPECT_THROW(CoefficientProfile(1, family::PowerDegenerate{1.0, {{0.0, 0.0}}}, {Interval{-1, 1}, {}}),
               ValidationError);
  EXPECT_THROW(CoefficientProfile(1, family::PowerDegenerate{-0.1, {{0.0, 0.0}}}, {Interval{-1, 1}, {}}),
               ValidationError);
  // Through JSON the same failure names the offending object.
  try {
    power_1d(1.0);
    ADD_FAILURE() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "profile.family");
  }
  EXPECT_THROW(CoefficientProfile(1, family::PowerDegenerate{0.5, {}}, {Interval{-1, 1}, {}}),
               ValidationError);
  EXPECT_THROW(CoefficientProfile(1, family::StronglyElliptic{{1, 0.0, 0.0, 0.0}}, {Interval{-1, 1}, {}}),
               ValidationError);
}

TEST(Profile, ViscosityShiftIsStrictlyMonotone) {
  const auto base = power_1d(0.75, {0.0, 2.0});
  for (double x = -4.0; x <= 4.0; x += 0.125) {
    double prev = base.smallest_eigenvalue({x, 0.0});
    for (double eps : {1e-6, 1e-4, 1e-2, 1.0}) {
      const double cur = base.viscosity_shift(eps).smallest_eigenvalue({x, 0.0});
      EXPECT_GT(cur, prev) << "x=" << x << " eps=" << eps;
      prev = cur;
    }
  }
  EXPECT_THROW(base.viscosity_shift(-1.0), ArgumentError);
  EXPECT_NEAR(base.viscosity_shift(0.5).viscosity_shift(0.25).epsilon(), 0.75, 1e-15);
}

TEST(Profile, SampledProjectsTinyNegativeEigenvalues) {
  family::Sampled s;
  s.points = {3, 1};
  s.entries = {{1, 1.0, 0.0, 0.0}, {1, -1e-14, 0.0, 0.0}, {1, 2.0, 0.0, 0.0}};
  const CoefficientProfile p(1, s, {Interval{0.0, 1.0}, {}});
  EXPECT_EQ(p.eval({0.5, 0.0}).xx, 0.0);
  EXPECT_NEAR(p.eval({0.25, 0.0}).xx, 0.5, 1e-15);

  s.entries[1].xx = -1e-3;
  EXPECT_THROW(CoefficientProfile(1, s, {Interval{0.0, 1.0}, {}}), ValidationError);
}

TEST(Profile, SampledBilinearInterpolation) {
  family::Sampled s;
  s.points = {2, 2};
  s.entries = {{2, 1.0, 0.0, 1.0}, {2, 2.0, 0.0, 2.0}, {2, 3.0, 0.0, 3.0}, {2, 4.0, 0.0, 4.0}};
  const CoefficientProfile p(2, s, {Interval{0.0, 1.0}, Interval{0.0, 1.0}});
  EXPECT_NEAR(p.eval({0.5, 0.5}).xx, 2.5, 1e-14);
  EXPECT_NEAR(p.eval({1.0, 0.0}).xx, 2.0, 1e-14);
  EXPECT_NEAR(p.eval({0.25, 1.0}).yy, 3.25, 1e-14);
}

TEST(ProfileIo, RoundTrip) {
  const auto p = power_1d(0.25, {-1.0, 1.5}, -3.0, 5.0);
  const auto doc = profile_to_json(p);
  const auto q = profile_from_json(doc);
  EXPECT_EQ(q.kind(), "power");
  for (double x = -3.0; x <= 5.0; x += 0.37) EXPECT_EQ(p.scalar({x, 0.0}), q.scalar({x, 0.0}));
}

TEST(ProfileIo, SchemaErrorsNameTheField) {
  try {
    profile_from_json({{"dimension", 1}, {"family", {{"kind", "power"}, {"centers", {0.0}}}},
                       {"domain", {-1.0, 1.0}}});
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(e.field().find("delta"), std::string::npos) << e.field();
  }
  try {
    profile_from_json({{"dimension", 1}, {"family", {{"kind", "banana"}}}, {"domain", {-1.0, 1.0}}});
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(e.field().find("kind"), std::string::npos) << e.field();
  }
}

TEST(ProfileIo, SampledCsvResolvesAgainstBaseDir) {
  const auto dir = std::filesystem::temp_directory_path() / "degenlab_test_csv";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "c.csv");
    out << "1.0\n0.5\n0.25\n";
  }
  const auto p = profile_from_json({{"dimension", 1},
                                    {"family", {{"kind", "sampled"}, {"points", {3}}, {"csv", "c.csv"}}},
                                    {"domain", {0.0, 2.0}}},
                                   dir);
  EXPECT_NEAR(p.eval({1.5, 0.0}).xx, 0.375, 1e-14);
}

// ---------------------------------------------------------------------------
// Quadrature

TEST(Quadrature, IntegrateMatchesClosedForms) {
  EXPECT_NEAR(quadrature::integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value,
              std::exp(1.0) - 1.0, 1e-13);
  // Tiny intervals keep full relative accuracy.
  const double a = std::ldexp(1.0, -90), b = 2.0 * a;
  const double v = quadrature::integrate([](double x) { return 1.0 / std::sqrt(x); }, a, b).value;
  EXPECT_NEAR(v / (2.0 * (std::sqrt(b) - std::sqrt(a))), 1.0, 1e-12);
}

TEST(Quadrature, SingularTailsAreClassified) {
  for (double beta : {0.2, 0.5, 0.8}) {
    const auto r = quadrature::integrate_toward(
        [beta](double x) { return std::pow(std::abs(x), -beta); }, 0.0, 1.0);
    EXPECT_EQ(r.tail, quadrature::Tail::Convergent) << beta;
    EXPECT_NEAR(r.value, 1.0 / (1.0 - beta), 1e-6 / (1.0 - beta)) << beta;
    EXPECT_NEAR(r.exponent, beta, 0.02) << beta;
  }
  for (double beta : {1.0, 1.2, 1.5}) {
    const auto r = quadrature::integrate_toward(
        [beta](double x) { return std::pow(std::abs(x), -beta); }, 0.0, -1.0);
    EXPECT_EQ(r.tail, quadrature::Tail::Divergent) << beta;
    EXPECT_TRUE(std::isinf(r.value));
  }
}

// ---------------------------------------------------------------------------
// Classification

TEST(Classify, DeltaThreshold) {
  for (double delta : {0.5, 0.6, 0.75, 0.9}) {
    const auto c = classify(power_1d(delta));
    EXPECT_EQ(c.verdict, Verdict::Separating) << delta;
    ASSERT_EQ(c.cut_points.size(), 1u) << delta;
    EXPECT_NEAR(c.cut_points[0], 0.0, 1e-6);
  }
  for (double delta : {0.1, 0.25, 0.4}) {
    const auto c = classify(power_1d(delta));
    EXPECT_EQ(c.verdict, Verdict::ClosableDegenerate) << delta;
    EXPECT_TRUE(c.cut_points.empty()) << delta;
  }
}

TEST(Classify, ExponentEstimate) {
  const auto c = classify(power_1d(0.25, {0.3}));
  ASSERT_EQ(c.integrability_table.size(), 2u);
  for (const auto& e : c.integrability_table) {
    EXPECT_NEAR(e.zero, 0.3, 1e-6);
    EXPECT_EQ(e.inverse, quadrature::Tail::Convergent);
    EXPECT_NEAR(e.exponent, 0.5, 0.02);
  }
}

TEST(Classify, ViscosityMakesEveryProfileStronglyElliptic) {
  for (double delta : {0.1, 0.25, 0.5, 0.75}) {
    for (double eps : {1e-4, 1e-2}) {
      EXPECT_EQ(classify(power_1d(delta, {-1.0, 1.0}).viscosity_shift(eps)).verdict,
                Verdict::StronglyElliptic);
    }
  }
  EXPECT_EQ(classify(radial_2d(0.75).viscosity_shift(1e-4)).verdict, Verdict::StronglyElliptic);
}

TEST(Classify, TwoDimensionalNormalProfile) {
  EXPECT_EQ(classify(radial_2d(0.75)).verdict, Verdict::Separating);
  EXPECT_EQ(classify(radial_2d(0.25)).verdict, Verdict::ClosableDegenerate);
}

TEST(Classify, LaplacianIsStronglyElliptic) {
  const auto c = classify(testing_support::laplacian_1d());
  EXPECT_EQ(c.verdict, Verdict::StronglyElliptic);
  EXPECT_NEAR(c.mu_lower, 1.0, 1e-12);
}

TEST(FindZeros, MergesAndRefines) {
  QuadratureConfig cfg;
  const auto z = find_zeros([](double x) { return std::abs(std::sin(x)); }, {-4.0, 4.0}, cfg);
  ASSERT_EQ(z.size(), 3u);
  EXPECT_NEAR(z[0], -M_PI, 1e-6);
  EXPECT_NEAR(z[1], 0.0, 1e-6);
  EXPECT_NEAR(z[2], M_PI, 1e-6);
}
