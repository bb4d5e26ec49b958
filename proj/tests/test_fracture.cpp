#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fcg/fracture.hpp"

namespace {

using namespace fcg;

constexpr double kDeg = 180.0 / std::numbers::pi;

LoadSchedule uniform_schedule(double tension, double shear, double width, std::size_t n = 1) {
  LoadSchedule s;
  for (std::size_t i = 0; i <= n; ++i) s.slice_bounds.push_back(width * static_cast<double>(i) / static_cast<double>(n));
  s.tensions.assign(n, tension);
  s.shears.assign(n, shear);
  s.rare_flags.assign(n, false);
  return s;
}

// Plain power-form evaluation, kept apart from the Horner form in the kernel.
double width_factor_oracle(double x) {
  return 1.12 - 0.231 * x + 10.55 * std::pow(x, 2) - 21.72 * std::pow(x, 3) + 30.39 * std::pow(x, 4);
}

TEST(FiniteWidthFactor, PolynomialValues) {
  EXPECT_DOUBLE_EQ(finite_width_factor(0.0), 1.12);
  EXPECT_NEAR(finite_width_factor(0.1), 1.18372, 1e-5);
  EXPECT_NEAR(finite_width_factor(0.5), 2.826375, 1e-12);
}

TEST(FiniteWidthFactor, OutsideValidityThrows) {
  EXPECT_THROW(finite_width_factor(0.61), DomainError);
  EXPECT_THROW(finite_width_factor(-0.01), DomainError);
}

TEST(ResolveSifs, ZeroLoadGivesZero) {
  const PlateSpec plate;
  const TipState tip{{0.002, 0.005}, 0.3, 0.002};
  const SifPair k = resolve_sifs({0.0, 0.0}, tip, plate);
  EXPECT_EQ(k.k1, 0.0);
  EXPECT_EQ(k.k2, 0.0);
}

TEST(ResolveSifs, PureTension) {
  const PlateSpec plate;
  const TipState tip{{0.001, 0.005}, 0.0, 0.001};
  const SifPair k = resolve_sifs({100.0, 0.0}, tip, plate);
  EXPECT_NEAR(k.k1, 6.635, 0.01);
  EXPECT_EQ(k.k2, 0.0);
}

TEST(ResolveSifs, PureShear) {
  const PlateSpec plate;
  const TipState tip{{0.001, 0.005}, 0.0, 0.001};
  const SifPair k = resolve_sifs({0.0, 50.0}, tip, plate);
  EXPECT_EQ(k.k1, 0.0);
  EXPECT_NEAR(k.k2, 3.317, 0.01);
}

TEST(ResolveSifs, TipOutsidePlateThrows) {
  const PlateSpec plate;
  EXPECT_THROW(resolve_sifs({100.0, 0.0}, {{0.02, 0.005}, 0.0, 0.001}, plate), DomainError);
}

TEST(DeflectionAngle, Examples) {
  EXPECT_EQ(deflection_angle({1.0, 0.0}), 0.0);
  EXPECT_NEAR(deflection_angle({0.0, 1.0}), -std::acos(1.0 / 3.0), 1e-12);
  EXPECT_NEAR(deflection_angle({0.0, 1.0}) * kDeg, -70.53, 0.01);
  EXPECT_NEAR(deflection_angle({1.0, 1.0}), -0.92730, 1e-5);
  EXPECT_THROW(deflection_angle({0.0, 0.0}), UndefinedDirectionError);
}

TEST(DeflectionAngle, OpposesShearSign) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double k1 = u(rng), k2 = u(rng);
    EXPECT_LT(deflection_angle({k1, k2}), 0.0);
    EXPECT_GT(deflection_angle({k1, -k2}), 0.0);
    EXPECT_DOUBLE_EQ(deflection_angle({k1, k2}), -deflection_angle({k1, -k2}));
  }
}

TEST(DeflectionAngle, ScaleInvariant) {
  for (double s : {1e-6, 1e-3, 1.0, 1e3, 1e6})
    EXPECT_NEAR(deflection_angle({2.0 * s, 0.7 * s}), deflection_angle({2.0, 0.7}), 1e-12);
}

TEST(ParisIncrement, ClosedForms) {
  const MaterialSpec steel;
  EXPECT_NEAR(paris_increment(10.0, steel, 3e-4), 30928.0, 1.0);
  EXPECT_NEAR(paris_increment(20.0, steel, 3e-4), 3866.0, 1.0);
  MaterialSpec flat = steel;
  flat.paris_m = 0.0;
  flat.paris_c = 1e-6;
  EXPECT_DOUBLE_EQ(paris_increment(3.7, flat, 1e-6), 1.0);
  EXPECT_THROW(paris_increment(0.0, steel, 3e-4), NonPropagatingError);
}

TEST(SimulateFcg, PureTensionIsStraight) {
  const PlateSpec plate;
  const auto path = simulate_fcg(plate, MaterialSpec{}, uniform_schedule(100.0, 0.0, plate.width));
  ASSERT_EQ(path.n_steps(), 17u);
  for (const auto& p : path.points) EXPECT_NEAR(p.y, 0.005, 1e-12);
}

TEST(SimulateFcg, LifeMatchesStepSum) {
  const PlateSpec plate;
  const MaterialSpec mat;
  const double sigma = 100.0;
  const auto path = simulate_fcg(plate, mat, uniform_schedule(sigma, 0.0, plate.width));
  double oracle = 0.0;
  for (int n = 0; n < 17; ++n) {
    const double a = 0.001 + n * 0.0003;
    const double dk = sigma * std::sqrt(std::numbers::pi * a) * width_factor_oracle(a / 0.010);
    oracle += 0.0003 / (9.7e-12 * dk * dk * dk);
  }
  EXPECT_NEAR(path.total_life, oracle, 1e-9 * oracle);
}

TEST(SimulateFcg, ShearChangeAtSliceBoundary) {
  const PlateSpec plate;
  LoadSchedule s = uniform_schedule(100.0, 0.0, plate.width, 2);
  s.shears[1] = 20.0;
  const auto path = simulate_fcg(plate, MaterialSpec{}, s);
  bool turned = false;
  for (std::size_t i = 1; i < path.points.size(); ++i) {
    const Point2 from = path.points[i - 1];
    const double heading = std::atan2(path.points[i].y - from.y, path.points[i].x - from.x);
    if (from.x < 0.005) {
      EXPECT_EQ(heading, 0.0);
    } else if (!turned) {
      EXPECT_LT(heading, 0.0);
      const SifPair k = resolve_sifs({100.0, 20.0}, {from, 0.0, 0.001 + (i - 1) * 0.0003}, plate);
      EXPECT_NEAR(heading, deflection_angle(k), 1e-12);
      turned = true;
    }
  }
  EXPECT_TRUE(turned);
}

TEST(SimulateFcg, MirrorSymmetry) {
  const PlateSpec plate;
  LoadSchedule s = uniform_schedule(100.0, 0.0, plate.width, 5);
  s.shears = {5.0, -12.0, 8.0, 3.0, -4.0};
  LoadSchedule m = s;
  for (auto& v : m.shears) v = -v;
  const auto a = simulate_fcg(plate, MaterialSpec{}, s);
  const auto b = simulate_fcg(plate, MaterialSpec{}, m);
  ASSERT_EQ(a.points.size(), b.points.size());
  const double axis = plate.notch_mouth().y;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_NEAR(a.points[i].x, b.points[i].x, 1e-9);
    EXPECT_NEAR(a.points[i].y - axis, axis - b.points[i].y, 1e-9);
  }
  EXPECT_NEAR(a.total_life, b.total_life, 1e-9 * a.total_life);
}

TEST(SimulateFcg, ZeroLoadDoesNotPropagate) {
  const PlateSpec plate;
  EXPECT_THROW(simulate_fcg(plate, MaterialSpec{}, uniform_schedule(0.0, 0.0, plate.width)), NonPropagatingError);
}

TEST(SimulateFcg, StepsAdvanceByFixedLength) {
  const PlateSpec plate;
  LoadSchedule s = uniform_schedule(100.0, 0.0, plate.width, 3);
  s.shears = {10.0, -10.0, 5.0};
  const auto path = simulate_fcg(plate, MaterialSpec{}, s);
  for (std::size_t i = 1; i < path.points.size(); ++i)
    EXPECT_NEAR(distance(path.points[i - 1], path.points[i]), 0.0003, 1e-15);
}

}  // namespace
