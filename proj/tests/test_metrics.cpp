#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <vector>

#include "fcg/metrics.hpp"

namespace {

using namespace fcg;

std::vector<Point2> line(std::size_t n, Point2 offset = {}, double scale = 1.0) {
  std::vector<Point2> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({scale * (0.001 * static_cast<double>(i) + offset.x), scale * offset.y});
  return p;
}

TEST(PathRmse, IdenticalIsZero) {
  const auto a = line(5);
  EXPECT_EQ(path_rmse(a, a, 1, 50), 0.0);
}

TEST(PathRmse, WorkedExample) {
  const auto truth = line(3);
  const auto pred = line(3, {0.0003, 0.0004});
  EXPECT_NEAR(path_rmse(pred, truth, 2, 3), 0.0005, 1e-15);
}

TEST(PathRmse, SingleTermWindow) {
  auto a = line(4);
  auto b = line(4);
  b[1].y = 0.0002;
  EXPECT_NEAR(path_rmse(a, b, 4, 4), 0.0, 1e-18);
  EXPECT_THROW(path_rmse(a, b, 5, 4), DomainError);
  EXPECT_THROW(path_rmse(a, b, 0, 4), DomainError);
}

TEST(PathRmse, TranslationAndScale) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.005);
  std::vector<Point2> a, b;
  for (int i = 0; i < 7; ++i) {
    a.push_back({u(rng), u(rng)});
    b.push_back({u(rng), u(rng)});
  }
  const double base = path_rmse(a, b, 10, 40);
  auto shift = [](std::vector<Point2> v, Point2 d, double s) {
    for (auto& p : v) p = s * (p + d);
    return v;
  };
  EXPECT_NEAR(path_rmse(shift(a, {0.002, -0.001}, 1.0), shift(b, {0.002, -0.001}, 1.0), 10, 40), base, 1e-15);
  EXPECT_NEAR(path_rmse(shift(a, {}, 3.0), shift(b, {}, 3.0), 10, 40), 3.0 * base, 1e-15);
}

TEST(Ssim, IdenticalIsOne) {
  std::vector<float> x(64 * 64, 0.0F);
  for (std::size_t i = 0; i < x.size(); i += 37) x[i] = 1.0F;
  EXPECT_EQ(ssim(x, x), 1.0);
}

TEST(Ssim, ZerosAgainstOnes) {
  const std::vector<float> zeros(100, 0.0F), ones(100, 1.0F);
  EXPECT_NEAR(ssim(zeros, ones), 1e-4 / 1.0001, 1e-9);
}

TEST(Ssim, BoundedForRandomGrids) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.1);
  for (int t = 0; t < 50; ++t) {
    std::vector<float> a(256), b(256);
    for (auto& v : a) v = coin(rng) ? 1.0F : 0.0F;
    for (auto& v : b) v = coin(rng) ? 1.0F : 0.0F;
    const double s = ssim(a, b);
    EXPECT_GT(s, -1.0);
    EXPECT_LE(s, 1.0);
    if (a != b) EXPECT_LT(s, 1.0);
  }
}

TEST(Ssim, ShapeMismatchThrows) {
  EXPECT_THROW(ssim(std::vector<float>(4), std::vector<float>(5)), ShapeError);
}

TEST(LifeAccuracy, Examples) {
  const std::vector<double> truth{10.0, 20.0};
  EXPECT_EQ(life_accuracy(truth, truth), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(life_accuracy(truth, std::vector<double>{11.0, 17.0}), (std::vector<double>{0.75, 0.25}));
  EXPECT_EQ(life_accuracy(std::vector<double>{5.0}, std::vector<double>{7.0}), (std::vector<double>{0.0}));
}

TEST(LifeAccuracy, SumsToLengthMinusOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  std::vector<double> t(9), p(9);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = u(rng);
    p[i] = t[i] + u(rng);
  }
  const auto acc = life_accuracy(t, p);
  EXPECT_NEAR(std::accumulate(acc.begin(), acc.end(), 0.0), 8.0, 1e-12);
}

}  // namespace
