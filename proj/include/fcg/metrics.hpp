#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/geometry.hpp"
#include "fcg/voxel.hpp"

namespace fcg {

struct MetricReport {
  double rmse = 0.0;           // m
  double ssim = 0.0;
  double life_accuracy = 0.0;
};

/// Root-mean-square point distance over the unknown part of a path. Both
/// polylines are resampled to `n` points by arc length; points 1..k-1
/// (1-based) are treated as observed and the error runs over k..n.
inline double path_rmse(std::span<const Point2> pred, std::span<const Point2> truth, std::size_t k, std::size_t n) {
  if (n == 0) throw DomainError("path_rmse: n must be positive");
  if (k < 1 || k > n) throw DomainError("path_rmse: k must lie in [1, n]");
  const auto p = resample_by_arc_length(pred, n);
  const auto t = resample_by_arc_length(truth, n);
  double sum = 0.0;
  for (std::size_t i = k - 1; i < n; ++i) {
    const double d = distance(p[i], t[i]);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(n - k + 1));
}

/// Single-window structural similarity over all voxels with population
/// statistics; c1 = (0.01 R)^2, c2 = (0.03 R)^2.
inline double ssim(std::span<const float> pred, std::span<const float> truth, double value_range = 1.0) {
  if (pred.size() != truth.size()) throw ShapeError("ssim: grids differ in size");
  if (pred.empty()) throw ShapeError("ssim: empty grids");
  const double n = static_cast<double>(pred.size());
  double mp = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    mp += pred[i];
    mt += truth[i];
  }
  mp /= n;
  mt /= n;
  double vp = 0.0, vt = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double a = pred[i] - mp;
    const double b = truth[i] - mt;
    vp += a * a;
    vt += b * b;
    cov += a * b;
  }
  vp /= n;
  vt /= n;
  cov /= n;
  const double c1 = (0.01 * value_range) * (0.01 * value_range);
  const double c2 = (0.03 * value_range) * (0.03 * value_range);
  return ((2.0 * mp * mt + c1) * (2.0 * cov + c2)) / ((mp * mp + mt * mt + c1) * (vp + vt + c2));
}

inline double ssim(const VoxelGrid& pred, const VoxelGrid& truth) {
  if (pred.resolution != truth.resolution) throw ShapeError("ssim: grid resolutions differ");
  return ssim(pred.values, truth.values);
}

/// Per-observation life accuracy 1 - |tau_i - tau_hat_i| / sum_j |tau_j - tau_hat_j|.
/// A zero total error gives 1 everywhere.
inline std::vector<double> life_accuracy(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) throw ShapeError("life_accuracy: series lengths differ");
  if (truth.empty()) throw DomainError("life_accuracy: empty series");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) total += std::abs(truth[i] - pred[i]);
  std::vector<double> acc(truth.size(), 1.0);
  if (total == 0.0) return acc;
  for (std::size_t i = 0; i < truth.size(); ++i) acc[i] = 1.0 - std::abs(truth[i] - pred[i]) / total;
  return acc;
}

}  // namespace fcg
