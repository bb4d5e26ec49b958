#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/fracture.hpp"
#include "fcg/geometry.hpp"

namespace fcg {

struct Resolution {
  std::size_t rows = 64;  // along the plate height (y)
  std::size_t cols = 64;  // along the plate width (x)
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

/// Row-major occupancy grid covering the whole plate. Cell (r, c) spans
/// x in [c*dx, (c+1)*dx), y in [r*dy, (r+1)*dy).
struct VoxelGrid {
  Resolution resolution;
  double cell_dx = 0.0;  // m
  double cell_dy = 0.0;  // m
  std::vector<float> values;

  VoxelGrid() = default;
  VoxelGrid(Resolution res, double dx, double dy)
      : resolution(res), cell_dx(dx), cell_dy(dy), values(res.rows * res.cols, 0.0F) {}

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] float at(std::size_t r, std::size_t c) const { return values[r * resolution.cols + c]; }
  float& at(std::size_t r, std::size_t c) { return values[r * resolution.cols + c]; }
  [[nodiscard]] std::size_t count_set(float threshold = 0.5F) const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [=](float v) { return v >= threshold; }));
  }
  [[nodiscard]] Point2 cell_center(std::size_t r, std::size_t c) const {
    return {(static_cast<double>(c) + 0.5) * cell_dx, (static_cast<double>(r) + 0.5) * cell_dy};
  }

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;
};

inline VoxelGrid empty_grid(const PlateSpec& plate, Resolution res) {
  if (res.rows < 8 || res.cols < 8) throw DomainError("rasterize: resolution must be at least 8x8");
  return VoxelGrid(res, plate.width / static_cast<double>(res.cols),
                   plate.height / static_cast<double>(res.rows));
}

namespace detail {

// Marks every cell the segment a-b passes through (grid traversal in cell
// units, cells half-open so a point on a grid line belongs to the cell above/right).
inline void mark_segment(VoxelGrid& g, Point2 a, Point2 b) {
  const auto rows = static_cast<long>(g.resolution.rows);
  const auto cols = static_cast<long>(g.resolution.cols);
  const double x0 = a.x / g.cell_dx, y0 = a.y / g.cell_dy;
  const double x1 = b.x / g.cell_dx, y1 = b.y / g.cell_dy;
  auto clamp_col = [&](double v) { return std::clamp(static_cast<long>(std::floor(v)), 0L, cols - 1); };
  auto clamp_row = [&](double v) { return std::clamp(static_cast<long>(std::floor(v)), 0L, rows - 1); };

  long cx = clamp_col(x0), cy = clamp_row(y0);
  const long ex = clamp_col(x1), ey = clamp_row(y1);
  const double dx = x1 - x0, dy = y1 - y0;
  const long sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const long sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  double t_max_x = sx > 0 ? (static_cast<double>(cx + 1) - x0) / dx : (sx < 0 ? (x0 - static_cast<double>(cx)) / -dx : inf);
  double t_max_y = sy > 0 ? (static_cast<double>(cy + 1) - y0) / dy : (sy < 0 ? (y0 - static_cast<double>(cy)) / -dy : inf);
  const double t_dx = sx != 0 ? 1.0 / std::abs(dx) : inf;
  const double t_dy = sy != 0 ? 1.0 / std::abs(dy) : inf;

  g.at(static_cast<std::size_t>(cy), static_cast<std::size_t>(cx)) = 1.0F;
  const long guard = 4 * (rows + cols) + 4;
  for (long it = 0; it < guard && (cx != ex || cy != ey); ++it) {
    if (t_max_x < t_max_y) {
      if (t_max_x > 1.0) break;
      cx += sx;
      t_max_x += t_dx;
    } else {
      if (t_max_y > 1.0) break;
      cy += sy;
      t_max_y += t_dy;
    }
    if (cx < 0 || cx >= cols || cy < 0 || cy >= rows) break;
    g.at(static_cast<std::size_t>(cy), static_cast<std::size_t>(cx)) = 1.0F;
  }
  g.at(static_cast<std::size_t>(ey), static_cast<std::size_t>(ex)) = 1.0F;
}

}  // namespace detail

/// Binary occupancy of a crack: the notch segment from the plate edge to
/// points[0], then each advance. Pass a prefix of a path's points to get the
/// frame at an intermediate step.
inline VoxelGrid rasterize(std::span<const Point2> points, const PlateSpec& plate, Resolution res) {
  if (points.empty()) throw DomainError("rasterize: empty path");
  VoxelGrid g = empty_grid(plate, res);
  constexpr double slack = 1e-12;
  for (const Point2& p : points) {
    if (!(p.x >= -slack && p.x <= plate.width + slack && p.y >= -slack && p.y <= plate.height + slack))
      throw DomainError("rasterize: path point outside the plate");
  }
  detail::mark_segment(g, plate.notch_mouth(), points.front());
  for (std::size_t i = 1; i < points.size(); ++i) detail::mark_segment(g, points[i - 1], points[i]);
  return g;
}

/// Recovers a crack polyline from a grid: one point per occupied column, at
/// the centroid of that column's cells at or above `threshold`, scanning
/// from the notched edge and stopping at the first empty column after
/// `from_col`. Columns before `from_col` are skipped.
inline std::vector<Point2> extract_path(const VoxelGrid& g, float threshold = 0.5F, std::size_t from_col = 0) {
  std::vector<Point2> pts;
  const std::size_t rows = g.resolution.rows;
  for (std::size_t c = from_col; c < g.resolution.cols; ++c) {
    double weight = 0.0, moment = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (g.at(r, c) >= threshold) {
        weight += 1.0;
        moment += static_cast<double>(r) + 0.5;
      }
    }
    if (weight == 0.0) break;
    pts.push_back({(static_cast<double>(c) + 0.5) * g.cell_dx, moment / weight * g.cell_dy});
  }
  return pts;
}

}  // namespace fcg
