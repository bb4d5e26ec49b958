#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fcg/errors.hpp"

namespace fcg {

/// A point in the plate plane, metres. x runs along the width, y along the height.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double polyline_length(std::span<const Point2> pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

/// Resamples a polyline to `n` points equally spaced in arc length. The first
/// and last output points are the polyline's endpoints.
inline std::vector<Point2> resample_by_arc_length(std::span<const Point2> pts, std::size_t n) {
  if (pts.empty()) throw DomainError("resample_by_arc_length: empty polyline");
  if (n == 0) throw DomainError("resample_by_arc_length: n must be positive");
  std::vector<Point2> out;
  out.reserve(n);
  const double total = polyline_length(pts);
  if (n == 1 || total == 0.0) {
    out.assign(n, pts.front());
    if (n > 1) out.back() = pts.back();
    return out;
  }
  std::size_t seg = 1;
  double seg_start = 0.0;  // arc length at pts[seg - 1]
  for (std::size_t i = 0; i < n; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(n - 1);
    while (seg < pts.size() - 1 && seg_start + distance(pts[seg - 1], pts[seg]) < s) {
      seg_start += distance(pts[seg - 1], pts[seg]);
      ++seg;
    }
    const double len = distance(pts[seg - 1], pts[seg]);
    const double t = len > 0.0 ? std::clamp((s - seg_start) / len, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg - 1] + t * (pts[seg] - pts[seg - 1]));
  }
  out.back() = pts.back();
  return out;
}

}  // namespace fcg
