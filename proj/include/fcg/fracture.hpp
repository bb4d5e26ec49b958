#pragma once

// Analytical LEFM fatigue-crack-growth kernel for a single-edge-notched plate:
// mixed-mode stress intensity factors from far-field tractions, kinking by the
// maximum tangential stress rule, and Paris-Erdogan life per fixed advance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/geometry.hpp"
#include "fcg/load_schedule.hpp"

namespace fcg {

/// Linear elastic material with Paris-Erdogan coefficients. `paris_c` is in
/// (m/cycle)/(MPa*sqrt(m))^m.
struct MaterialSpec {
  double young_modulus = 200e9;  // Pa
  double poisson_ratio = 0.31;
  double paris_c = 9.7e-12;
  double paris_m = 3.0;

  void validate() const {
    if (!(young_modulus > 0.0)) throw DomainError("MaterialSpec: young_modulus must be positive");
    if (!(poisson_ratio > 0.0 && poisson_ratio < 0.5))
      throw DomainError("MaterialSpec: poisson_ratio must lie in (0, 0.5)");
    if (!(paris_c > 0.0)) throw DomainError("MaterialSpec: paris_c must be positive");
    if (!(paris_m >= 0.0)) throw DomainError("MaterialSpec: paris_m must be non-negative");
  }
};

/// Rectangular plate with an edge notch on the x = 0 side, all lengths in metres.
struct PlateSpec {
  double width = 0.010;
  double height = 0.010;
  double notch_length = 0.001;
  double notch_position = 0.5;  // fraction of the height
  double advance_step = 0.0003;
  double max_crack_fraction = 0.6;

  void validate() const {
    if (!(width > 0.0) || !(height > 0.0)) throw DomainError("PlateSpec: width and height must be positive");
    if (!(notch_length > 0.0 && notch_length < width))
      throw DomainError("PlateSpec: notch_length must lie in (0, width)");
    if (!(notch_position > 0.0 && notch_position < 1.0))
      throw DomainError("PlateSpec: notch_position must lie in (0, 1)");
    if (!(advance_step > 0.0 && advance_step <= notch_length))
      throw DomainError("PlateSpec: advance_step must lie in (0, notch_length]");
    if (!(max_crack_fraction > 0.0 && max_crack_fraction <= 0.6))
      throw DomainError("PlateSpec: max_crack_fraction must lie in (0, 0.6]");
    if (!(notch_length < max_crack_fraction * width))
      throw DomainError("PlateSpec: notch already exceeds the crack-length limit");
  }

  /// Where the notch meets the plate edge.
  [[nodiscard]] Point2 notch_mouth() const { return {0.0, notch_position * height}; }
  [[nodiscard]] bool contains(Point2 p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
};

struct TipState {
  Point2 position;
  double tangent_angle = 0.0;  // radians from the width axis
  double arc_length = 0.0;     // crack length a, notch included
};

/// Mode-I and mode-II stress intensity factors, MPa*sqrt(m).
struct SifPair {
  double k1 = 0.0;
  double k2 = 0.0;
};

/// Tip positions after each advance. points[0] is the notch tip.
struct CrackPath {
  std::vector<Point2> points;
  std::vector<double> step_cycles;
  double total_life = 0.0;

  [[nodiscard]] std::size_t n_steps() const { return step_cycles.size(); }
  friend bool operator==(const CrackPath&, const CrackPath&) = default;
};

/// Single-edge-notch finite-width correction F(a/W), valid for a/W <= 0.6.
inline double finite_width_factor(double a_over_w) {
  if (!(a_over_w >= 0.0 && a_over_w <= 0.6))
    throw DomainError("finite_width_factor: a/W outside [0, 0.6], crack too long for the correction");
  const double x = a_over_w;
  return 1.12 + x * (-0.231 + x * (10.55 + x * (-21.72 + x * 30.39)));
}

/// SIFs at the tip under remote stress sigma_yy = tension, sigma_xy = shear
/// (MPa), resolved onto the crack plane at the tip's tangent angle.
/// Compressive normal traction closes the crack: K_I clamps to 0.
inline SifPair resolve_sifs(const SliceLoad& load, const TipState& tip, const PlateSpec& plate) {
  constexpr double slack = 1e-12;
  const Point2 p = tip.position;
  if (!(p.x >= -slack && p.x <= plate.width + slack && p.y >= -slack && p.y <= plate.height + slack))
    throw DomainError("resolve_sifs: tip outside the plate");
  if (!(tip.arc_length > 0.0)) throw DomainError("resolve_sifs: crack length must be positive");
  const double f = finite_width_factor(tip.arc_length / plate.width);

  const double phi = tip.tangent_angle;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double normal = load.tension * c * c - 2.0 * load.shear * s * c;
  const double in_plane = load.shear * std::cos(2.0 * phi) + 0.5 * load.tension * std::sin(2.0 * phi);
  const double scale = std::sqrt(std::numbers::pi * tip.arc_length) * f;
  return {std::max(normal, 0.0) * scale, in_plane * scale};
}

/// Kink angle by the maximum tangential stress criterion. The kink turns
/// against the sign of K_II.
inline double deflection_angle(const SifPair& sifs) {
  const double k1 = sifs.k1;
  const double k2 = sifs.k2;
  if (k1 == 0.0 && k2 == 0.0) throw UndefinedDirectionError("deflection_angle: K_I = K_II = 0");
  if (k2 == 0.0) return 0.0;
  // 0-homogeneous in (K_I, K_II); normalise to keep the quartic well scaled.
  const double scale = std::max(std::abs(k1), std::abs(k2));
  const double a = k1 / scale;
  const double b = k2 / scale;
  const double num = 3.0 * b * b + std::sqrt(a * a * a * a + 8.0 * a * a * b * b);
  const double den = a * a + 9.0 * b * b;
  const double magnitude = std::acos(std::clamp(num / den, -1.0, 1.0));
  return k2 > 0.0 ? -magnitude : magnitude;
}

/// Cycles to advance the crack by `advance_step` at a constant driving
/// force, inverting da/dN = C * dK^m.
inline double paris_increment(double delta_k_eq, const MaterialSpec& material, double advance_step) {
  if (!(delta_k_eq > 0.0))
    throw NonPropagatingError("paris_increment: non-positive driving force, the crack does not grow");
  return advance_step / (material.paris_c * std::pow(delta_k_eq, material.paris_m));
}

/// Grows the edge crack step by step until its length reaches
/// max_crack_fraction * width or the next tip would leave the plate. Loads are
/// read from the slice containing the tip at the start of each step and the
/// step's cycles use the SIFs at that point (forward Euler).
inline CrackPath simulate_fcg(const PlateSpec& plate, const MaterialSpec& material,
                              const LoadSchedule& schedule) {
  plate.validate();
  material.validate();
  if (schedule.n_slices() == 0) throw DomainError("simulate_fcg: empty load schedule");
  if (std::abs(schedule.width() - plate.width) > 1e-12 * plate.width || schedule.slice_bounds.front() != 0.0)
    throw DomainError("simulate_fcg: schedule does not span the plate width");

  const Point2 mouth = plate.notch_mouth();
  TipState tip{{mouth.x + plate.notch_length, mouth.y}, 0.0, plate.notch_length};
  const double limit = plate.max_crack_fraction * plate.width;

  CrackPath path;
  path.points.push_back(tip.position);
  for (std::size_t n = 0;; ++n) {
    tip.arc_length = plate.notch_length + static_cast<double>(n) * plate.advance_step;
    if (tip.arc_length >= limit - 1e-12) break;

    const SliceLoad load = loads_at(schedule, tip.position.x);
    const SifPair sifs = resolve_sifs(load, tip, plate);
    const double dk = std::hypot(sifs.k1, sifs.k2);
    if (!(dk > 0.0))
      throw NonPropagatingError("simulate_fcg: zero driving force at step " + std::to_string(n));
    const double cycles = paris_increment(dk, material, plate.advance_step);

    const double heading = tip.tangent_angle + deflection_angle(sifs);
    const Point2 next = tip.position + plate.advance_step * Point2{std::cos(heading), std::sin(heading)};
    if (!plate.contains(next)) break;

    tip.tangent_angle = heading;
    tip.position = next;
    path.points.push_back(next);
    path.step_cycles.push_back(cycles);
    path.total_life += cycles;
  }
  return path;
}

}  // namespace fcg
