#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "fcg/errors.hpp"

namespace fcg {

/// Gaussian load noise. Amplitudes in MPa.
struct NoiseSpec {
  double tension_mean = 100.0;
  double tension_std = 10.0;
  double shear_mean = 0.0;
  double shear_std = 10.0;
  /// Draws whose density relative to the peak falls below this value are rare.
  double rare_rel_prob = 0.05;

  void validate() const {
    if (!(tension_std >= 0.0) || !(shear_std >= 0.0))
      throw DomainError("NoiseSpec: standard deviations must be non-negative");
    if (!(rare_rel_prob > 0.0 && rare_rel_prob < 1.0))
      throw DomainError("NoiseSpec: rare_rel_prob must lie in (0, 1)");
    if (!std::isfinite(tension_mean) || !std::isfinite(shear_mean))
      throw DomainError("NoiseSpec: means must be finite");
  }
};

/// Tension and shear amplitude acting on one slice, MPa.
struct SliceLoad {
  double tension = 0.0;
  double shear = 0.0;
  friend bool operator==(const SliceLoad&, const SliceLoad&) = default;
};

/// Piecewise-constant loading along the width axis. Slice i spans
/// [slice_bounds[i], slice_bounds[i+1]).
struct LoadSchedule {
  std::vector<double> slice_bounds;  // n_slices + 1 positions, metres
  std::vector<double> tensions;
  std::vector<double> shears;
  std::vector<bool> rare_flags;

  [[nodiscard]] std::size_t n_slices() const { return tensions.size(); }
  [[nodiscard]] double width() const { return slice_bounds.empty() ? 0.0 : slice_bounds.back(); }
  /// A schedule is rare if any of its slices drew a tail value.
  [[nodiscard]] bool any_rare() const {
    return std::find(rare_flags.begin(), rare_flags.end(), true) != rare_flags.end();
  }

  friend bool operator==(const LoadSchedule&, const LoadSchedule&) = default;
};

/// |z| threshold beyond which exp(-z^2/2) drops below `rel_prob`.
inline double rare_z_threshold(double rel_prob) {
  if (!(rel_prob > 0.0 && rel_prob < 1.0)) throw DomainError("rare_z_threshold: rel_prob must lie in (0, 1)");
  return std::sqrt(-2.0 * std::log(rel_prob));
}

/// Equal-width slices with independent Gaussian tension/shear per slice.
/// Draw order per slice is tension then shear, so a seed fixes the schedule.
inline LoadSchedule build_schedule(const NoiseSpec& noise, std::size_t n_slices, double width,
                                   std::uint64_t rng_seed) {
  noise.validate();
  if (n_slices == 0) throw DomainError("build_schedule: n_slices must be at least 1");
  if (!(width > 0.0)) throw DomainError("build_schedule: width must be positive");

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  const double z_rare = rare_z_threshold(noise.rare_rel_prob);

  LoadSchedule s;
  s.slice_bounds.resize(n_slices + 1);
  for (std::size_t i = 0; i <= n_slices; ++i)
    s.slice_bounds[i] = width * static_cast<double>(i) / static_cast<double>(n_slices);
  s.slice_bounds.back() = width;

  s.tensions.reserve(n_slices);
  s.shears.reserve(n_slices);
  s.rare_flags.reserve(n_slices);
  for (std::size_t i = 0; i < n_slices; ++i) {
    const double zt = standard(rng);
    const double zs = standard(rng);
    s.tensions.push_back(noise.tension_mean + noise.tension_std * zt);
    s.shears.push_back(noise.shear_mean + noise.shear_std * zs);
    const bool tail_t = noise.tension_std > 0.0 && std::abs(zt) > z_rare;
    const bool tail_s = noise.shear_std > 0.0 && std::abs(zs) > z_rare;
    s.rare_flags.push_back(tail_t || tail_s);
  }
  return s;
}

/// Index of the slice containing x. A boundary belongs to the slice on its
/// right, except x == width which belongs to the last slice.
inline std::size_t slice_index(const LoadSchedule& schedule, double x) {
  if (schedule.n_slices() == 0) throw DomainError("slice_index: empty schedule");
  if (!(x >= schedule.slice_bounds.front() && x <= schedule.slice_bounds.back()))
    throw DomainError("loads_at: position outside the plate");
  const auto it = std::upper_bound(schedule.slice_bounds.begin(), schedule.slice_bounds.end(), x);
  const auto idx = static_cast<std::size_t>(it - schedule.slice_bounds.begin()) - 1;
  return std::min(idx, schedule.n_slices() - 1);
}

inline SliceLoad loads_at(const LoadSchedule& schedule, double x) {
  const std::size_t i = slice_index(schedule, x);
  return {schedule.tensions[i], schedule.shears[i]};
}

}  // namespace fcg
