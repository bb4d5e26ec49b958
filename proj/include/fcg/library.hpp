#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/fracture.hpp"
#include "fcg/load_schedule.hpp"
#include "fcg/voxel.hpp"

namespace fcg {

/// Everything needed to regenerate a library besides the sample count and seed.
struct LibrarySpecs {
  PlateSpec plate;
  MaterialSpec material;
  NoiseSpec noise;
  std::size_t n_slices = 5;
  Resolution resolution;
  double test_fraction = 0.20;

  friend bool operator==(const LibrarySpecs& a, const LibrarySpecs& b) {
    auto same_plate = [](const PlateSpec& p, const PlateSpec& q) {
      return p.width == q.width && p.height == q.height && p.notch_length == q.notch_length &&
             p.notch_position == q.notch_position && p.advance_step == q.advance_step &&
             p.max_crack_fraction == q.max_crack_fraction;
    };
    return same_plate(a.plate, b.plate) && a.material.young_modulus == b.material.young_modulus &&
           a.material.poisson_ratio == b.material.poisson_ratio && a.material.paris_c == b.material.paris_c &&
           a.material.paris_m == b.material.paris_m && a.noise.tension_mean == b.noise.tension_mean &&
           a.noise.tension_std == b.noise.tension_std && a.noise.shear_mean == b.noise.shear_mean &&
           a.noise.shear_std == b.noise.shear_std && a.noise.rare_rel_prob == b.noise.rare_rel_prob &&
           a.n_slices == b.n_slices && a.resolution == b.resolution && a.test_fraction == b.test_fraction;
  }
};

/// One simulated crack: frame t is the crack after t advances and
/// remaining_life[t] is the number of cycles still left at that point.
struct LibrarySample {
  std::string sample_id;
  std::uint64_t seed = 0;
  LoadSchedule schedule;
  CrackPath path;
  std::vector<VoxelGrid> frames;
  std::vector<double> remaining_life;
  bool rare = false;

  [[nodiscard]] std::size_t n_frames() const { return frames.size(); }
  friend bool operator==(const LibrarySample&, const LibrarySample&) = default;
};

struct Library {
  LibrarySpecs specs;
  std::uint64_t seed = 0;
  std::string config_hash;  // provenance tag carried into the manifest
  std::vector<LibrarySample> samples;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;

  [[nodiscard]] const LibrarySample& sample(const std::string& id) const {
    for (const auto& s : samples)
      if (s.sample_id == id) return s;
    throw DomainError("library has no sample '" + id + "'");
  }
  [[nodiscard]] std::vector<const LibrarySample*> subset(const std::vector<std::string>& ids) const {
    std::vector<const LibrarySample*> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(&sample(id));
    return out;
  }
  [[nodiscard]] std::vector<const LibrarySample*> train() const { return subset(train_ids); }
  [[nodiscard]] std::vector<const LibrarySample*> test() const { return subset(test_ids); }
  [[nodiscard]] double rare_fraction() const {
    if (samples.empty()) return 0.0;
    const auto n = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.rare; });
    return static_cast<double>(n) / static_cast<double>(samples.size());
  }

  friend bool operator==(const Library&, const Library&) = default;
};

/// remaining[t] = total_life - (cycles spent in the first t steps); zero at the last point.
inline std::vector<double> remaining_life_series(const CrackPath& path) {
  std::vector<double> out(path.points.size());
  double elapsed = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = path.total_life - elapsed;
    if (t < path.step_cycles.size()) elapsed += path.step_cycles[t];
  }
  if (!out.empty()) out.back() = 0.0;
  return out;
}

inline std::string format_sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%05zu", index);
  return buf;
}

/// Simulates and rasterizes one sample from its own seed.
inline LibrarySample make_sample(const LibrarySpecs& specs, std::string id, std::uint64_t seed) {
  LibrarySample s;
  s.sample_id = std::move(id);
  s.seed = seed;
  s.schedule = build_schedule(specs.noise, specs.n_slices, specs.plate.width, seed);
  s.path = simulate_fcg(specs.plate, specs.material, s.schedule);
  if (s.path.n_steps() == 0) throw NonPropagatingError("make_sample: crack made no advance");
  s.frames.reserve(s.path.points.size());
  for (std::size_t t = 0; t < s.path.points.size(); ++t)
    s.frames.push_back(rasterize(std::span(s.path.points).first(t + 1), specs.plate, specs.resolution));
  s.remaining_life = remaining_life_series(s.path);
  s.rare = s.schedule.any_rare();
  return s;
}

/// Generates `n_samples` independent samples and an 80/20 train/test split.
/// A sample whose simulation fails is redrawn with the next seed; more than
/// 10% failures abort.
inline Library generate_library(std::size_t n_samples, const LibrarySpecs& specs, std::uint64_t seed) {
  if (n_samples < 5) throw DomainError("generate_library: need at least 5 samples");
  specs.plate.validate();
  specs.material.validate();
  specs.noise.validate();
  if (!(specs.test_fraction > 0.0 && specs.test_fraction < 1.0))
    throw DomainError("generate_library: test_fraction must lie in (0, 1)");

  Library lib;
  lib.specs = specs;
  lib.seed = seed;
  lib.samples.reserve(n_samples);

  std::mt19937_64 seeder(seed);
  std::size_t failures = 0;
  const std::size_t max_failures = n_samples / 10;
  while (lib.samples.size() < n_samples) {
    const std::uint64_t sample_seed = seeder();
    try {
      lib.samples.push_back(make_sample(specs, format_sample_id(lib.samples.size()), sample_seed));
    } catch (const NonPropagatingError&) {
      if (++failures > max_failures)
        throw NonPropagatingError("generate_library: more than 10% of simulations failed");
    } catch (const UndefinedDirectionError&) {
      if (++failures > max_failures)
        throw NonPropagatingError("generate_library: more than 10% of simulations failed");
    }
  }

  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffler(seeder());
  std::shuffle(order.begin(), order.end(), shuffler);
  const auto n_test = static_cast<std::size_t>(std::floor(specs.test_fraction * static_cast<double>(n_samples) + 1e-9));
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  for (auto i : train) lib.train_ids.push_back(lib.samples[i].sample_id);
  for (auto i : test) lib.test_ids.push_back(lib.samples[i].sample_id);
  return lib;
}

}  // namespace fcg
