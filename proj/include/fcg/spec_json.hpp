#pragma once

// JSON encoding of the physical specs. Readers take the dotted path of the
// object they parse so that every validation failure names its field.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <type_traits>

#include "fcg/errors.hpp"
#include "fcg/fracture.hpp"
#include "fcg/library.hpp"
#include "fcg/load_schedule.hpp"
#include "fcg/voxel.hpp"

namespace fcg {

using json = nlohmann::json;

namespace detail {

inline std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Reads `obj[key]` into `out` if present. Missing keys keep the default.
template <class T>
void read_field(const json& obj, const std::string& prefix, const std::string& key, T& out) {
  const std::string path = join_path(prefix, key);
  if (!obj.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(path, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_integer() && !it->is_number_unsigned() && it->template get<long long>() < 0)
          throw ConfigError(path, "must be non-negative");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(path, "expected a number");
    }
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace detail

inline json to_json(const PlateSpec& p) {
  return {{"width", p.width},
          {"height", p.height},
          {"notch_length", p.notch_length},
          {"notch_position", p.notch_position},
          {"advance_step", p.advance_step},
          {"max_crack_fraction", p.max_crack_fraction}};
}

inline json to_json(const MaterialSpec& m) {
  return {{"young_modulus", m.young_modulus},
          {"poisson_ratio", m.poisson_ratio},
          {"paris_c", m.paris_c},
          {"paris_m", m.paris_m}};
}

inline json to_json(const NoiseSpec& n) {
  return {{"tension_mean", n.tension_mean},
          {"tension_std", n.tension_std},
          {"shear_mean", n.shear_mean},
          {"shear_std", n.shear_std},
          {"rare_rel_prob", n.rare_rel_prob}};
}

inline json to_json(const Resolution& r) { return {{"rows", r.rows}, {"cols", r.cols}}; }

inline PlateSpec read_plate(const json& j, const std::string& at) {
  using detail::join_path;
  PlateSpec p;
  detail::read_field(j, at, "width", p.width);
  detail::read_field(j, at, "height", p.height);
  detail::read_field(j, at, "notch_length", p.notch_length);
  detail::read_field(j, at, "notch_position", p.notch_position);
  detail::read_field(j, at, "advance_step", p.advance_step);
  detail::read_field(j, at, "max_crack_fraction", p.max_crack_fraction);
  if (!(p.width > 0.0)) throw ConfigError(join_path(at, "width"), "must be positive");
  if (!(p.height > 0.0)) throw ConfigError(join_path(at, "height"), "must be positive");
  if (!(p.notch_length > 0.0 && p.notch_length < p.width))
    throw ConfigError(join_path(at, "notch_length"), "must lie in (0, width)");
  if (!(p.notch_position > 0.0 && p.notch_position < 1.0))
    throw ConfigError(join_path(at, "notch_position"), "must lie in (0, 1)");
  if (!(p.advance_step > 0.0 && p.advance_step <= p.notch_length))
    throw ConfigError(join_path(at, "advance_step"), "must lie in (0, notch_length]");
  if (!(p.max_crack_fraction > 0.0 && p.max_crack_fraction <= 0.6))
    throw ConfigError(join_path(at, "max_crack_fraction"), "must lie in (0, 0.6]");
  if (!(p.notch_length < p.max_crack_fraction * p.width))
    throw ConfigError(join_path(at, "notch_length"), "must be shorter than max_crack_fraction * width");
  return p;
}

inline MaterialSpec read_material(const json& j, const std::string& at) {
  using detail::join_path;
  MaterialSpec m;
  detail::read_field(j, at, "young_modulus", m.young_modulus);
  detail::read_field(j, at, "poisson_ratio", m.poisson_ratio);
  detail::read_field(j, at, "paris_c", m.paris_c);
  detail::read_field(j, at, "paris_m", m.paris_m);
  if (!(m.young_modulus > 0.0)) throw ConfigError(join_path(at, "young_modulus"), "must be positive");
  if (!(m.poisson_ratio > 0.0 && m.poisson_ratio < 0.5))
    throw ConfigError(join_path(at, "poisson_ratio"), "must lie in (0, 0.5)");
  if (!(m.paris_c > 0.0)) throw ConfigError(join_path(at, "paris_c"), "must be positive");
  if (!(m.paris_m >= 0.0)) throw ConfigError(join_path(at, "paris_m"), "must be non-negative");
  return m;
}

inline NoiseSpec read_noise(const json& j, const std::string& at) {
  using detail::join_path;
  NoiseSpec n;
  detail::read_field(j, at, "tension_mean", n.tension_mean);
  detail::read_field(j, at, "tension_std", n.tension_std);
  detail::read_field(j, at, "shear_mean", n.shear_mean);
  detail::read_field(j, at, "shear_std", n.shear_std);
  detail::read_field(j, at, "rare_rel_prob", n.rare_rel_prob);
  if (!(n.tension_std >= 0.0)) throw ConfigError(join_path(at, "tension_std"), "must be non-negative");
  if (!(n.shear_std >= 0.0)) throw ConfigError(join_path(at, "shear_std"), "must be non-negative");
  if (!(n.rare_rel_prob > 0.0 && n.rare_rel_prob < 1.0))
    throw ConfigError(join_path(at, "rare_rel_prob"), "must lie in (0, 1)");
  return n;
}

inline Resolution read_resolution(const json& j, const std::string& at) {
  Resolution r;
  detail::read_field(j, at, "rows", r.rows);
  detail::read_field(j, at, "cols", r.cols);
  if (r.rows < 8) throw ConfigError(detail::join_path(at, "rows"), "must be at least 8");
  if (r.cols < 8) throw ConfigError(detail::join_path(at, "cols"), "must be at least 8");
  return r;
}

}  // namespace fcg
