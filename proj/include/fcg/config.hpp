#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "fcg/binary_io.hpp"
#include "fcg/errors.hpp"
#include "fcg/library.hpp"
#include "fcg/model/training.hpp"
#include "fcg/spec_json.hpp"

namespace fcg {

struct LibraryConfig {
  std::size_t n_samples = 250;
  Resolution resolution;
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
};

struct EvaluationConfig {
  std::vector<double> t_obs{0.1, 0.25, 0.5, 0.75, 0.9};
  std::size_t n_resample = 100;
};

/// Everything a run depends on. One seed drives all randomness.
struct ToolkitConfig {
  PlateSpec plate;
  MaterialSpec material;
  NoiseSpec noise;
  std::size_t n_slices = 5;
  LibraryConfig library;
  model::TrainingConfig training;
  EvaluationConfig evaluation;

  [[nodiscard]] LibrarySpecs library_specs() const {
    LibrarySpecs s;
    s.plate = plate;
    s.material = material;
    s.noise = noise;
    s.n_slices = n_slices;
    s.resolution = library.resolution;
    s.test_fraction = library.test_fraction;
    return s;
  }
};

inline json to_json(const model::TrainingConfig& t) {
  return {{"latent_dim", t.latent_dim},
          {"vae_hidden", t.vae_hidden},
          {"vae_epochs", t.vae_epochs},
          {"vae_batch", t.vae_batch},
          {"seq_hidden", t.seq_hidden},
          {"seq_epochs", t.seq_epochs},
          {"seq_batch", t.seq_batch},
          {"life_hidden", t.life_hidden},
          {"life_epochs", t.life_epochs},
          {"life_batch", t.life_batch},
          {"lambda", t.lambda},
          {"dbscan_eps", t.dbscan_eps},
          {"dbscan_min_pts", t.dbscan_min_pts},
          {"rare_cluster_fraction", t.rare_cluster_fraction},
          {"learning_rate", t.adam.learning_rate},
          {"beta1", t.adam.beta1},
          {"beta2", t.adam.beta2},
          {"epsilon", t.adam.epsilon}};
}

inline json to_json(const ToolkitConfig& c) {
  return {{"plate", to_json(c.plate)},
          {"material", to_json(c.material)},
          {"noise", to_json(c.noise)},
          {"slicing", {{"n_slices", c.n_slices}}},
          {"library",
           {{"n_samples", c.library.n_samples},
            {"resolution", to_json(c.library.resolution)},
            {"seed", c.library.seed},
            {"test_fraction", c.library.test_fraction}}},
          {"training", to_json(c.training)},
          {"evaluation", {{"t_obs", c.evaluation.t_obs}, {"n_resample", c.evaluation.n_resample}}}};
}

/// CRC-32 of the canonical (key-sorted, compact) JSON form, as 8 hex digits.
inline std::string config_hash(const ToolkitConfig& c) { return io::hex32(io::crc32(to_json(c).dump())); }

namespace detail {

inline void reject_unknown(const json& obj, const std::string& at, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(at.empty() ? "<root>" : at, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(join_path(at, key), "unknown key");
  }
}

inline const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  const auto it = j.find(key);
  return it == j.end() ? empty : *it;
}

}  // namespace detail

inline model::TrainingConfig read_training(const json& j, const std::string& at) {
  detail::reject_unknown(j, at,
                         {"latent_dim", "vae_hidden", "vae_epochs", "vae_batch", "seq_hidden", "seq_epochs",
                          "seq_batch", "life_hidden", "life_epochs", "life_batch", "lambda", "dbscan_eps",
                          "dbscan_min_pts", "rare_cluster_fraction", "learning_rate", "beta1", "beta2", "epsilon"});
  model::TrainingConfig t;
  detail::read_field(j, at, "latent_dim", t.latent_dim);
  detail::read_field(j, at, "vae_hidden", t.vae_hidden);
  detail::read_field(j, at, "vae_epochs", t.vae_epochs);
  detail::read_field(j, at, "vae_batch", t.vae_batch);
  detail::read_field(j, at, "seq_hidden", t.seq_hidden);
  detail::read_field(j, at, "seq_epochs", t.seq_epochs);
  detail::read_field(j, at, "seq_batch", t.seq_batch);
  detail::read_field(j, at, "life_hidden", t.life_hidden);
  detail::read_field(j, at, "life_epochs", t.life_epochs);
  detail::read_field(j, at, "life_batch", t.life_batch);
  detail::read_field(j, at, "lambda", t.lambda);
  detail::read_field(j, at, "dbscan_eps", t.dbscan_eps);
  detail::read_field(j, at, "dbscan_min_pts", t.dbscan_min_pts);
  detail::read_field(j, at, "rare_cluster_fraction", t.rare_cluster_fraction);
  detail::read_field(j, at, "learning_rate", t.adam.learning_rate);
  detail::read_field(j, at, "beta1", t.adam.beta1);
  detail::read_field(j, at, "beta2", t.adam.beta2);
  detail::read_field(j, at, "epsilon", t.adam.epsilon);
  if (!(t.adam.beta1 >= 0.0 && t.adam.beta1 < 1.0)) throw ConfigError(detail::join_path(at, "beta1"), "must lie in [0, 1)");
  if (!(t.adam.beta2 >= 0.0 && t.adam.beta2 < 1.0)) throw ConfigError(detail::join_path(at, "beta2"), "must lie in [0, 1)");
  if (!(t.adam.epsilon > 0.0)) throw ConfigError(detail::join_path(at, "epsilon"), "must be positive");
  t.validate();  // field paths already read "training.*"
  return t;
}

/// Parses a configuration document. Missing sections and keys take their
/// defaults; unknown keys and invalid values raise ConfigError with the path.
inline ToolkitConfig read_config(const json& j) {
  using detail::section;
  detail::reject_unknown(j, "", {"plate", "material", "noise", "slicing", "library", "training", "evaluation"});
  ToolkitConfig c;
  detail::reject_unknown(section(j, "plate"), "plate",
                         {"width", "height", "notch_length", "notch_position", "advance_step", "max_crack_fraction"});
  c.plate = read_plate(section(j, "plate"), "plate");
  detail::reject_unknown(section(j, "material"), "material", {"young_modulus", "poisson_ratio", "paris_c", "paris_m"});
  c.material = read_material(section(j, "material"), "material");
  detail::reject_unknown(section(j, "noise"), "noise",
                         {"tension_mean", "tension_std", "shear_mean", "shear_std", "rare_rel_prob"});
  c.noise = read_noise(section(j, "noise"), "noise");

  const json& slicing = section(j, "slicing");
  detail::reject_unknown(slicing, "slicing", {"n_slices"});
  detail::read_field(slicing, "slicing", "n_slices", c.n_slices);
  if (c.n_slices < 1) throw ConfigError("slicing.n_slices", "must be at least 1");

  const json& lib = section(j, "library");
  detail::reject_unknown(lib, "library", {"n_samples", "resolution", "seed", "test_fraction"});
  detail::read_field(lib, "library", "n_samples", c.library.n_samples);
  detail::read_field(lib, "library", "seed", c.library.seed);
  detail::read_field(lib, "library", "test_fraction", c.library.test_fraction);
  detail::reject_unknown(section(lib, "resolution"), "library.resolution", {"rows", "cols"});
  c.library.resolution = read_resolution(section(lib, "resolution"), "library.resolution");
  if (c.library.n_samples < 5) throw ConfigError("library.n_samples", "must be at least 5");
  if (!(c.library.test_fraction > 0.0 && c.library.test_fraction < 1.0))
    throw ConfigError("library.test_fraction", "must lie in (0, 1)");

  c.training = read_training(section(j, "training"), "training");

  const json& ev = section(j, "evaluation");
  detail::reject_unknown(ev, "evaluation", {"t_obs", "n_resample"});
  detail::read_field(ev, "evaluation", "t_obs", c.evaluation.t_obs);
  detail::read_field(ev, "evaluation", "n_resample", c.evaluation.n_resample);
  if (c.evaluation.t_obs.empty()) throw ConfigError("evaluation.t_obs", "must not be empty");
  for (double f : c.evaluation.t_obs)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("evaluation.t_obs", "fractions must lie in (0, 1]");
  if (c.evaluation.n_resample < 2) throw ConfigError("evaluation.n_resample", "must be at least 2");
  return c;
}

inline ToolkitConfig load_config(const std::filesystem::path& p) {
  json j;
  try {
    j = json::parse(io::read_text(p));
  } catch (const json::parse_error& e) {
    throw ConfigError(p.string(), std::string("not valid JSON: ") + e.what());
  }
  return read_config(j);
}

}  // namespace fcg
