#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/geometry.hpp"
#include "fcg/library.hpp"
#include "fcg/metrics.hpp"
#include "fcg/model/training.hpp"
#include "fcg/voxel.hpp"

namespace fcg {

struct Observation {
  VoxelGrid frame;
  std::size_t step_index = 0;
};

struct Prediction {
  model::Matrix predicted_latents;        // horizon x latent_dim
  std::vector<VoxelGrid> predicted_frames;  // raw decoder output
  std::vector<Point2> path;               // mouth, then one point per column
  double remaining_life = 0.0;
  std::size_t issued_at = 0;
};

/// Observed frames are column-traced up to the observed tip; the last decoded
/// frame, binarised at 0.5, supplies the columns beyond it.
inline std::vector<Point2> predicted_path(const VoxelGrid& observed, const std::vector<VoxelGrid>& decoded,
                                          const PlateSpec& plate) {
  std::vector<Point2> path{plate.notch_mouth()};
  const auto seen = extract_path(observed);
  path.insert(path.end(), seen.begin(), seen.end());
  if (!decoded.empty()) {
    const auto ahead = extract_path(decoded.back(), 0.5F, seen.size());
    path.insert(path.end(), ahead.begin(), ahead.end());
  }
  return path;
}

/// Predicts the rest of a crack from its first frames (frames[0..t]).
inline Prediction predict_from_frames(const model::ModelBundle& models, const std::vector<VoxelGrid>& frames,
                                      std::size_t horizon, const PlateSpec& plate) {
  if (frames.empty()) throw DomainError("predict: no observed frames");
  const auto dim = models.vae.input_dim();
  model::Matrix x(static_cast<Eigen::Index>(frames.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].values.size() != dim) throw ShapeError("predict: frame resolution does not match the models");
    x.row(static_cast<Eigen::Index>(t)) =
        Eigen::Map<const Eigen::Matrix<float, 1, Eigen::Dynamic>>(frames[t].values.data(), static_cast<Eigen::Index>(dim));
  }
  const model::Matrix z = models.vae.encode(x);

  Prediction p;
  p.issued_at = frames.size() - 1;
  p.predicted_latents = horizon > 0 ? models.seq.forecast(z, horizon) : model::Matrix(0, z.cols());
  const VoxelGrid& last = frames.back();
  if (p.predicted_latents.rows() > 0) {
    const model::Matrix decoded = models.vae.decode(p.predicted_latents);
    const double limit = plate.max_crack_fraction * plate.width;
    for (Eigen::Index r = 0; r < decoded.rows(); ++r) {
      VoxelGrid g(last.resolution, last.cell_dx, last.cell_dy);
      std::copy(decoded.row(r).data(), decoded.row(r).data() + decoded.cols(), g.values.begin());
      p.predicted_frames.push_back(std::move(g));
      std::vector<Point2> traced{plate.notch_mouth()};
      const auto cols = extract_path(p.predicted_frames.back());
      traced.insert(traced.end(), cols.begin(), cols.end());
      if (polyline_length(traced) >= limit) break;
    }
    p.predicted_latents.conservativeResize(static_cast<Eigen::Index>(p.predicted_frames.size()), Eigen::NoChange);
  }
  p.path = predicted_path(last, p.predicted_frames, plate);
  const auto life = models.life.predict(z.bottomRows(1));
  p.remaining_life = std::max(0.0, life.front());
  return p;
}

/// Append-only log of observations and the predictions they triggered.
struct TwinSession {
  const model::ModelBundle* models = nullptr;
  PlateSpec plate;
  Resolution resolution;
  std::vector<Observation> observations;
  std::vector<Prediction> predictions;

  [[nodiscard]] const Prediction* current() const { return predictions.empty() ? nullptr : &predictions.back(); }
};

/// Adds an observation and issues a fresh prediction, which supersedes the
/// previous one. Observations must arrive one step at a time from step 0.
inline const Prediction& twin_update(TwinSession& session, Observation obs, std::size_t horizon) {
  if (session.models == nullptr) throw DomainError("twin_update: session has no models");
  if (obs.frame.resolution != session.resolution) throw ShapeError("twin_update: observation resolution mismatch");
  const std::size_t expected = session.observations.empty() ? 0 : session.observations.back().step_index + 1;
  if (obs.step_index != expected)
    throw DomainError("twin_update: expected step " + std::to_string(expected) + ", got " + std::to_string(obs.step_index));
  session.observations.push_back(std::move(obs));
  std::vector<VoxelGrid> frames;
  frames.reserve(session.observations.size());
  for (const auto& o : session.observations) frames.push_back(o.frame);
  session.predictions.push_back(predict_from_frames(*session.models, frames, horizon, session.plate));
  return session.predictions.back();
}

struct ReplayRow {
  std::string sample_id;
  double t_obs_fraction = 0.0;
  std::size_t step_index = 0;
  double rmse = 0.0;  // m
  double ssim = 0.0;
  double life_truth = 0.0;
  double life_pred = 0.0;
  double accuracy = 0.0;
  bool rare = false;
};

/// Step observed at fraction `f` of a sample's frames.
inline std::size_t observed_step(double f, std::size_t n_frames) {
  if (n_frames == 0) throw DomainError("observed_step: empty sample");
  const auto t = static_cast<std::size_t>(std::llround(f * static_cast<double>(n_frames - 1)));
  return std::clamp<std::size_t>(t, 0, n_frames - 1);
}

/// Observed crack frame composited with the last decoded frame.
inline VoxelGrid composite_frame(const VoxelGrid& observed, const Prediction& p) {
  VoxelGrid g = observed;
  if (!p.predicted_frames.empty()) {
    const auto& d = p.predicted_frames.back().values;
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = std::max(g.values[i], d[i]);
  }
  return g;
}

struct SampleEvaluation {
  std::vector<ReplayRow> rows;
  std::vector<Prediction> predictions;
};

/// Evaluates one sample at each observation fraction.
inline SampleEvaluation evaluate_sample(const model::ModelBundle& models, const LibrarySample& s,
                                        const LibrarySpecs& specs, const std::vector<double>& t_obs,
                                        std::size_t n_resample) {
  SampleEvaluation out;
  std::vector<Point2> truth{specs.plate.notch_mouth()};
  truth.insert(truth.end(), s.path.points.begin(), s.path.points.end());
  const double truth_len = polyline_length(truth);
  std::vector<double> life_truth, life_pred;
  for (double f : t_obs) {
    const std::size_t t = observed_step(f, s.frames.size());
    const std::size_t horizon = models.max_frames > t + 1 ? models.max_frames - 1 - t : 0;
    std::vector<VoxelGrid> frames(s.frames.begin(), s.frames.begin() + static_cast<std::ptrdiff_t>(t + 1));
    Prediction p = predict_from_frames(models, frames, horizon, specs.plate);

    const double observed_len = specs.plate.notch_length + static_cast<double>(t) * specs.plate.advance_step;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_resample; ++i)
      if (truth_len * static_cast<double>(i) / static_cast<double>(n_resample - 1) <= observed_len + 1e-12) ++k;
    k = std::clamp<std::size_t>(k, 1, n_resample);

    ReplayRow row;
    row.sample_id = s.sample_id;
    row.t_obs_fraction = f;
    row.step_index = t;
    row.rmse = path_rmse(p.path, truth, k, n_resample);
    row.ssim = ssim(composite_frame(s.frames[t], p), s.frames.back());
    row.life_truth = s.remaining_life[t];
    row.life_pred = p.remaining_life;
    row.rare = s.rare;
    life_truth.push_back(row.life_truth);
    life_pred.push_back(row.life_pred);
    out.rows.push_back(row);
    out.predictions.push_back(std::move(p));
  }
  const auto acc = life_accuracy(life_truth, life_pred);
  for (std::size_t i = 0; i < acc.size(); ++i) out.rows[i].accuracy = acc[i];
  return out;
}

/// Replays every test sample at every observation fraction.
inline std::vector<ReplayRow> run_replay(const model::ModelBundle& models, const Library& lib,
                                         const std::vector<double>& t_obs, std::size_t n_resample = 100) {
  const auto test = lib.test();
  if (test.empty()) throw DomainError("run_replay: empty test split");
  std::vector<ReplayRow> rows;
  for (const auto* s : test) {
    auto e = evaluate_sample(models, *s, lib.specs, t_obs, n_resample);
    rows.insert(rows.end(), e.rows.begin(), e.rows.end());
  }
  return rows;
}

}  // namespace fcg
