#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/library.hpp"
#include "fcg/model/dbscan.hpp"
#include "fcg/model/life.hpp"
#include "fcg/model/seq.hpp"
#include "fcg/model/vae.hpp"
#include "fcg/nn/adam.hpp"
#include "fcg/nn/losses.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::model {

/// Scalar type used for trained models.
using Real = float;
using Matrix = nn::Tensor2<Real>;

struct TrainingConfig {
  std::size_t latent_dim = 8;
  std::vector<std::size_t> vae_hidden{256, 64};
  std::size_t vae_epochs = 40;
  std::size_t vae_batch = 128;
  std::size_t seq_hidden = 100;
  std::size_t seq_epochs = 200;
  std::size_t seq_batch = 16;
  std::vector<std::size_t> life_hidden{100, 100};
  std::size_t life_epochs = 100;
  std::size_t life_batch = 64;
  double lambda = 500.0;
  double dbscan_eps = 0.5;
  std::size_t dbscan_min_pts = 5;
  double rare_cluster_fraction = 0.02;
  nn::AdamConfig adam;

  void validate() const {
    if (latent_dim < 2) throw ConfigError("training.latent_dim", "latent_dim must be at least 2");
    if (vae_hidden.empty()) throw ConfigError("training.vae_hidden", "need at least one hidden layer");
    if (life_hidden.empty()) throw ConfigError("training.life_hidden", "need at least one hidden layer");
    for (std::size_t h : vae_hidden)
      if (h == 0) throw ConfigError("training.vae_hidden", "layer widths must be positive");
    for (std::size_t h : life_hidden)
      if (h == 0) throw ConfigError("training.life_hidden", "layer widths must be positive");
    if (seq_hidden == 0) throw ConfigError("training.seq_hidden", "seq_hidden must be positive");
    if (vae_batch == 0) throw ConfigError("training.vae_batch", "batch size must be positive");
    if (seq_batch == 0) throw ConfigError("training.seq_batch", "batch size must be positive");
    if (life_batch == 0) throw ConfigError("training.life_batch", "batch size must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("training.lambda", "lambda must be non-negative");
    if (!(dbscan_eps > 0.0)) throw ConfigError("training.dbscan_eps", "eps must be positive");
    if (dbscan_min_pts == 0) throw ConfigError("training.dbscan_min_pts", "min_pts must be positive");
    if (!(rare_cluster_fraction >= 0.0 && rare_cluster_fraction < 1.0))
      throw ConfigError("training.rare_cluster_fraction", "must lie in [0, 1)");
    if (!(adam.learning_rate > 0.0)) throw ConfigError("training.learning_rate", "must be positive");
  }
};

template <class Model>
struct Trained {
  Model model;
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

/// Every frame of every sample, one flattened grid per row.
inline Matrix frame_matrix(const std::vector<const LibrarySample*>& samples) {
  std::size_t n = 0, dim = 0;
  for (const auto* s : samples) {
    n += s->frames.size();
    if (!s->frames.empty()) dim = s->frames.front().values.size();
  }
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  Eigen::Index r = 0;
  for (const auto* s : samples) {
    for (const auto& f : s->frames) {
      if (f.values.size() != dim) throw ShapeError("frame_matrix: frames differ in size");
      out.row(r++) = Eigen::Map<const Eigen::Matrix<float, 1, Eigen::Dynamic>>(f.values.data(), static_cast<Eigen::Index>(dim));
    }
  }
  return out;
}

inline Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
  Matrix out(static_cast<Eigen::Index>(end - begin), m.cols());
  for (std::size_t i = begin; i < end; ++i) out.row(static_cast<Eigen::Index>(i - begin)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

namespace detail {

inline void check_loss(double loss, const char* who, std::size_t epoch) {
  if (!std::isfinite(loss)) throw DivergenceError(std::string(who) + ": loss diverged at epoch " + std::to_string(epoch));
}

}  // namespace detail

/// Fits the VAE to the rows of `frames` by minibatch Adam on the summed
/// per-sample squared error plus KL.
inline Trained<Vae<Real>> train_vae_frames(const Matrix& frames, const TrainingConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (frames.rows() == 0) throw DomainError("train_vae: no frames");
  std::mt19937_64 rng(seed);
  Trained<Vae<Real>> out{Vae<Real>(static_cast<std::size_t>(frames.cols()), cfg.latent_dim, cfg.vae_hidden, rng), {}};
  out.model.set_output_prior(std::clamp(static_cast<double>(frames.mean()), 1e-3, 1.0 - 1e-3));
  nn::AdamState<Real> adam(cfg.adam);
  const auto params = out.model.parameters();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> order(static_cast<std::size_t>(frames.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.vae_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.vae_batch) {
      const std::size_t e = std::min(order.size(), b + cfg.vae_batch);
      const Matrix x = gather_rows(frames, order, b, e);
      Matrix noise(x.rows(), static_cast<Eigen::Index>(cfg.latent_dim));
      for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = static_cast<Real>(normal(rng));
      out.model.zero_grad();
      const double loss = out.model.accumulate_gradients(x, noise, nn::Reconstruction::sum_per_sample).loss;
      detail::check_loss(loss, "train_vae", epoch);
      nn::adam_step(adam, params);
      total += loss;
      ++batches;
    }
    out.loss_trace.push_back(total / static_cast<double>(batches));
  }
  return out;
}

inline Trained<Vae<Real>> train_vae(const std::vector<const LibrarySample*>& train, const TrainingConfig& cfg,
                                    std::uint64_t seed) {
  if (train.size() < 10) throw DomainError("train_vae: need at least 10 training samples");
  return train_vae_frames(frame_matrix(train), cfg, seed);
}

/// Latent trajectory of one sample: posterior means, one row per frame.
inline Matrix encode_trajectory(const Vae<Real>& vae, const LibrarySample& s) {
  return vae.encode(frame_matrix({&s}));
}

/// Rare labels for training: a sample is rare when its load schedule holds a
/// tail draw or when its final-frame latent falls outside the dense clusters.
inline std::vector<bool> rare_training_mask(const Vae<Real>& vae, const std::vector<const LibrarySample*>& train,
                                            const TrainingConfig& cfg, ClusterLabeling* labeling = nullptr) {
  Matrix finals(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(cfg.latent_dim));
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& f = train[i]->frames.back().values;
    const Matrix x = Eigen::Map<const Eigen::Matrix<float, 1, Eigen::Dynamic>>(f.data(), static_cast<Eigen::Index>(f.size()));
    finals.row(static_cast<Eigen::Index>(i)) = vae.encode(x).row(0);
  }
  ClusterLabeling lab = label_rare(finals, cfg.dbscan_eps, std::min(cfg.dbscan_min_pts, train.size()),
                                   cfg.rare_cluster_fraction);
  std::vector<bool> mask(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) mask[i] = train[i]->rare || lab.rare[i];
  if (labeling != nullptr) *labeling = std::move(lab);
  return mask;
}

/// Teacher-forced seq2seq training on latent trajectories. Samples are grouped
/// by trajectory length; every batch draws its own prefix length in
/// [1, length - 1].
inline Trained<SeqModel<Real>> train_seq(const std::vector<Matrix>& trajectories, const std::vector<bool>& rare,
                                         const TrainingConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (trajectories.empty()) throw DomainError("train_seq: no trajectories");
  if (rare.size() != trajectories.size()) throw ShapeError("train_seq: rare mask length mismatch");
  for (const auto& t : trajectories) {
    if (t.rows() < 3) throw DomainError("train_seq: trajectories need at least 3 steps");
    if (static_cast<std::size_t>(t.cols()) != cfg.latent_dim) throw ShapeError("train_seq: latent size mismatch");
  }
  std::mt19937_64 rng(seed);
  Trained<SeqModel<Real>> out{SeqModel<Real>(cfg.latent_dim, cfg.seq_hidden, rng), {}};
  nn::AdamState<Real> adam(cfg.adam);
  const auto params = out.model.parameters();

  std::map<Eigen::Index, std::vector<std::size_t>> by_length;
  for (std::size_t i = 0; i < trajectories.size(); ++i) by_length[trajectories[i].rows()].push_back(i);

  for (std::size_t epoch = 0; epoch < cfg.seq_epochs; ++epoch) {
    std::vector<std::vector<std::size_t>> batches;
    for (auto& [len, members] : by_length) {
      std::shuffle(members.begin(), members.end(), rng);
      for (std::size_t b = 0; b < members.size(); b += cfg.seq_batch)
        batches.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(b),
                             members.begin() + static_cast<std::ptrdiff_t>(std::min(members.size(), b + cfg.seq_batch)));
    }
    std::shuffle(batches.begin(), batches.end(), rng);
    double total = 0.0;
    for (const auto& batch : batches) {
      const Eigen::Index len = trajectories[batch.front()].rows();
      std::vector<Matrix> seq(static_cast<std::size_t>(len), Matrix(static_cast<Eigen::Index>(batch.size()), trajectories[batch.front()].cols()));
      std::vector<bool> batch_rare(batch.size());
      for (std::size_t b = 0; b < batch.size(); ++b) {
        batch_rare[b] = rare[batch[b]];
        for (Eigen::Index t = 0; t < len; ++t) seq[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(b)) = trajectories[batch[b]].row(t);
      }
      std::uniform_int_distribution<std::size_t> pick(1, static_cast<std::size_t>(len) - 1);
      const std::size_t prefix = pick(rng);
      out.model.zero_grad();
      const double loss = out.model.accumulate_gradients(seq, prefix, batch_rare, cfg.lambda);
      detail::check_loss(loss, "train_seq", epoch);
      nn::adam_step(adam, params);
      total += loss;
    }
    out.loss_trace.push_back(total / static_cast<double>(batches.size()));
  }
  return out;
}

/// Regression of z-scored remaining life on frame latents.
inline Trained<LifeModel<Real>> train_life(const Matrix& latents, const std::vector<double>& life,
                                           const TrainingConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (latents.rows() == 0) throw DomainError("train_life: no training frames");
  if (life.size() != static_cast<std::size_t>(latents.rows())) throw ShapeError("train_life: target count mismatch");
  const double mean = std::accumulate(life.begin(), life.end(), 0.0) / static_cast<double>(life.size());
  double var = 0.0;
  for (double v : life) var += (v - mean) * (v - mean);
  const double std_dev = std::sqrt(var / static_cast<double>(life.size()));
  if (!(std_dev > 1e-12 * std::max(1.0, std::abs(mean))))
    throw DegenerateTargetError("train_life: remaining-life targets have zero variance");

  std::mt19937_64 rng(seed);
  Trained<LifeModel<Real>> out{LifeModel<Real>(static_cast<std::size_t>(latents.cols()), cfg.life_hidden, rng), {}};
  out.model.set_normalization(mean, std_dev);
  Matrix target(latents.rows(), 1);
  for (std::size_t i = 0; i < life.size(); ++i) target(static_cast<Eigen::Index>(i), 0) = static_cast<Real>((life[i] - mean) / std_dev);

  nn::AdamState<Real> adam(cfg.adam);
  const auto params = out.model.parameters();
  std::vector<std::size_t> order(life.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.life_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += cfg.life_batch) {
      const std::size_t e = std::min(order.size(), b + cfg.life_batch);
      out.model.zero_grad();
      const double loss = out.model.accumulate_gradients(gather_rows(latents, order, b, e), gather_rows(target, order, b, e));
      detail::check_loss(loss, "train_life", epoch);
      nn::adam_step(adam, params);
      total += loss;
      ++batches;
    }
    out.loss_trace.push_back(total / static_cast<double>(batches));
  }
  return out;
}

/// The three trained networks plus provenance.
struct ModelBundle {
  Vae<Real> vae;
  SeqModel<Real> seq;
  LifeModel<Real> life;
  TrainingConfig config;
  std::size_t max_frames = 0;  // longest training trajectory
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<double> vae_trace, seq_trace, life_trace;
  std::size_t n_rare_train = 0;
};

/// Trains VAE, rare labelling, seq2seq and life head on the library's train split.
inline ModelBundle train_bundle(const Library& lib, const TrainingConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto train = lib.train();
  std::mt19937_64 seeder(seed);
  const std::uint64_t vae_seed = seeder(), seq_seed = seeder(), life_seed = seeder();

  ModelBundle out;
  out.config = cfg;
  out.seed = seed;
  out.config_hash = lib.config_hash;
  auto vae = train_vae(train, cfg, vae_seed);
  out.vae = std::move(vae.model);
  out.vae_trace = std::move(vae.loss_trace);

  std::vector<Matrix> traj;
  traj.reserve(train.size());
  std::vector<double> life_targets;
  for (const auto* s : train) {
    traj.push_back(encode_trajectory(out.vae, *s));
    out.max_frames = std::max(out.max_frames, s->frames.size());
    life_targets.insert(life_targets.end(), s->remaining_life.begin(), s->remaining_life.end());
  }
  const std::vector<bool> rare = rare_training_mask(out.vae, train, cfg);
  out.n_rare_train = static_cast<std::size_t>(std::count(rare.begin(), rare.end(), true));
  auto seq = train_seq(traj, rare, cfg, seq_seed);
  out.seq = std::move(seq.model);
  out.seq_trace = std::move(seq.loss_trace);

  Matrix all(static_cast<Eigen::Index>(life_targets.size()), static_cast<Eigen::Index>(cfg.latent_dim));
  Eigen::Index r = 0;
  for (const auto& t : traj) {
    all.middleRows(r, t.rows()) = t;
    r += t.rows();
  }
  auto life = train_life(all, life_targets, cfg, life_seed);
  out.life = std::move(life.model);
  out.life_trace = std::move(life.loss_trace);
  return out;
}

}  // namespace fcg::model
