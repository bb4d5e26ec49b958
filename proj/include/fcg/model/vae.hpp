#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/nn/dense.hpp"
#include "fcg/nn/losses.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::model {

using nn::Activation;
using nn::Tensor2;

/// Variational autoencoder over flattened voxel grids. The encoder is a
/// tanh dense stack ending in a linear layer that emits [mean | log-variance];
/// the decoder mirrors it and ends in a sigmoid so outputs stay in [0, 1].
template <class T>
class Vae {
 public:
  Vae() = default;

  template <class Rng>
  Vae(std::size_t input_dim, std::size_t latent_dim, const std::vector<std::size_t>& hidden, Rng& rng)
      : input_dim_(input_dim), latent_dim_(latent_dim) {
    if (latent_dim < 2) throw DomainError("Vae: latent dimension must be at least 2");
    if (hidden.empty()) throw DomainError("Vae: need at least one hidden layer");
    std::size_t in = input_dim;
    for (std::size_t h : hidden) {
      encoder_.emplace_back(in, h, Activation::tanh, rng);
      in = h;
    }
    encoder_.emplace_back(in, 2 * latent_dim, Activation::identity, rng);
    in = latent_dim;
    for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
      decoder_.emplace_back(in, *it, Activation::tanh, rng);
      in = *it;
    }
    decoder_.emplace_back(in, input_dim, Activation::sigmoid, rng);
  }

  [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
  [[nodiscard]] std::size_t latent_dim() const { return latent_dim_; }

  /// Sets the output bias so an untrained decoder emits `p` everywhere.
  void set_output_prior(double p) {
    const double logit = std::log(p / (1.0 - p));
    decoder_.back().bias.setConstant(static_cast<T>(logit));
  }

  nn::GaussianLatent<T> posterior(const Tensor2<T>& x, std::vector<typename nn::Dense<T>::Cache>* caches = nullptr) const {
    if (static_cast<std::size_t>(x.cols()) != input_dim_) throw ShapeError("Vae::encode: grid size mismatch");
    if (caches != nullptr) caches->resize(encoder_.size());
    // Crack grids are mostly empty, so the wide first layer runs sparse.
    const Eigen::SparseMatrix<T, Eigen::RowMajor> sx = x.sparseView();
    Tensor2<T> h = encoder_[0].forward_sparse(sx, caches != nullptr ? &(*caches)[0] : nullptr);
    for (std::size_t i = 1; i < encoder_.size(); ++i)
      h = encoder_[i].forward(h, caches != nullptr ? &(*caches)[i] : nullptr);
    const auto d = static_cast<Eigen::Index>(latent_dim_);
    return {h.leftCols(d), h.rightCols(d)};
  }

  /// Posterior means; deterministic, no sampling.
  Tensor2<T> encode(const Tensor2<T>& x) const { return posterior(x).mean; }

  Tensor2<T> decode(const Tensor2<T>& z, std::vector<typename nn::Dense<T>::Cache>* caches = nullptr) const {
    if (static_cast<std::size_t>(z.cols()) != latent_dim_) throw ShapeError("Vae::decode: latent size mismatch");
    if (caches != nullptr) caches->resize(decoder_.size());
    Tensor2<T> h = z;
    for (std::size_t i = 0; i < decoder_.size(); ++i)
      h = decoder_[i].forward(h, caches != nullptr ? &(*caches)[i] : nullptr);
    return h;
  }

  struct StepResult {
    double loss = 0.0;
    double reconstruction = 0.0;
    double kl = 0.0;
  };

  /// Forward and backward pass of the VAE objective for one batch, with the
  /// reparameterised sample z = mean + exp(log_var / 2) * noise. Gradients
  /// accumulate into the layers; call zero_grad() between batches.
  StepResult accumulate_gradients(const Tensor2<T>& x, const Tensor2<T>& noise, nn::Reconstruction mode) {
    std::vector<typename nn::Dense<T>::Cache> enc_cache, dec_cache;
    const nn::GaussianLatent<T> q = posterior(x, &enc_cache);
    if (noise.rows() != q.mean.rows() || noise.cols() != q.mean.cols()) throw ShapeError("Vae: noise shape mismatch");
    const Tensor2<T> std_dev = (q.log_var.array() * T(0.5)).exp().matrix();
    const Tensor2<T> z = q.mean + (std_dev.array() * noise.array()).matrix();
    const Tensor2<T> x_hat = decode(z, &dec_cache);

    const nn::LossGrad<T> rec = nn::reconstruction_loss(x, x_hat, mode);
    const double kl = nn::kl_divergence(q);

    Tensor2<T> grad = rec.grad;
    for (std::size_t i = decoder_.size(); i-- > 0;) grad = decoder_[i].backward(dec_cache[i], grad);
    const nn::GaussianLatent<T> kl_grad = nn::kl_divergence_grad(q);
    const Tensor2<T> d_mean = grad + kl_grad.mean;
    const Tensor2<T> d_log_var =
        (grad.array() * noise.array() * std_dev.array() * T(0.5)).matrix() + kl_grad.log_var;
    Tensor2<T> g(x.rows(), 2 * static_cast<Eigen::Index>(latent_dim_));
    g << d_mean, d_log_var;
    for (std::size_t i = encoder_.size(); i-- > 1;) g = encoder_[i].backward(enc_cache[i], g);
    encoder_[0].backward_sparse(x.sparseView(), enc_cache[0], g);
    return {rec.value + kl, rec.value, kl};
  }

  nn::ParamList<T> parameters() {
    nn::ParamList<T> out;
    for (std::size_t i = 0; i < encoder_.size(); ++i) encoder_[i].collect(out, "vae.encoder." + std::to_string(i));
    for (std::size_t i = 0; i < decoder_.size(); ++i) decoder_[i].collect(out, "vae.decoder." + std::to_string(i));
    return out;
  }

  void zero_grad() {
    for (auto& l : encoder_) {
      l.grad_weights.setZero();
      l.grad_bias.setZero();
    }
    for (auto& l : decoder_) {
      l.grad_weights.setZero();
      l.grad_bias.setZero();
    }
  }

  [[nodiscard]] std::vector<std::size_t> hidden_sizes() const {
    std::vector<std::size_t> h;
    for (std::size_t i = 0; i + 1 < encoder_.size(); ++i) h.push_back(encoder_[i].out_size());
    return h;
  }

 private:
  std::size_t input_dim_ = 0;
  std::size_t latent_dim_ = 0;
  std::vector<nn::Dense<T>> encoder_;
  std::vector<nn::Dense<T>> decoder_;
};

}  // namespace fcg::model
