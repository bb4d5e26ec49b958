#pragma once

#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "fcg/errors.hpp"
#include "fcg/nn/dense.hpp"
#include "fcg/nn/losses.hpp"
#include "fcg/nn/lstm.hpp"
#include "fcg/nn/tensor.hpp"

namespace fcg::model {

/// Sequence-to-sequence forecaster over latent trajectories.
///
/// Encoder: two stacked LSTM layers over the observed latents, then a dense
/// tanh bridge that maps the top layer's final hidden state into the
/// decoder's top-layer initial hidden state (cell states and the lower
/// layer's state pass through unchanged).
///
/// Decoder: two stacked LSTM layers and a linear head. Step j reads the
/// previous latent u_j and emits z_hat = u_j + head(h2_j). The first input is
/// the last observed latent; afterwards the decoder reads the ground truth
/// during training and its own output at inference.
template <class T>
class SeqModel {
 public:
  using Tensor = nn::Tensor2<T>;

  SeqModel() = default;

  template <class Rng>
  SeqModel(std::size_t latent_dim, std::size_t hidden, Rng& rng)
      : latent_dim_(latent_dim),
        hidden_(hidden),
        enc1_(latent_dim, hidden, rng),
        enc2_(hidden, hidden, rng),
        bridge_(hidden, hidden, nn::Activation::tanh, rng),
        dec1_(latent_dim, hidden, rng),
        dec2_(hidden, hidden, rng),
        head_(hidden, latent_dim, nn::Activation::identity, rng) {
    if (latent_dim < 1 || hidden < 1) throw DomainError("SeqModel: sizes must be positive");
  }

  [[nodiscard]] std::size_t latent_dim() const { return latent_dim_; }
  [[nodiscard]] std::size_t hidden() const { return hidden_; }

  struct State {
    Tensor h1, c1, h2, c2;
  };

  struct EncoderCache {
    std::vector<nn::LstmStepCache<T>> layer1, layer2;
    typename nn::Dense<T>::Cache bridge;
  };

  struct DecoderCache {
    nn::LstmStepCache<T> layer1, layer2;
    typename nn::Dense<T>::Cache head;
  };

  /// Runs the encoder over `prefix` (each entry batch x latent_dim) and
  /// returns the decoder's initial state.
  State encode(const std::vector<Tensor>& prefix, EncoderCache* cache = nullptr) const {
    if (prefix.empty()) throw DomainError("SeqModel::encode: empty prefix");
    const Eigen::Index B = prefix.front().rows();
    const auto H = static_cast<Eigen::Index>(hidden_);
    State s{Tensor::Zero(B, H), Tensor::Zero(B, H), Tensor::Zero(B, H), Tensor::Zero(B, H)};
    if (cache != nullptr) {
      cache->layer1.resize(prefix.size());
      cache->layer2.resize(prefix.size());
    }
    for (std::size_t t = 0; t < prefix.size(); ++t) {
      check_latent(prefix[t], B);
      std::tie(s.h1, s.c1) = enc1_.step(prefix[t], s.h1, s.c1, cache != nullptr ? &cache->layer1[t] : nullptr);
      std::tie(s.h2, s.c2) = enc2_.step(s.h1, s.h2, s.c2, cache != nullptr ? &cache->layer2[t] : nullptr);
    }
    s.h2 = bridge_.forward(s.h2, cache != nullptr ? &cache->bridge : nullptr);
    return s;
  }

  /// One decoder step; advances `state` and returns the predicted next latent.
  Tensor decode_step(const Tensor& input, State& state, DecoderCache* cache = nullptr) const {
    check_latent(input, state.h1.rows());
    std::tie(state.h1, state.c1) = dec1_.step(input, state.h1, state.c1, cache != nullptr ? &cache->layer1 : nullptr);
    std::tie(state.h2, state.c2) = dec2_.step(state.h1, state.h2, state.c2, cache != nullptr ? &cache->layer2 : nullptr);
    return input + head_.forward(state.h2, cache != nullptr ? &cache->head : nullptr);
  }

  /// Free-running forecast of `horizon` latents after the observed rows of
  /// `observed` (time x latent_dim, one trajectory).
  Tensor forecast(const Tensor& observed, std::size_t horizon) const {
    if (observed.rows() == 0) throw DomainError("SeqModel::forecast: nothing observed");
    if (static_cast<std::size_t>(observed.cols()) != latent_dim_) throw ShapeError("SeqModel::forecast: latent size mismatch");
    std::vector<Tensor> prefix;
    for (Eigen::Index t = 0; t < observed.rows(); ++t) prefix.emplace_back(observed.row(t));
    State s = encode(prefix);
    Tensor out(static_cast<Eigen::Index>(horizon), observed.cols());
    Tensor input = prefix.back();
    for (std::size_t j = 0; j < horizon; ++j) {
      input = decode_step(input, s);
      out.row(static_cast<Eigen::Index>(j)) = input.row(0);
    }
    return out;
  }

  /// Teacher-forced loss on a batch of equal-length trajectories
  /// (`sequence[t]` is batch x latent_dim). The first `prefix_len` steps are
  /// observed; every later step is a target. Gradients accumulate into the
  /// layers. A prefix covering the whole sequence contributes zero loss.
  double accumulate_gradients(const std::vector<Tensor>& sequence, std::size_t prefix_len,
                              const std::vector<bool>& rare_samples, double lambda) {
    if (prefix_len < 1 || prefix_len > sequence.size())
      throw DomainError("SeqModel: prefix length must lie in [1, sequence length]");
    const std::size_t n_targets = sequence.size() - prefix_len;
    if (n_targets == 0) return 0.0;
    const Eigen::Index B = sequence.front().rows();
    if (rare_samples.size() != static_cast<std::size_t>(B)) throw ShapeError("SeqModel: rare mask length mismatch");
    const auto d = static_cast<Eigen::Index>(latent_dim_);

    EncoderCache enc_cache;
    std::vector<Tensor> prefix(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(prefix_len));
    State s = encode(prefix, &enc_cache);

    std::vector<DecoderCache> dec_cache(n_targets);
    Tensor predicted(static_cast<Eigen::Index>(n_targets) * B, d);
    Tensor target(static_cast<Eigen::Index>(n_targets) * B, d);
    std::vector<bool> rare_rows(static_cast<std::size_t>(n_targets * static_cast<std::size_t>(B)));
    for (std::size_t j = 0; j < n_targets; ++j) {
      const Tensor& input = sequence[prefix_len - 1 + j];
      const auto rows = static_cast<Eigen::Index>(j) * B;
      predicted.middleRows(rows, B) = decode_step(input, s, &dec_cache[j]);
      target.middleRows(rows, B) = sequence[prefix_len + j];
      for (Eigen::Index b = 0; b < B; ++b)
        rare_rows[static_cast<std::size_t>(rows + b)] = rare_samples[static_cast<std::size_t>(b)];
    }
    const nn::LossGrad<T> loss = nn::reweighted_mse_grad(target, predicted, rare_rows, lambda);

    const auto H = static_cast<Eigen::Index>(hidden_);
    Tensor dh1 = Tensor::Zero(B, H), dc1 = Tensor::Zero(B, H);
    Tensor dh2 = Tensor::Zero(B, H), dc2 = Tensor::Zero(B, H);
    for (std::size_t j = n_targets; j-- > 0;) {
      const Tensor dpred = loss.grad.middleRows(static_cast<Eigen::Index>(j) * B, B);
      const Tensor dtop = head_.backward(dec_cache[j].head, dpred) + dh2;
      const auto g2 = dec2_.step_backward(dec_cache[j].layer2, dtop, dc2);
      const auto g1 = dec1_.step_backward(dec_cache[j].layer1, Tensor(g2.x + dh1), dc1);
      dh1 = g1.h_prev;
      dc1 = g1.c_prev;
      dh2 = g2.h_prev;
      dc2 = g2.c_prev;
    }
    dh2 = bridge_.backward(enc_cache.bridge, dh2);
    for (std::size_t t = prefix_len; t-- > 0;) {
      const auto g2 = enc2_.step_backward(enc_cache.layer2[t], dh2, dc2);
      const auto g1 = enc1_.step_backward(enc_cache.layer1[t], Tensor(g2.x + dh1), dc1);
      dh1 = g1.h_prev;
      dc1 = g1.c_prev;
      dh2 = g2.h_prev;
      dc2 = g2.c_prev;
    }
    return loss.value;
  }

  nn::ParamList<T> parameters() {
    nn::ParamList<T> out;
    enc1_.collect(out, "seq.encoder.lstm1");
    enc2_.collect(out, "seq.encoder.lstm2");
    bridge_.collect(out, "seq.encoder.fc");
    dec1_.collect(out, "seq.decoder.lstm1");
    dec2_.collect(out, "seq.decoder.lstm2");
    head_.collect(out, "seq.decoder.fc");
    return out;
  }

  void zero_grad() { nn::zero_grads(parameters()); }

 private:
  void check_latent(const Tensor& z, Eigen::Index batch) const {
    if (static_cast<std::size_t>(z.cols()) != latent_dim_ || z.rows() != batch)
      throw ShapeError("SeqModel: latent batch shape mismatch");
  }

  std::size_t latent_dim_ = 0;
  std::size_t hidden_ = 0;
  nn::Lstm<T> enc1_, enc2_;
  nn::Dense<T> bridge_;
  nn::Lstm<T> dec1_, dec2_;
  nn::Dense<T> head_;
};

}  // namespace fcg::model
