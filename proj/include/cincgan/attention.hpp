// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <vector>

namespace cincgan::nn {

// Adaptive attention-in-attention configuration. `channels` counts real
// channels in real mode and complex channels in complex mode.
struct AiaConfig {
  int64_t channels = 64;
  int64_t n_atfa = 6;
  bool complex_mode = false;
};

enum class AttentionAxis { kTime, kFrequency };

// Single-head scaled dot-product self-attention along one axis of a (B, C, T, F)
// map: each frequency bin attends over time (kTime) or each frame attends over
// frequency (kFrequency). Q/K/V are 1x1 projections to max(C/4, 1) channels
// followed by a 1x1 projection back to C.
//
// In complex mode the input is (B, 2C, T, F). Queries and keys come from the
// magnitude proxy sqrt(re^2 + im^2 + eps); value and output projections are
// real, bias-free and applied identically to both parts, so the attention
// weights stay real.
class AxisAttentionImpl : public torch::nn::Module {
 public:
  AxisAttentionImpl(int64_t channels, AttentionAxis axis, bool complex_mode);
  torch::Tensor forward(const torch::Tensor& x);
  // Row-stochastic attention maps, (B * other_axis, L, L).
  torch::Tensor attention_weights(const torch::Tensor& x);

  int64_t channels;
  int64_t width;
  AttentionAxis axis;
  bool complex_mode;
  torch::nn::Conv2d query{nullptr}, key{nullptr}, value{nullptr}, output{nullptr};

 private:
  torch::Tensor to_sequences(const torch::Tensor& t) const;
  torch::Tensor from_sequences(const torch::Tensor& t) const;
  void check(const torch::Tensor& x) const;
};
TORCH_MODULE(AxisAttention);

// x + alpha_t * ATAB(x) + alpha_f * AFAB(x), gates initialised to zero.
class AtfaImpl : public torch::nn::Module {
 public:
  AtfaImpl(int64_t channels, bool complex_mode);
  torch::Tensor forward(const torch::Tensor& x);

  AxisAttention time_branch{nullptr}, freq_branch{nullptr};
  torch::Tensor alpha_t, alpha_f;
};
TORCH_MODULE(Atfa);

// Fuses n same-shaped maps: out = sum_k w_k * map_k where, per sample and
// channel, w = softmax_k(fc2(relu(fc1(gap(map_k))))). gap is the global average
// over (T, F) (of the magnitude proxy in complex mode). The weights are shared
// by both parts of a complex channel.
class AhaImpl : public torch::nn::Module {
 public:
  AhaImpl(int64_t channels, bool complex_mode);
  torch::Tensor forward(const std::vector<torch::Tensor>& maps);
  // (B, n, C) fusion weights.
  torch::Tensor fusion_weights(const std::vector<torch::Tensor>& maps);

  int64_t channels;
  bool complex_mode;
  torch::nn::Linear fc1{nullptr}, fc2{nullptr};
};
TORCH_MODULE(Aha);

// n_atfa chained ATFA blocks, AHA over their outputs, plus a residual from
// the input: aia(x) = x + AHA(h_1, ..., h_n). At initialisation every ATFA is
// the identity, so aia(x) = 2x.
class AiaImpl : public torch::nn::Module {
 public:
  explicit AiaImpl(AiaConfig config);
  torch::Tensor forward(const torch::Tensor& x);

  AiaConfig config;
  torch::nn::ModuleList blocks{nullptr};
  Aha aha{nullptr};
};
TORCH_MODULE(Aia);

// sqrt(re^2 + im^2 + eps) of a (B, 2C, T, F) map.
torch::Tensor magnitude_proxy(const torch::Tensor& x);

}  // namespace cincgan::nn
