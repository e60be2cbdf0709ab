// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <vector>

#include "cincgan/complex_ops.hpp"

namespace cincgan::nn {

// How a training-mode forward refreshes the singular vectors u, v.
enum class SpectralEstimator {
  // Top singular pair from an SVD of the current weight.
  kExact,
  // One power-iteration step from the persisted vectors. Lags badly when the
  // leading singular values are close, which is common for small layers.
  kPowerIteration,
};

// 2D convolution whose weight is divided by sigma = u^T W v, W being the
// weight reshaped to (C_out, C_in * kt * kf). u and v persist as buffers and
// are treated as constants by autograd.
class SNConv2dImpl : public torch::nn::Module {
 public:
  SNConv2dImpl(int64_t in, int64_t out, Pair kernel, Pair stride, Pair padding,
               SpectralEstimator estimator = SpectralEstimator::kExact);
  torch::Tensor forward(const torch::Tensor& x);

  void power_iteration(int64_t steps = 1);
  void exact_refresh();
  void refresh();
  // Current sigma estimate u^T W v (differentiable w.r.t. weight).
  torch::Tensor sigma() const;
  torch::Tensor normalized_weight() const;

  Pair stride, padding;
  SpectralEstimator estimator;
  torch::Tensor weight, bias, u, v;
};
TORCH_MODULE(SNConv2d);

struct DiscriminatorOptions {
  int64_t in_channels = 1;
  std::vector<int64_t> channels{32, 32, 64, 64, 128, 1};
  int64_t n_scales = 2;
  SpectralEstimator estimator = SpectralEstimator::kExact;
};

// Six SN convolutions: kernel (3,5) with padding (1,2) except a final (1,1),
// all with stride (1,2); PReLU after every layer but the last.
class ScaleDiscriminatorImpl : public torch::nn::Module {
 public:
  ScaleDiscriminatorImpl(int64_t in_channels, const std::vector<int64_t>& channels,
                         SpectralEstimator estimator = SpectralEstimator::kExact);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::ModuleList convs{nullptr}, acts{nullptr};
};
TORCH_MODULE(ScaleDiscriminator);

// Independent discriminators on the input and on successive 2x2 average-pooled
// copies. Scores are raw least-squares outputs, one map per scale.
class MultiScaleDiscriminatorImpl : public torch::nn::Module {
 public:
  explicit MultiScaleDiscriminatorImpl(DiscriminatorOptions options = {});
  std::vector<torch::Tensor> forward(const torch::Tensor& x);
  std::vector<torch::Tensor> scale_inputs(const torch::Tensor& x) const;
  std::vector<SNConv2d> sn_layers() const;

  DiscriminatorOptions options;
  torch::nn::ModuleList scales{nullptr};
};
TORCH_MODULE(MultiScaleDiscriminator);

}  // namespace cincgan::nn
