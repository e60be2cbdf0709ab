// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <array>
#include <cstdint>
#include <optional>

// Complex-valued layers. A complex feature map with C channels is a real
// tensor (B, 2C, T, F): channels [0, C) hold real parts, [C, 2C) imaginary.

namespace cincgan::nn {

using Pair = std::array<int64_t, 2>;

inline constexpr double kNormEps = 1e-8;

torch::Tensor real_part(const torch::Tensor& x);
torch::Tensor imag_part(const torch::Tensor& x);
torch::Tensor make_complex(const torch::Tensor& re, const torch::Tensor& im);
// Channel concatenation that keeps the [real | imag] layout.
torch::Tensor complex_cat(const torch::Tensor& a, const torch::Tensor& b);
// Elementwise complex product of two maps with equal channel counts.
torch::Tensor complex_mul(const torch::Tensor& a, const torch::Tensor& b);

struct ComplexConvGeometry {
  Pair stride{1, 1};
  Pair padding{0, 0};
  // Only used by the transposed form.
  Pair output_padding{0, 0};
};

// out_r = conv(x_r, w_r) - conv(x_i, w_i) + b_r
// out_i = conv(x_r, w_i) + conv(x_i, w_r) + b_i
// Weights are (C_out, C_in, kt, kf); biases may be undefined tensors.
torch::Tensor complex_conv2d(const torch::Tensor& x, const torch::Tensor& w_r,
                             const torch::Tensor& w_i, const torch::Tensor& b_r,
                             const torch::Tensor& b_i, const ComplexConvGeometry& geom);

// Same complex combination with transposed convolutions. Weights are laid out
// (C_in, C_out, kt, kf) as for torch::conv_transpose2d.
torch::Tensor complex_conv_transpose2d(const torch::Tensor& x, const torch::Tensor& w_r,
                                       const torch::Tensor& w_i, const torch::Tensor& b_r,
                                       const torch::Tensor& b_i, const ComplexConvGeometry& geom);

// Output size of a strided convolution along one axis.
int64_t conv_output_size(int64_t in, int64_t kernel, int64_t stride, int64_t padding);
// output_padding that makes a transposed convolution produce `target`.
int64_t transposed_output_padding(int64_t in, int64_t target, int64_t kernel, int64_t stride,
                                  int64_t padding);

struct ComplexConv2dOptions {
  ComplexConv2dOptions(int64_t in, int64_t out, Pair kernel)
      : in_channels_(in), out_channels_(out), kernel_size_(kernel) {}
  TORCH_ARG(int64_t, in_channels);
  TORCH_ARG(int64_t, out_channels);
  TORCH_ARG(Pair, kernel_size);
  TORCH_ARG(Pair, stride) = Pair{1, 1};
  TORCH_ARG(Pair, padding) = Pair{0, 0};
  TORCH_ARG(bool, transposed) = false;
  TORCH_ARG(bool, bias) = true;
};

class ComplexConv2dImpl : public torch::nn::Module {
 public:
  explicit ComplexConv2dImpl(ComplexConv2dOptions options);

  void reset_parameters();
  // For the transposed form, output_size (T, F) picks the output padding.
  torch::Tensor forward(const torch::Tensor& x, std::optional<Pair> output_size = std::nullopt);

  ComplexConv2dOptions options;
  torch::Tensor w_r, w_i, b_r, b_i;
};
TORCH_MODULE(ComplexConv2d);

// Per instance and complex channel: subtract the complex mean and divide both
// parts by sqrt(var_r + var_i + eps). scale/bias are per complex channel and
// applied to both parts; undefined tensors skip the affine step.
torch::Tensor complex_instance_norm(const torch::Tensor& x, const torch::Tensor& scale,
                                    const torch::Tensor& bias, double eps = kNormEps);

class ComplexInstanceNormImpl : public torch::nn::Module {
 public:
  explicit ComplexInstanceNormImpl(int64_t channels, double eps = kNormEps);
  torch::Tensor forward(const torch::Tensor& x);

  int64_t channels;
  double eps;
  torch::Tensor scale, bias;
};
TORCH_MODULE(ComplexInstanceNorm);

// Real-valued PReLU on both parts with one slope per complex channel.
class ComplexPReLUImpl : public torch::nn::Module {
 public:
  explicit ComplexPReLUImpl(int64_t channels, double init = 0.25);
  torch::Tensor forward(const torch::Tensor& x);

  torch::Tensor slope;
};
TORCH_MODULE(ComplexPReLU);

// a * sigmoid(gate)
torch::Tensor gated_linear(const torch::Tensor& a, const torch::Tensor& gate);

// Gated linear unit: a 1x1 projection to 2C channels split into a linear half
// and a gate half.
torch::Tensor glu(const torch::Tensor& x, const torch::Tensor& weight, const torch::Tensor& bias);

class GluImpl : public torch::nn::Module {
 public:
  explicit GluImpl(int64_t channels);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d proj{nullptr};
};
TORCH_MODULE(Glu);

}  // namespace cincgan::nn
