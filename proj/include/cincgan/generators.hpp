// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <vector>

#include "cincgan/attention.hpp"
#include "cincgan/complex_ops.hpp"

namespace cincgan::nn {

using Shape = std::vector<int64_t>;

// Shapes seen inside a generator forward pass, for shape checks.
struct GeneratorTrace {
  std::vector<Shape> encoder;
  Shape bottleneck;
  std::vector<Shape> decoder;
  Shape output;
};

struct MagnitudeGeneratorOptions {
  std::vector<int64_t> channels{16, 32, 64};
  int64_t n_atfa = 6;
};

// Conv (k=(3,5), s=(1,2), p=(1,2)) + IN + PReLU + GLU.
class MagEncoderBlockImpl : public torch::nn::Module {
 public:
  MagEncoderBlockImpl(int64_t in, int64_t out);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::Conv2d conv{nullptr};
  torch::nn::InstanceNorm2d norm{nullptr};
  torch::nn::PReLU act{nullptr};
  Glu gate{nullptr};
};
TORCH_MODULE(MagEncoderBlock);

// Transposed conv with an explicit output size + IN + PReLU + GLU.
class MagDecoderBlockImpl : public torch::nn::Module {
 public:
  MagDecoderBlockImpl(int64_t in, int64_t out);
  torch::Tensor forward(const torch::Tensor& x, Pair output_size);

  torch::nn::ConvTranspose2d deconv{nullptr};
  torch::nn::InstanceNorm2d norm{nullptr};
  torch::nn::PReLU act{nullptr};
  Glu gate{nullptr};
};
TORCH_MODULE(MagDecoderBlock);

// Maps a compressed magnitude (B, 1, T, 257) to a non-negative magnitude of
// the same shape. Three encoder blocks, AIA at the bottleneck, three decoder
// blocks fed with skip connections, then a 1x1 conv + softplus head whose
// output is a gain applied to the input magnitude.
class MagnitudeGeneratorImpl : public torch::nn::Module {
 public:
  explicit MagnitudeGeneratorImpl(MagnitudeGeneratorOptions options = {});
  torch::Tensor forward(const torch::Tensor& mag);
  torch::Tensor forward_traced(const torch::Tensor& mag, GeneratorTrace* trace);

  MagnitudeGeneratorOptions options;
  torch::nn::ModuleList encoder{nullptr}, decoder{nullptr};
  Aia aia{nullptr};
  torch::nn::Conv2d head{nullptr};
};
TORCH_MODULE(MagnitudeGenerator);

struct ComplexGeneratorOptions {
  std::vector<int64_t> channels{32, 32, 64, 64, 128, 128, 256, 256};
  int64_t n_atfa = 6;
};

// Complex conv (k=(3,3), s=(1,2), p=(1,1)) + complex IN + PReLU.
class ComplexEncoderBlockImpl : public torch::nn::Module {
 public:
  ComplexEncoderBlockImpl(int64_t in, int64_t out);
  torch::Tensor forward(const torch::Tensor& x);

  ComplexConv2d conv{nullptr};
  ComplexInstanceNorm norm{nullptr};
  ComplexPReLU act{nullptr};
};
TORCH_MODULE(ComplexEncoderBlock);

class ComplexDecoderBlockImpl : public torch::nn::Module {
 public:
  ComplexDecoderBlockImpl(int64_t in, int64_t out);
  torch::Tensor forward(const torch::Tensor& x, Pair output_size);

  ComplexConv2d deconv{nullptr};
  ComplexInstanceNorm norm{nullptr};
  ComplexPReLU act{nullptr};
};
TORCH_MODULE(ComplexDecoderBlock);

// Maps a compressed-domain complex spectrum (B, 2, T, 257) to a refined one of
// the same shape. Eight complex encoder blocks, complex AIA, eight decoder
// blocks with skips, and a linear 1x1 complex head producing a complex mask
// that multiplies the input spectrum.
class ComplexGeneratorImpl : public torch::nn::Module {
 public:
  explicit ComplexGeneratorImpl(ComplexGeneratorOptions options = {});
  torch::Tensor forward(const torch::Tensor& spec);
  torch::Tensor forward_traced(const torch::Tensor& spec, GeneratorTrace* trace);

  ComplexGeneratorOptions options;
  torch::nn::ModuleList encoder{nullptr}, decoder{nullptr};
  Aia aia{nullptr};
  ComplexConv2d head{nullptr};
};
TORCH_MODULE(ComplexGenerator);

}  // namespace cincgan::nn
