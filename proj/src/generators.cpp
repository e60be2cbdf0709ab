// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/generators.hpp"

#include <cmath>
#include <string>

#include "cincgan/dsp.hpp"
#include "cincgan/errors.hpp"

namespace cincgan::nn {

namespace {

constexpr Pair kMagKernel{3, 5};
constexpr Pair kMagPadding{1, 2};
constexpr Pair kComplexKernel{3, 3};
constexpr Pair kComplexPadding{1, 1};
constexpr Pair kStride{1, 2};

Shape shape_of(const torch::Tensor& t) { return t.sizes().vec(); }

Pair spatial(const torch::Tensor& t) { return {t.size(2), t.size(3)}; }

// softplus(x) == 1 at this bias, so the head starts as an identity gain.
const double kUnitSoftplusBias = std::log(std::exp(1.0) - 1.0);

void check_input(const torch::Tensor& x, int64_t channels, const char* who) {
  if (x.dim() != 4 || x.size(1) != channels || x.size(3) != static_cast<int64_t>(dsp::kNumBins) ||
      x.size(2) < 1)
    throw ShapeError(std::string(who) + ": expected (B, " + std::to_string(channels) + ", T, " +
                     std::to_string(dsp::kNumBins) + "), got " + c10::str(x.sizes()));
}

}  // namespace

MagEncoderBlockImpl::MagEncoderBlockImpl(int64_t in, int64_t out) {
  conv = register_module("conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, kMagKernel)
                                                       .stride(kStride)
                                                       .padding(kMagPadding)));
  norm = register_module("norm", torch::nn::InstanceNorm2d(torch::nn::InstanceNorm2dOptions(out).affine(true)));
  act = register_module("act", torch::nn::PReLU(torch::nn::PReLUOptions().num_parameters(out)));
  gate = register_module("gate", Glu(out));
}

torch::Tensor MagEncoderBlockImpl::forward(const torch::Tensor& x) {
  return gate(act(norm(conv(x))));
}

MagDecoderBlockImpl::MagDecoderBlockImpl(int64_t in, int64_t out) {
  deconv = register_module(
      "deconv", torch::nn::ConvTranspose2d(
                    torch::nn::ConvTranspose2dOptions(in, out, kMagKernel).stride(kStride).padding(kMagPadding)));
  norm = register_module("norm", torch::nn::InstanceNorm2d(torch::nn::InstanceNorm2dOptions(out).affine(true)));
  act = register_module("act", torch::nn::PReLU(torch::nn::PReLUOptions().num_parameters(out)));
  gate = register_module("gate", Glu(out));
}

torch::Tensor MagDecoderBlockImpl::forward(const torch::Tensor& x, Pair output_size) {
  const std::vector<int64_t> size{output_size[0], output_size[1]};
  return gate(act(norm(deconv->forward(x, at::IntArrayRef(size)))));
}

MagnitudeGeneratorImpl::MagnitudeGeneratorImpl(MagnitudeGeneratorOptions options_)
    : options(std::move(options_)) {
  const auto& ch = options.channels;
  if (ch.empty()) throw InvalidParameterError("magnitude generator needs at least one encoder layer");
  encoder = register_module("encoder", torch::nn::ModuleList());
  decoder = register_module("decoder", torch::nn::ModuleList());
  int64_t in = 1;
  for (int64_t c : ch) {
    encoder->push_back(MagEncoderBlock(in, c));
    in = c;
  }
  aia = register_module("aia", Aia(AiaConfig{ch.back(), options.n_atfa, false}));
  // Decoder i consumes [previous, skip] and mirrors the encoder widths.
  for (std::size_t i = ch.size(); i-- > 0;) {
    const int64_t out = i == 0 ? ch.front() : ch[i - 1];
    decoder->push_back(MagDecoderBlock(2 * ch[i], out));
  }
  head = register_module("head", torch::nn::Conv2d(torch::nn::Conv2dOptions(ch.front(), 1, 1)));
  torch::NoGradGuard no_grad;
  head->weight.mul_(0.1);
  head->bias.fill_(kUnitSoftplusBias);
}

torch::Tensor MagnitudeGeneratorImpl::forward(const torch::Tensor& mag) {
  return forward_traced(mag, nullptr);
}

torch::Tensor MagnitudeGeneratorImpl::forward_traced(const torch::Tensor& mag, GeneratorTrace* trace) {
  check_input(mag, 1, "magnitude generator");
  std::vector<torch::Tensor> skips;
  std::vector<Pair> sizes;
  torch::Tensor h = mag;
  for (const auto& block : *encoder) {
    sizes.push_back(spatial(h));
    h = block->as<MagEncoderBlockImpl>()->forward(h);
    skips.push_back(h);
    if (trace) trace->encoder.push_back(shape_of(h));
  }
  h = aia(h);
  if (trace) trace->bottleneck = shape_of(h);
  for (const auto& block : *decoder) {
    h = block->as<MagDecoderBlockImpl>()->forward(torch::cat({h, skips.back()}, 1), sizes.back());
    skips.pop_back();
    sizes.pop_back();
    if (trace) trace->decoder.push_back(shape_of(h));
  }
  const auto out = torch::softplus(head(h)) * torch::relu(mag);
  if (trace) trace->output = shape_of(out);
  return out;
}

ComplexEncoderBlockImpl::ComplexEncoderBlockImpl(int64_t in, int64_t out) {
  conv = register_module(
      "conv", ComplexConv2d(ComplexConv2dOptions(in, out, kComplexKernel).stride(kStride).padding(kComplexPadding)));
  norm = register_module("norm", ComplexInstanceNorm(out));
  act = register_module("act", ComplexPReLU(out));
}

torch::Tensor ComplexEncoderBlockImpl::forward(const torch::Tensor& x) { return act(norm(conv(x))); }

ComplexDecoderBlockImpl::ComplexDecoderBlockImpl(int64_t in, int64_t out) {
  deconv = register_module("deconv", ComplexConv2d(ComplexConv2dOptions(in, out, kComplexKernel)
                                                       .stride(kStride)
                                                       .padding(kComplexPadding)
                                                       .transposed(true)));
  norm = register_module("norm", ComplexInstanceNorm(out));
  act = register_module("act", ComplexPReLU(out));
}

torch::Tensor ComplexDecoderBlockImpl::forward(const torch::Tensor& x, Pair output_size) {
  return act(norm(deconv(x, output_size)));
}

ComplexGeneratorImpl::ComplexGeneratorImpl(ComplexGeneratorOptions options_)
    : options(std::move(options_)) {
  const auto& ch = options.channels;
  if (ch.empty()) throw InvalidParameterError("complex generator needs at least one encoder layer");
  encoder = register_module("encoder", torch::nn::ModuleList());
  decoder = register_module("decoder", torch::nn::ModuleList());
  int64_t in = 1;
  for (int64_t c : ch) {
    encoder->push_back(ComplexEncoderBlock(in, c));
    in = c;
  }
  aia = register_module("aia", Aia(AiaConfig{ch.back(), options.n_atfa, true}));
  for (std::size_t i = ch.size(); i-- > 0;) {
    const int64_t out = i == 0 ? ch.front() : ch[i - 1];
    decoder->push_back(ComplexDecoderBlock(2 * ch[i], out));
  }
  head = register_module("head", ComplexConv2d(ComplexConv2dOptions(ch.front(), 1, {1, 1})));
  torch::NoGradGuard no_grad;
  head->w_r.mul_(0.1);
  head->w_i.mul_(0.1);
  head->b_r.fill_(1.0);
  head->b_i.fill_(0.0);
}

torch::Tensor ComplexGeneratorImpl::forward(const torch::Tensor& spec) { return forward_traced(spec, nullptr); }

torch::Tensor ComplexGeneratorImpl::forward_traced(const torch::Tensor& spec, GeneratorTrace* trace) {
  check_input(spec, 2, "complex generator");
  std::vector<torch::Tensor> skips;
  std::vector<Pair> sizes;
  torch::Tensor h = spec;
  for (const auto& block : *encoder) {
    sizes.push_back(spatial(h));
    h = block->as<ComplexEncoderBlockImpl>()->forward(h);
    skips.push_back(h);
    if (trace) trace->encoder.push_back(shape_of(h));
  }
  h = aia(h);
  if (trace) trace->bottleneck = shape_of(h);
  for (const auto& block : *decoder) {
    h = block->as<ComplexDecoderBlockImpl>()->forward(complex_cat(h, skips.back()), sizes.back());
    skips.pop_back();
    sizes.pop_back();
    if (trace) trace->decoder.push_back(shape_of(h));
  }
  const auto out = complex_mul(head(h), spec);
  if (trace) trace->output = shape_of(out);
  return out;
}

}  // namespace cincgan::nn
