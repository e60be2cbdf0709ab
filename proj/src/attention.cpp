// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/attention.hpp"

#include <cmath>
#include <string>

#include "cincgan/complex_ops.hpp"
#include "cincgan/errors.hpp"

namespace cincgan::nn {

torch::Tensor magnitude_proxy(const torch::Tensor& x) {
  return torch::sqrt(real_part(x).square() + imag_part(x).square() + kNormEps);
}

AxisAttentionImpl::AxisAttentionImpl(int64_t channels_, AttentionAxis axis_, bool complex_mode_)
    : channels(channels_), width(std::max<int64_t>(channels_ / 4, 1)), axis(axis_),
      complex_mode(complex_mode_) {
  using torch::nn::Conv2dOptions;
  query = register_module("query", torch::nn::Conv2d(Conv2dOptions(channels, width, 1)));
  key = register_module("key", torch::nn::Conv2d(Conv2dOptions(channels, width, 1)));
  value = register_module("value",
                          torch::nn::Conv2d(Conv2dOptions(channels, width, 1).bias(!complex_mode)));
  output = register_module("output",
                           torch::nn::Conv2d(Conv2dOptions(width, channels, 1).bias(!complex_mode)));
}

namespace {

// 1x1 conv applied to a channel-last tensor (..., C_in) -> (..., C_out).
torch::Tensor project(const torch::nn::Conv2d& conv, const torch::Tensor& x_last) {
  return torch::linear(x_last, conv->weight.flatten(1), conv->bias);
}

}  // namespace

// (B, C, T, F) -> (B, F, T, C) for time attention, (B, T, F, C) otherwise, so
// the attended axis is second to last.
torch::Tensor AxisAttentionImpl::to_sequences(const torch::Tensor& t) const {
  return axis == AttentionAxis::kTime ? t.permute({0, 3, 2, 1}) : t.permute({0, 2, 3, 1});
}

torch::Tensor AxisAttentionImpl::from_sequences(const torch::Tensor& t) const {
  return axis == AttentionAxis::kTime ? t.permute({0, 3, 2, 1}) : t.permute({0, 3, 1, 2});
}

void AxisAttentionImpl::check(const torch::Tensor& x) const {
  const int64_t expected = complex_mode ? 2 * channels : channels;
  if (x.dim() != 4 || x.size(1) != expected)
    throw ShapeError("attention: expected " + std::to_string(expected) + " channels, got " +
                     c10::str(x.sizes()));
}

torch::Tensor AxisAttentionImpl::attention_weights(const torch::Tensor& x) {
  check(x);
  const auto source = to_sequences(complex_mode ? magnitude_proxy(x) : x);
  const auto q = project(query, source), k = project(key, source);
  const auto scores = torch::matmul(q, k.transpose(-1, -2)) / std::sqrt(static_cast<double>(width));
  // softmax subtracts the row maximum internally.
  return torch::softmax(scores, -1).flatten(0, 1);
}

torch::Tensor AxisAttentionImpl::forward(const torch::Tensor& x) {
  check(x);
  const auto source = to_sequences(complex_mode ? magnitude_proxy(x) : x);
  const auto q = project(query, source), k = project(key, source);
  if (!complex_mode) {
    const auto mixed = at::scaled_dot_product_attention(q, k, project(value, source));
    return from_sequences(project(output, mixed));
  }
  // Both parts share the attention weights: attend over [v_re | v_im].
  const auto re = to_sequences(real_part(x)), im = to_sequences(imag_part(x));
  const auto v = torch::cat({project(value, re), project(value, im)}, -1);
  const auto mixed = at::scaled_dot_product_attention(q, k, v).chunk(2, -1);
  return make_complex(from_sequences(project(output, mixed[0])), from_sequences(project(output, mixed[1])));
}

AtfaImpl::AtfaImpl(int64_t channels, bool complex_mode) {
  time_branch = register_module("time_branch",
                                AxisAttention(channels, AttentionAxis::kTime, complex_mode));
  freq_branch = register_module("freq_branch",
                                AxisAttention(channels, AttentionAxis::kFrequency, complex_mode));
  alpha_t = register_parameter("alpha_t", torch::zeros({1}));
  alpha_f = register_parameter("alpha_f", torch::zeros({1}));
}

torch::Tensor AtfaImpl::forward(const torch::Tensor& x) {
  return x + alpha_t * time_branch(x) + alpha_f * freq_branch(x);
}

AhaImpl::AhaImpl(int64_t channels_, bool complex_mode_)
    : channels(channels_), complex_mode(complex_mode_) {
  const int64_t hidden = std::max<int64_t>(channels / 4, 1);
  fc1 = register_module("fc1", torch::nn::Linear(channels, hidden));
  fc2 = register_module("fc2", torch::nn::Linear(hidden, channels));
}

torch::Tensor AhaImpl::fusion_weights(const std::vector<torch::Tensor>& maps) {
  if (maps.empty()) throw InvalidInputError("AHA: no feature maps to fuse");
  std::vector<torch::Tensor> scores;
  scores.reserve(maps.size());
  for (const auto& m : maps) {
    if (m.sizes() != maps.front().sizes()) throw ShapeError("AHA: feature maps differ in shape");
    const auto source = complex_mode ? magnitude_proxy(m) : m;
    if (source.size(1) != channels) throw ShapeError("AHA: channel mismatch");
    const auto descriptor = source.mean({2, 3});
    scores.push_back(fc2(torch::relu(fc1(descriptor))));
  }
  return torch::softmax(torch::stack(scores, 1), 1);
}

torch::Tensor AhaImpl::forward(const std::vector<torch::Tensor>& maps) {
  const auto w = fusion_weights(maps);
  torch::Tensor out;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    auto wk = w.select(1, static_cast<int64_t>(k));
    if (complex_mode) wk = wk.repeat({1, 2});
    const auto term = wk.unsqueeze(-1).unsqueeze(-1) * maps[k];
    out = out.defined() ? out + term : term;
  }
  return out;
}

AiaImpl::AiaImpl(AiaConfig config_) : config(config_) {
  if (config.n_atfa < 1) throw InvalidParameterError("AIA: n_atfa must be >= 1");
  blocks = register_module("blocks", torch::nn::ModuleList());
  for (int64_t i = 0; i < config.n_atfa; ++i) blocks->push_back(Atfa(config.channels, config.complex_mode));
  aha = register_module("aha", Aha(config.channels, config.complex_mode));
}

torch::Tensor AiaImpl::forward(const torch::Tensor& x) {
  std::vector<torch::Tensor> outputs;
  outputs.reserve(blocks->size());
  torch::Tensor h = x;
  for (const auto& block : *blocks) {
    h = block->as<AtfaImpl>()->forward(h);
    outputs.push_back(h);
  }
  return x + aha(outputs);
}

}  // namespace cincgan::nn
