// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/complex_ops.hpp"

#include <cmath>
#include <string>

#include "cincgan/errors.hpp"

namespace F = torch::nn::functional;

namespace cincgan::nn {

namespace {

void require_even_channels(const torch::Tensor& x, const char* who) {
  if (x.dim() != 4 || x.size(1) % 2 != 0)
    throw ShapeError(std::string(who) + ": expected (B, 2C, T, F) complex map, got " +
                     c10::str(x.sizes()));
}

torch::Tensor add_bias(const torch::Tensor& y, const torch::Tensor& b) {
  return b.defined() ? y + b.view({1, -1, 1, 1}) : y;
}

}  // namespace

torch::Tensor real_part(const torch::Tensor& x) {
  require_even_channels(x, "real_part");
  return x.narrow(1, 0, x.size(1) / 2);
}

torch::Tensor imag_part(const torch::Tensor& x) {
  require_even_channels(x, "imag_part");
  return x.narrow(1, x.size(1) / 2, x.size(1) / 2);
}

torch::Tensor make_complex(const torch::Tensor& re, const torch::Tensor& im) {
  return torch::cat({re, im}, 1);
}

torch::Tensor complex_cat(const torch::Tensor& a, const torch::Tensor& b) {
  return torch::cat({real_part(a), real_part(b), imag_part(a), imag_part(b)}, 1);
}

torch::Tensor complex_mul(const torch::Tensor& a, const torch::Tensor& b) {
  const auto ar = real_part(a), ai = imag_part(a), br = real_part(b), bi = imag_part(b);
  return make_complex(ar * br - ai * bi, ar * bi + ai * br);
}

int64_t conv_output_size(int64_t in, int64_t kernel, int64_t stride, int64_t padding) {
  return (in + 2 * padding - kernel) / stride + 1;
}

int64_t transposed_output_padding(int64_t in, int64_t target, int64_t kernel, int64_t stride,
                                  int64_t padding) {
  const int64_t base = (in - 1) * stride - 2 * padding + kernel;
  const int64_t op = target - base;
  if (op < 0 || op >= stride)
    throw ShapeError("transposed convolution cannot produce size " + std::to_string(target) +
                     " from " + std::to_string(in));
  return op;
}

torch::Tensor complex_conv2d(const torch::Tensor& x, const torch::Tensor& w_r,
                             const torch::Tensor& w_i, const torch::Tensor& b_r,
                             const torch::Tensor& b_i, const ComplexConvGeometry& geom) {
  require_even_channels(x, "complex_conv2d");
  if (x.size(1) / 2 != w_r.size(1))
    throw ShapeError("complex_conv2d: input has " + std::to_string(x.size(1) / 2) +
                     " complex channels, kernel expects " + std::to_string(w_r.size(1)));
  const auto opts = F::Conv2dFuncOptions().stride(geom.stride).padding(geom.padding);
  const auto xr = real_part(x), xi = imag_part(x);
  auto out_r = F::conv2d(xr, w_r, opts) - F::conv2d(xi, w_i, opts);
  auto out_i = F::conv2d(xr, w_i, opts) + F::conv2d(xi, w_r, opts);
  return make_complex(add_bias(out_r, b_r), add_bias(out_i, b_i));
}

torch::Tensor complex_conv_transpose2d(const torch::Tensor& x, const torch::Tensor& w_r,
                                       const torch::Tensor& w_i, const torch::Tensor& b_r,
                                       const torch::Tensor& b_i, const ComplexConvGeometry& geom) {
  require_even_channels(x, "complex_conv_transpose2d");
  if (x.size(1) / 2 != w_r.size(0))
    throw ShapeError("complex_conv_transpose2d: input has " + std::to_string(x.size(1) / 2) +
                     " complex channels, kernel expects " + std::to_string(w_r.size(0)));
  const auto opts = F::ConvTranspose2dFuncOptions()
                        .stride(geom.stride)
                        .padding(geom.padding)
                        .output_padding(geom.output_padding);
  const auto xr = real_part(x), xi = imag_part(x);
  auto out_r = F::conv_transpose2d(xr, w_r, opts) - F::conv_transpose2d(xi, w_i, opts);
  auto out_i = F::conv_transpose2d(xr, w_i, opts) + F::conv_transpose2d(xi, w_r, opts);
  return make_complex(add_bias(out_r, b_r), add_bias(out_i, b_i));
}

ComplexConv2dImpl::ComplexConv2dImpl(ComplexConv2dOptions options_) : options(options_) {
  const auto [kt, kf] = options.kernel_size();
  if (kt <= 0 || kf <= 0) throw InvalidParameterError("ComplexConv2d: kernel dims must be > 0");
  if (options.stride()[0] < 1 || options.stride()[1] < 1)
    throw InvalidParameterError("ComplexConv2d: strides must be >= 1");
  const std::vector<int64_t> shape =
      options.transposed()
          ? std::vector<int64_t>{options.in_channels(), options.out_channels(), kt, kf}
          : std::vector<int64_t>{options.out_channels(), options.in_channels(), kt, kf};
  w_r = register_parameter("w_r", torch::empty(shape));
  w_i = register_parameter("w_i", torch::empty(shape));
  if (options.bias()) {
    b_r = register_parameter("b_r", torch::empty({options.out_channels()}));
    b_i = register_parameter("b_i", torch::empty({options.out_channels()}));
  }
  reset_parameters();
}

void ComplexConv2dImpl::reset_parameters() {
  torch::NoGradGuard no_grad;
  const auto [kt, kf] = options.kernel_size();
  const int64_t fan_in = (options.transposed() ? options.out_channels() : options.in_channels()) * kt * kf;
  // Uniform bound of a real conv, split between the two parts.
  const double bound = 1.0 / std::sqrt(2.0 * static_cast<double>(fan_in));
  w_r.uniform_(-bound, bound);
  w_i.uniform_(-bound, bound);
  if (options.bias()) {
    b_r.uniform_(-bound, bound);
    b_i.uniform_(-bound, bound);
  }
}

torch::Tensor ComplexConv2dImpl::forward(const torch::Tensor& x, std::optional<Pair> output_size) {
  ComplexConvGeometry geom{options.stride(), options.padding(), {0, 0}};
  if (!options.transposed()) return complex_conv2d(x, w_r, w_i, b_r, b_i, geom);
  if (output_size) {
    const auto [kt, kf] = options.kernel_size();
    geom.output_padding = {
        transposed_output_padding(x.size(2), (*output_size)[0], kt, options.stride()[0],
                                  options.padding()[0]),
        transposed_output_padding(x.size(3), (*output_size)[1], kf, options.stride()[1],
                                  options.padding()[1])};
  }
  return complex_conv_transpose2d(x, w_r, w_i, b_r, b_i, geom);
}

torch::Tensor complex_instance_norm(const torch::Tensor& x, const torch::Tensor& scale,
                                    const torch::Tensor& bias, double eps) {
  require_even_channels(x, "complex_instance_norm");
  auto xr = real_part(x), xi = imag_part(x);
  xr = xr - xr.mean({2, 3}, true);
  xi = xi - xi.mean({2, 3}, true);
  const auto var = (xr.square() + xi.square()).mean({2, 3}, true);
  const auto denom = torch::sqrt(var + eps);
  xr = xr / denom;
  xi = xi / denom;
  if (scale.defined()) {
    const auto s = scale.view({1, -1, 1, 1});
    const auto b = bias.view({1, -1, 1, 1});
    xr = xr * s + b;
    xi = xi * s + b;
  }
  return make_complex(xr, xi);
}

ComplexInstanceNormImpl::ComplexInstanceNormImpl(int64_t channels_, double eps_)
    : channels(channels_), eps(eps_) {
  scale = register_parameter("scale", torch::ones({channels}));
  bias = register_parameter("bias", torch::zeros({channels}));
}

torch::Tensor ComplexInstanceNormImpl::forward(const torch::Tensor& x) {
  if (x.size(1) != 2 * channels)
    throw ShapeError("ComplexInstanceNorm: expected " + std::to_string(channels) +
                     " complex channels");
  return complex_instance_norm(x, scale, bias, eps);
}

ComplexPReLUImpl::ComplexPReLUImpl(int64_t channels, double init) {
  slope = register_parameter("slope", torch::full({channels}, init));
}

torch::Tensor ComplexPReLUImpl::forward(const torch::Tensor& x) {
  if (x.size(1) != 2 * slope.size(0)) throw ShapeError("ComplexPReLU: channel mismatch");
  return torch::prelu(x, slope.repeat({2}));
}

torch::Tensor gated_linear(const torch::Tensor& a, const torch::Tensor& gate) {
  return a * torch::sigmoid(gate);
}

torch::Tensor glu(const torch::Tensor& x, const torch::Tensor& weight, const torch::Tensor& bias) {
  const auto proj = F::conv2d(x, weight, F::Conv2dFuncOptions().bias(bias));
  if (proj.size(1) % 2 != 0) throw ShapeError("glu: projection must have an even channel count");
  const auto halves = proj.chunk(2, 1);
  return gated_linear(halves[0], halves[1]);
}

GluImpl::GluImpl(int64_t channels) {
  proj = register_module("proj", torch::nn::Conv2d(torch::nn::Conv2dOptions(channels, 2 * channels, 1)));
}

torch::Tensor GluImpl::forward(const torch::Tensor& x) { return glu(x, proj->weight, proj->bias); }

}  // namespace cincgan::nn
