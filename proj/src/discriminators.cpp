// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/discriminators.hpp"

#include <cmath>
#include <string>

#include "cincgan/errors.hpp"

namespace F = torch::nn::functional;

namespace cincgan::nn {

namespace {

constexpr double kSnEps = 1e-12;

torch::Tensor l2_normalize(const torch::Tensor& t) { return t / (t.norm() + kSnEps); }

}  // namespace

SNConv2dImpl::SNConv2dImpl(int64_t in, int64_t out, Pair kernel, Pair stride_, Pair padding_,
                           SpectralEstimator estimator_)
    : stride(stride_), padding(padding_), estimator(estimator_) {
  weight = register_parameter("weight", torch::empty({out, in, kernel[0], kernel[1]}));
  bias = register_parameter("bias", torch::empty({out}));
  const double bound = 1.0 / std::sqrt(static_cast<double>(in * kernel[0] * kernel[1]));
  {
    torch::NoGradGuard no_grad;
    weight.uniform_(-bound, bound);
    bias.uniform_(-bound, bound);
  }
  u = register_buffer("u", l2_normalize(torch::randn({out})));
  v = register_buffer("v", l2_normalize(torch::randn({in * kernel[0] * kernel[1]})));
  exact_refresh();
}

void SNConv2dImpl::power_iteration(int64_t steps) {
  torch::NoGradGuard no_grad;
  const auto w = weight.reshape({weight.size(0), -1});
  for (int64_t i = 0; i < steps; ++i) {
    v.copy_(l2_normalize(torch::mv(w.t(), u)));
    u.copy_(l2_normalize(torch::mv(w, v)));
  }
}

void SNConv2dImpl::exact_refresh() {
  torch::NoGradGuard no_grad;
  const auto [U, S, Vh] = torch::linalg_svd(weight.reshape({weight.size(0), -1}), false);
  // Keep the sign convention of the previous vectors so u, v do not flip.
  const auto u_new = U.select(1, 0), v_new = Vh.select(0, 0);
  const double sign = torch::dot(u_new, u).item<double>() < 0.0 ? -1.0 : 1.0;
  u.copy_(u_new * sign);
  v.copy_(v_new * sign);
}

void SNConv2dImpl::refresh() {
  if (estimator == SpectralEstimator::kExact)
    exact_refresh();
  else
    power_iteration(1);
}

torch::Tensor SNConv2dImpl::sigma() const {
  // u and v are updated in place by later forwards; autograd needs snapshots.
  const auto w = weight.reshape({weight.size(0), -1});
  return torch::dot(u.clone(), torch::mv(w, v.clone()));
}

torch::Tensor SNConv2dImpl::normalized_weight() const { return weight / sigma(); }

torch::Tensor SNConv2dImpl::forward(const torch::Tensor& x) {
  if (is_training()) refresh();
  return F::conv2d(x, normalized_weight(), F::Conv2dFuncOptions().bias(bias).stride(stride).padding(padding));
}

ScaleDiscriminatorImpl::ScaleDiscriminatorImpl(int64_t in_channels, const std::vector<int64_t>& channels,
                                               SpectralEstimator estimator) {
  convs = register_module("convs", torch::nn::ModuleList());
  acts = register_module("acts", torch::nn::ModuleList());
  int64_t in = in_channels;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const bool last = i + 1 == channels.size();
    const Pair kernel = last ? Pair{1, 1} : Pair{3, 5};
    const Pair pad = last ? Pair{0, 0} : Pair{1, 2};
    convs->push_back(SNConv2d(in, channels[i], kernel, Pair{1, 2}, pad, estimator));
    if (!last) acts->push_back(torch::nn::PReLU(torch::nn::PReLUOptions().num_parameters(channels[i])));
    in = channels[i];
  }
}

torch::Tensor ScaleDiscriminatorImpl::forward(const torch::Tensor& x) {
  torch::Tensor h = x;
  for (std::size_t i = 0; i < convs->size(); ++i) {
    h = convs[i]->as<SNConv2dImpl>()->forward(h);
    if (i < acts->size()) h = acts[i]->as<torch::nn::PReLUImpl>()->forward(h);
  }
  return h;
}

MultiScaleDiscriminatorImpl::MultiScaleDiscriminatorImpl(DiscriminatorOptions options_)
    : options(std::move(options_)) {
  if (options.n_scales < 1) throw InvalidParameterError("discriminator needs at least one scale");
  if (options.channels.empty() || options.channels.back() != 1)
    throw InvalidParameterError("discriminator must end in a single-channel layer");
  scales = register_module("scales", torch::nn::ModuleList());
  for (int64_t s = 0; s < options.n_scales; ++s)
    scales->push_back(ScaleDiscriminator(options.in_channels, options.channels, options.estimator));
}

std::vector<torch::Tensor> MultiScaleDiscriminatorImpl::scale_inputs(const torch::Tensor& x) const {
  if (x.dim() != 4 || x.size(1) != options.in_channels)
    throw ShapeError("discriminator: expected " + std::to_string(options.in_channels) +
                     " input channels, got " + c10::str(x.sizes()));
  std::vector<torch::Tensor> inputs{x};
  for (int64_t s = 1; s < options.n_scales; ++s)
    inputs.push_back(F::avg_pool2d(inputs.back(), F::AvgPool2dFuncOptions(2)));
  return inputs;
}

std::vector<torch::Tensor> MultiScaleDiscriminatorImpl::forward(const torch::Tensor& x) {
  const auto inputs = scale_inputs(x);
  std::vector<torch::Tensor> scores;
  scores.reserve(inputs.size());
  for (std::size_t s = 0; s < inputs.size(); ++s)
    scores.push_back(scales[s]->as<ScaleDiscriminatorImpl>()->forward(inputs[s]));
  return scores;
}

std::vector<SNConv2d> MultiScaleDiscriminatorImpl::sn_layers() const {
  std::vector<SNConv2d> layers;
  for (const auto& scale : *scales)
    for (const auto& conv : *scale->as<ScaleDiscriminatorImpl>()->convs)
      layers.emplace_back(std::dynamic_pointer_cast<SNConv2dImpl>(conv));
  return layers;
}

}  // namespace cincgan::nn
