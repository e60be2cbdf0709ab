// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <string>
#include <vector>

#include "cincgan/checkpoint.hpp"
#include "cincgan/discriminators.hpp"
#include "cincgan/generators.hpp"
#include "json.hpp"

namespace cincgan {

// Architecture hyper-parameters shared by training and inference. The digest
// of this config is stamped into every checkpoint.
struct ModelConfig {
  std::vector<int64_t> mag_channels{16, 32, 64};
  std::vector<int64_t> cc_channels{32, 32, 64, 64, 128, 128, 256, 256};
  std::vector<int64_t> disc_channels{32, 32, 64, 64, 128, 1};
  int64_t n_atfa = 6;
  int64_t n_scales = 2;
  double compression = 0.5;

  // Every width divided by four (minimum 1; the 1-channel score layer stays).
  static ModelConfig toy();

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  // FNV-1a 64 of the canonical JSON, as 16 hex digits.
  std::string digest() const;
};

// Generators G: X->Y (noisy to clean), F: Y->X, and discriminators D_X, D_Y
// for one domain (magnitude or complex).
template <typename Generator>
struct CycleGan {
  Generator g{nullptr}, f{nullptr};
  nn::MultiScaleDiscriminator d_x{nullptr}, d_y{nullptr};

  std::vector<torch::Tensor> generator_parameters() const {
    auto p = g->parameters();
    auto q = f->parameters();
    p.insert(p.end(), q.begin(), q.end());
    return p;
  }
  std::vector<torch::Tensor> discriminator_parameters() const {
    auto p = d_x->parameters();
    auto q = d_y->parameters();
    p.insert(p.end(), q.begin(), q.end());
    return p;
  }
  void train(bool on = true) {
    g->train(on);
    f->train(on);
    d_x->train(on);
    d_y->train(on);
  }
  void store(Checkpoint& ckpt, const std::string& prefix) const {
    store_module(ckpt, prefix + "G.", *g);
    store_module(ckpt, prefix + "F.", *f);
    store_module(ckpt, prefix + "DX.", *d_x);
    store_module(ckpt, prefix + "DY.", *d_y);
  }
  void load(const Checkpoint& ckpt, const std::string& prefix) {
    load_module(ckpt, prefix + "G.", *g);
    load_module(ckpt, prefix + "F.", *f);
    load_module(ckpt, prefix + "DX.", *d_x);
    load_module(ckpt, prefix + "DY.", *d_y);
  }
};

using MagnitudeCycleGan = CycleGan<nn::MagnitudeGenerator>;
using ComplexCycleGan = CycleGan<nn::ComplexGenerator>;

MagnitudeCycleGan make_magnitude_cyclegan(const ModelConfig& cfg);
ComplexCycleGan make_complex_cyclegan(const ModelConfig& cfg);

inline constexpr const char* kMagPrefix = "mcgan.";
inline constexpr const char* kComplexPrefix = "ccgan.";

}  // namespace cincgan
