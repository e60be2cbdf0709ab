// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/model.hpp"

#include <cstdio>

#include "cincgan/errors.hpp"

namespace cincgan {

namespace {

std::vector<int64_t> quarter(const std::vector<int64_t>& v) {
  std::vector<int64_t> out;
  for (int64_t c : v) out.push_back(c == 1 ? 1 : std::max<int64_t>(c / 4, 1));
  return out;
}

}  // namespace

ModelConfig ModelConfig::toy() {
  ModelConfig c;
  c.mag_channels = quarter(c.mag_channels);
  c.cc_channels = quarter(c.cc_channels);
  c.disc_channels = quarter(c.disc_channels);
  return c;
}

nlohmann::json ModelConfig::to_json() const {
  return {{"mag_channels", mag_channels}, {"cc_channels", cc_channels},
          {"disc_channels", disc_channels}, {"n_atfa", n_atfa},
          {"n_scales", n_scales}, {"compression", compression}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.mag_channels = j.at("mag_channels").get<std::vector<int64_t>>();
    c.cc_channels = j.at("cc_channels").get<std::vector<int64_t>>();
    c.disc_channels = j.at("disc_channels").get<std::vector<int64_t>>();
    c.n_atfa = j.at("n_atfa").get<int64_t>();
    c.n_scales = j.at("n_scales").get<int64_t>();
    c.compression = j.at("compression").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("invalid model config: ") + e.what());
  }
  return c;
}

std::string ModelConfig::digest() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MagnitudeCycleGan make_magnitude_cyclegan(const ModelConfig& cfg) {
  const nn::MagnitudeGeneratorOptions gopt{cfg.mag_channels, cfg.n_atfa};
  const nn::DiscriminatorOptions dopt{1, cfg.disc_channels, cfg.n_scales};
  MagnitudeCycleGan m;
  m.g = nn::MagnitudeGenerator(gopt);
  m.f = nn::MagnitudeGenerator(gopt);
  m.d_x = nn::MultiScaleDiscriminator(dopt);
  m.d_y = nn::MultiScaleDiscriminator(dopt);
  return m;
}

ComplexCycleGan make_complex_cyclegan(const ModelConfig& cfg) {
  const nn::ComplexGeneratorOptions gopt{cfg.cc_channels, cfg.n_atfa};
  const nn::DiscriminatorOptions dopt{2, cfg.disc_channels, cfg.n_scales};
  ComplexCycleGan m;
  m.g = nn::ComplexGenerator(gopt);
  m.f = nn::ComplexGenerator(gopt);
  m.d_x = nn::MultiScaleDiscriminator(dopt);
  m.d_y = nn::MultiScaleDiscriminator(dopt);
  return m;
}

}  // namespace cincgan
