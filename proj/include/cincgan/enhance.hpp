// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <optional>

#include "cincgan/dsp.hpp"
#include "cincgan/generators.hpp"
#include "cincgan/model.hpp"

namespace cincgan {

// compress -> G on the magnitude -> noisy phase -> decompress -> istft.
dsp::Waveform enhance_magnitude(nn::MagnitudeGenerator& g_mc, const dsp::Waveform& noisy,
                                double compression = dsp::kCompression);

// Full cascade: compress -> G_mc -> couple with the noisy phase -> G_cc ->
// decompress -> istft. Output length equals input length.
dsp::Waveform enhance_cascade(nn::MagnitudeGenerator& g_mc, nn::ComplexGenerator& g_cc,
                              const dsp::Waveform& noisy, double compression = dsp::kCompression);

// Forward generators restored from a checkpoint. A stage-1 checkpoint has no
// complex stage and runs the magnitude-only chain.
class Enhancer {
 public:
  Enhancer(ModelConfig config, nn::MagnitudeGenerator g_mc, std::optional<nn::ComplexGenerator> g_cc);
  static Enhancer from_checkpoint(const std::filesystem::path& path);

  // Rejects input that is not at 16 kHz.
  dsp::Waveform enhance(const dsp::Waveform& noisy);

  bool has_complex_stage() const { return g_cc_.has_value(); }
  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  nn::MagnitudeGenerator g_mc_;
  std::optional<nn::ComplexGenerator> g_cc_;
};

}  // namespace cincgan
