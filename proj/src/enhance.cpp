// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/enhance.hpp"

#include "cincgan/checkpoint.hpp"
#include "cincgan/errors.hpp"
#include "cincgan/features.hpp"

namespace cincgan {

namespace {

dsp::MagPhasePair analyse(const dsp::Waveform& noisy, double compression) {
  if (noisy.sample_rate != dsp::kSampleRate)
    throw InvalidInputError("enhance: input must be sampled at 16000 Hz, got " +
                            std::to_string(noisy.sample_rate) + " Hz");
  dsp::validate(noisy);
  return dsp::compress(dsp::stft(noisy), compression);
}

dsp::Waveform synthesise(const torch::Tensor& ri, const dsp::MagPhasePair& reference) {
  dsp::MagPhasePair p = dsp::decouple(spectrogram_from_tensor(ri, reference.signal_length));
  p.compression_exp = reference.compression_exp;
  return dsp::istft(dsp::decompress(p));
}

}  // namespace

dsp::Waveform enhance_magnitude(nn::MagnitudeGenerator& g_mc, const dsp::Waveform& noisy, double compression) {
  const dsp::MagPhasePair mp = analyse(noisy, compression);
  torch::NoGradGuard no_grad;
  g_mc->eval();
  dsp::MagPhasePair out = mp;
  out.mag = plane_from_tensor(g_mc->forward(magnitude_tensor(mp)));
  return dsp::istft(dsp::decompress(out));
}

dsp::Waveform enhance_cascade(nn::MagnitudeGenerator& g_mc, nn::ComplexGenerator& g_cc,
                              const dsp::Waveform& noisy, double compression) {
  const dsp::MagPhasePair mp = analyse(noisy, compression);
  torch::NoGradGuard no_grad;
  g_mc->eval();
  g_cc->eval();
  const auto coarse = couple_tensor(g_mc->forward(magnitude_tensor(mp)), phase_tensor(mp));
  return synthesise(g_cc->forward(coarse), mp);
}

Enhancer::Enhancer(ModelConfig config, nn::MagnitudeGenerator g_mc, std::optional<nn::ComplexGenerator> g_cc)
    : config_(std::move(config)), g_mc_(std::move(g_mc)), g_cc_(std::move(g_cc)) {}

Enhancer Enhancer::from_checkpoint(const std::filesystem::path& path) {
  const Checkpoint ckpt = load_checkpoint(path);
  if (!ckpt.metadata.contains("model")) throw CheckpointError("checkpoint has no model configuration: " + path.string());
  ModelConfig cfg = ModelConfig::from_json(ckpt.metadata.at("model"));
  if (cfg.digest() != ckpt.config_digest)
    throw CheckpointError("checkpoint digest does not match its stored model configuration: " + path.string());

  const std::string mag_prefix = std::string(kMagPrefix) + "G.";
  const std::string cc_prefix = std::string(kComplexPrefix) + "G.";
  if (!ckpt.has_prefix(mag_prefix)) throw CheckpointError("checkpoint has no magnitude generator: " + path.string());
  nn::MagnitudeGenerator g_mc(nn::MagnitudeGeneratorOptions{cfg.mag_channels, cfg.n_atfa});
  load_module(ckpt, mag_prefix, *g_mc);
  std::optional<nn::ComplexGenerator> g_cc;
  if (ckpt.has_prefix(cc_prefix)) {
    g_cc.emplace(nn::ComplexGeneratorOptions{cfg.cc_channels, cfg.n_atfa});
    load_module(ckpt, cc_prefix, **g_cc);
  }
  return Enhancer(std::move(cfg), std::move(g_mc), std::move(g_cc));
}

dsp::Waveform Enhancer::enhance(const dsp::Waveform& noisy) {
  if (g_cc_) return enhance_cascade(g_mc_, *g_cc_, noisy, config_.compression);
  return enhance_magnitude(g_mc_, noisy, config_.compression);
}

}  // namespace cincgan
