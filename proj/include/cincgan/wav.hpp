// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>

#include "cincgan/dsp.hpp"

namespace cincgan::io {

enum class WavFormat { kPcm16, kFloat32 };

// Mono RIFF/WAVE, 16-bit PCM or 32-bit IEEE float. Multi-channel files and
// other encodings raise IoError.
dsp::Waveform read_wav(const std::filesystem::path& path);

// Samples are clipped to [-1, 1] for PCM16 output.
void write_wav(const std::filesystem::path& path, const dsp::Waveform& w,
               WavFormat format = WavFormat::kFloat32);

// Reads a file and resamples it to 16 kHz when needed.
dsp::Waveform load_for_training(const std::filesystem::path& path);

}  // namespace cincgan::io
