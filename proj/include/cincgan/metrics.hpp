// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>

#include "cincgan/dsp.hpp"

namespace cincgan::metrics {

// Segmental SNR settings. Defaults: 32 ms segments with 50% overlap, segments
// whose reference energy is more than 40 dB below the loudest segment are
// skipped, each segment SNR is clamped to [-10, 35] dB.
struct SegSnrOptions {
  std::size_t segment_length = 512;
  std::size_t hop = 256;
  double gate_db = -40.0;
  double min_db = -10.0;
  double max_db = 35.0;
};

// Mean of clamped per-segment 10 log10(sum ref^2 / sum (ref - est)^2) over the
// active segments, in dB. Throws InvalidInputError on length or rate mismatch
// and on an all-silent reference.
double segsnr(const dsp::Waveform& ref, const dsp::Waveform& est, const SegSnrOptions& opts = {});

// Short-time objective intelligibility (Taal et al.): signals are resampled to
// 10 kHz, frames more than 40 dB below the loudest reference frame are removed,
// 15 one-third octave bands from 150 Hz, 30-frame (384 ms) segments, clipped
// normalised correlation. Reference is the first argument.
double stoi(const dsp::Waveform& ref, const dsp::Waveform& est);

}  // namespace cincgan::metrics
