// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <span>
#include <vector>

#include "cincgan/dsp.hpp"

namespace cincgan::dsp {

// Kaiser-windowed sinc low-pass for a p/q rational rate change (60 dB
// stop-band, cutoff at the lower of the two Nyquist rates). Coefficients are
// normalised to unit sum. p and q must already be reduced.
std::vector<double> design_resampling_filter(int p, int q);

// Polyphase rational resampler: upsample by p, filter, downsample by q.
// Output length is ceil(n * p / q) with the filter group delay removed.
std::vector<double> resample_poly(std::span<const double> x, int p, int q);

// Convenience wrapper converting w to target_rate.
Waveform resample(const Waveform& w, int target_rate);

}  // namespace cincgan::dsp
