// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <optional>
#include <vector>

#include "cincgan/dsp.hpp"

// Conversions between the dsp containers and network tensors. Network inputs
// are float32 (B, C, T, 257).
namespace cincgan {

// (1, 1, T, F) tensors of the magnitude and phase planes.
torch::Tensor magnitude_tensor(const dsp::MagPhasePair& p);
torch::Tensor phase_tensor(const dsp::MagPhasePair& p);

// (1, 2, T, F) real/imaginary tensor.
torch::Tensor spectrogram_tensor(const dsp::ComplexSpectrogram& s);

// Inverse of spectrogram_tensor for a single item (1, 2, T, F) or (2, T, F).
dsp::ComplexSpectrogram spectrogram_from_tensor(const torch::Tensor& t,
                                                std::optional<std::size_t> signal_length = std::nullopt);

// Flattened (T * F) plane of a (1, 1, T, F) or (T, F) tensor.
std::vector<double> plane_from_tensor(const torch::Tensor& t);

// mag * exp(j * phase) on (B, 1, T, F) tensors, giving (B, 2, T, F).
torch::Tensor couple_tensor(const torch::Tensor& mag, const torch::Tensor& phase);

}  // namespace cincgan
