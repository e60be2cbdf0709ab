// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/features.hpp"

#include "cincgan/errors.hpp"

namespace cincgan {

namespace {

torch::Tensor plane(const std::vector<double>& v, std::size_t frames, std::size_t bins) {
  auto t = torch::from_blob(const_cast<double*>(v.data()),
                            {1, 1, static_cast<int64_t>(frames), static_cast<int64_t>(bins)},
                            torch::kFloat64);
  return t.to(torch::kFloat32);
}

}  // namespace

torch::Tensor magnitude_tensor(const dsp::MagPhasePair& p) { return plane(p.mag, p.frames, p.bins); }

torch::Tensor phase_tensor(const dsp::MagPhasePair& p) { return plane(p.phase, p.frames, p.bins); }

torch::Tensor spectrogram_tensor(const dsp::ComplexSpectrogram& s) {
  auto t = torch::from_blob(const_cast<double*>(s.ri.data()),
                            {1, 2, static_cast<int64_t>(s.frames), static_cast<int64_t>(s.bins)},
                            torch::kFloat64);
  return t.to(torch::kFloat32);
}

dsp::ComplexSpectrogram spectrogram_from_tensor(const torch::Tensor& t,
                                                std::optional<std::size_t> signal_length) {
  auto x = t.detach();
  if (x.dim() == 4) {
    if (x.size(0) != 1) throw ShapeError("spectrogram_from_tensor: batch size must be 1");
    x = x.squeeze(0);
  }
  if (x.dim() != 3 || x.size(0) != 2)
    throw ShapeError("spectrogram_from_tensor: expected (2, T, F), got " + c10::str(t.sizes()));
  x = x.to(torch::kFloat64).contiguous();
  dsp::ComplexSpectrogram s(static_cast<std::size_t>(x.size(1)), static_cast<std::size_t>(x.size(2)));
  std::copy(x.data_ptr<double>(), x.data_ptr<double>() + x.numel(), s.ri.begin());
  s.signal_length = signal_length;
  return s;
}

std::vector<double> plane_from_tensor(const torch::Tensor& t) {
  auto x = t.detach().to(torch::kFloat64).contiguous();
  if (x.dim() == 4 && (x.size(0) != 1 || x.size(1) != 1))
    throw ShapeError("plane_from_tensor: expected a single plane");
  return {x.data_ptr<double>(), x.data_ptr<double>() + x.numel()};
}

torch::Tensor couple_tensor(const torch::Tensor& mag, const torch::Tensor& phase) {
  if (mag.sizes() != phase.sizes()) throw ShapeError("couple: magnitude and phase shapes differ");
  return torch::cat({mag * torch::cos(phase), mag * torch::sin(phase)}, 1);
}

}  // namespace cincgan
