// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cincgan::dsp {

// Real-input DFT of a fixed size backed by FFTW. Plans are created once per
// size and shared; forward/inverse are safe to call from several threads.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // in: size() reals (zero padded by the caller), out: bins() values.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  // Unnormalised inverse: forward followed by inverse scales by size().
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

 private:
  std::size_t size_;
  void* plan_forward_;
  void* plan_inverse_;
};

}  // namespace cincgan::dsp
