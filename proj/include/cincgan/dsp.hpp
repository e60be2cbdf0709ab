// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cincgan::dsp {

inline constexpr int kSampleRate = 16000;
inline constexpr std::size_t kFftSize = 512;
inline constexpr std::size_t kWindowLength = 512;
inline constexpr std::size_t kHop = 128;
inline constexpr std::size_t kNumBins = kFftSize / 2 + 1;  // 257
inline constexpr double kCompression = 0.5;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

// Throws InvalidInputError on non-finite samples or a non-positive rate.
void validate(const Waveform& w);

// Complex spectrum stored as two planes (real, imaginary), each frames x bins,
// row-major. Element (c, t, f) lives at c * frames * bins + t * bins + f.
struct ComplexSpectrogram {
  std::size_t frames = 0;
  std::size_t bins = kNumBins;
  std::size_t hop = kHop;
  std::size_t window_length = kWindowLength;
  // Length of the analysed waveform; lets istft return the original length.
  std::optional<std::size_t> signal_length;
  std::vector<double> ri;

  ComplexSpectrogram() = default;
  ComplexSpectrogram(std::size_t frames, std::size_t bins);

  double& re(std::size_t t, std::size_t f) { return ri[t * bins + f]; }
  double& im(std::size_t t, std::size_t f) { return ri[(frames + t) * bins + f]; }
  double re(std::size_t t, std::size_t f) const { return ri[t * bins + f]; }
  double im(std::size_t t, std::size_t f) const { return ri[(frames + t) * bins + f]; }
};

// Magnitude (possibly power-compressed) and phase planes, frames x bins.
struct MagPhasePair {
  std::size_t frames = 0;
  std::size_t bins = kNumBins;
  std::vector<double> mag;
  std::vector<double> phase;
  double compression_exp = 1.0;
  std::optional<std::size_t> signal_length;
};

// Periodic Hann window of the given length.
std::vector<double> hann_window(std::size_t length);

// Number of frames stft produces for a signal of `length` samples.
std::size_t frame_count(std::size_t length);

// 512-point STFT, periodic Hann, hop 128, reflect-padded by 256 samples at
// both ends so frame t is centred on sample t * 128. Analysis is unnormalised.
ComplexSpectrogram stft(const Waveform& w);

// Weighted overlap-add inverse; divides by the summed squared window. When the
// spectrogram carries signal_length the centring pad is removed and the output
// has exactly that length, otherwise the whole overlap-add span
// (window_length + (frames - 1) * hop samples) is returned.
Waveform istft(const ComplexSpectrogram& s);

// mag = |s|^c, phase = angle(s) (0 for zero-magnitude bins).
MagPhasePair compress(const ComplexSpectrogram& s, double c = kCompression);

// Inverse of compress: (mag^(1/c)) * exp(j * phase).
ComplexSpectrogram decompress(const MagPhasePair& p);

// Magnitude and phase of s with no exponent change.
MagPhasePair decouple(const ComplexSpectrogram& s);

// mag * exp(j * phase), elementwise; stays in whatever domain mag is in.
ComplexSpectrogram couple(std::span<const double> mag, std::span<const double> phase,
                          std::size_t frames, std::size_t bins = kNumBins);
ComplexSpectrogram couple(const MagPhasePair& p);

}  // namespace cincgan::dsp
