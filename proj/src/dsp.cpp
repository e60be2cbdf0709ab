// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "cincgan/errors.hpp"
#include "cincgan/fft.hpp"

namespace cincgan::dsp {

namespace {

// Index into a signal of length n extended by whole-sample symmetric
// reflection (numpy "reflect" mode), valid for any offset.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

void check_bins(const ComplexSpectrogram& s, const char* who) {
  if (s.bins != kNumBins)
    throw ShapeError(std::string(who) + ": expected " + std::to_string(kNumBins) +
                     " frequency bins, got " + std::to_string(s.bins));
  if (s.ri.size() != 2 * s.frames * s.bins)
    throw ShapeError(std::string(who) + ": storage does not match frames x bins");
}

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate <= 0) throw InvalidInputError("waveform sample rate must be positive");
  for (double v : w.samples)
    if (!std::isfinite(v)) throw InvalidInputError("waveform contains non-finite samples");
}

ComplexSpectrogram::ComplexSpectrogram(std::size_t frames_, std::size_t bins_)
    : frames(frames_), bins(bins_), ri(2 * frames_ * bins_, 0.0) {}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(length));
  return w;
}

std::size_t frame_count(std::size_t length) { return 1 + length / kHop; }

ComplexSpectrogram stft(const Waveform& w) {
  if (w.empty()) throw InvalidInputError("stft: empty waveform");
  if (w.sample_rate != kSampleRate)
    throw InvalidInputError("stft: expected 16000 Hz input, got " +
                            std::to_string(w.sample_rate));
  validate(w);

  static const std::vector<double> window = hann_window(kWindowLength);
  const RealFft fft(kFftSize);
  const std::size_t n = w.size();
  const std::size_t frames = frame_count(n);
  const auto pad = static_cast<std::ptrdiff_t>(kWindowLength / 2);

  ComplexSpectrogram out(frames, kNumBins);
  out.signal_length = n;
  std::vector<double> frame(kFftSize);
  std::vector<std::complex<double>> spec(kNumBins);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto start = static_cast<std::ptrdiff_t>(t * kHop) - pad;
    for (std::size_t k = 0; k < kWindowLength; ++k)
      frame[k] = w.samples[reflect_index(start + static_cast<std::ptrdiff_t>(k), n)] * window[k];
    fft.forward(frame, spec);
    for (std::size_t f = 0; f < kNumBins; ++f) {
      out.re(t, f) = spec[f].real();
      out.im(t, f) = spec[f].imag();
    }
  }
  return out;
}

Waveform istft(const ComplexSpectrogram& s) {
  check_bins(s, "istft");
  Waveform out;
  if (s.frames == 0) return out;

  static const std::vector<double> window = hann_window(kWindowLength);
  const RealFft fft(kFftSize);
  const std::size_t span = kWindowLength + (s.frames - 1) * kHop;
  std::vector<double> acc(span, 0.0), norm(span, 0.0);
  std::vector<std::complex<double>> spec(kNumBins);
  std::vector<double> frame(kFftSize);
  const double scale = 1.0 / static_cast<double>(kFftSize);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t f = 0; f < kNumBins; ++f) spec[f] = {s.re(t, f), s.im(t, f)};
    // DC and Nyquist bins of a real signal carry no imaginary part.
    spec.front().imag(0.0);
    spec.back().imag(0.0);
    fft.inverse(spec, frame);
    const std::size_t offset = t * kHop;
    for (std::size_t k = 0; k < kWindowLength; ++k) {
      acc[offset + k] += frame[k] * scale * window[k];
      norm[offset + k] += window[k] * window[k];
    }
  }
  for (std::size_t i = 0; i < span; ++i) acc[i] = norm[i] > 1e-10 ? acc[i] / norm[i] : 0.0;

  if (s.signal_length) {
    const std::size_t pad = kWindowLength / 2;
    const std::size_t len = *s.signal_length;
    out.samples.assign(len, 0.0);
    for (std::size_t i = 0; i < len && pad + i < span; ++i) out.samples[i] = acc[pad + i];
  } else {
    out.samples = std::move(acc);
  }
  return out;
}

MagPhasePair compress(const ComplexSpectrogram& s, double c) {
  if (!(c > 0.0) || c > 1.0)
    throw InvalidParameterError("compress: exponent must lie in (0, 1], got " + std::to_string(c));
  MagPhasePair p = decouple(s);
  for (double& m : p.mag) m = std::pow(m, c);
  p.compression_exp = c;
  return p;
}

ComplexSpectrogram decompress(const MagPhasePair& p) {
  if (!(p.compression_exp > 0.0) || p.compression_exp > 1.0)
    throw InvalidParameterError("decompress: invalid compression exponent");
  std::vector<double> mag(p.mag.size());
  const double inv = 1.0 / p.compression_exp;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    if (p.mag[i] < 0.0 || !std::isfinite(p.mag[i]))
      throw InvariantError("decompress: magnitude must be finite and non-negative");
    mag[i] = std::pow(p.mag[i], inv);
  }
  ComplexSpectrogram s = couple(mag, p.phase, p.frames, p.bins);
  s.signal_length = p.signal_length;
  return s;
}

MagPhasePair decouple(const ComplexSpectrogram& s) {
  if (s.ri.size() != 2 * s.frames * s.bins)
    throw ShapeError("decouple: storage does not match frames x bins");
  MagPhasePair p;
  p.frames = s.frames;
  p.bins = s.bins;
  p.signal_length = s.signal_length;
  const std::size_t n = s.frames * s.bins;
  p.mag.resize(n);
  p.phase.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = s.ri[i];
    const double im = s.ri[n + i];
    p.mag[i] = std::hypot(re, im);
    p.phase[i] = p.mag[i] == 0.0 ? 0.0 : std::atan2(im, re);
  }
  return p;
}

ComplexSpectrogram couple(std::span<const double> mag, std::span<const double> phase,
                          std::size_t frames, std::size_t bins) {
  const std::size_t n = frames * bins;
  if (mag.size() != n || phase.size() != n)
    throw ShapeError("couple: magnitude and phase must both be frames x bins");
  ComplexSpectrogram s(frames, bins);
  for (std::size_t i = 0; i < n; ++i) {
    s.ri[i] = mag[i] * std::cos(phase[i]);
    s.ri[n + i] = mag[i] * std::sin(phase[i]);
  }
  return s;
}

ComplexSpectrogram couple(const MagPhasePair& p) {
  ComplexSpectrogram s = couple(p.mag, p.phase, p.frames, p.bins);
  s.signal_length = p.signal_length;
  return s;
}

}  // namespace cincgan::dsp
