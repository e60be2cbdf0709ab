// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "cincgan/errors.hpp"
#include "cincgan/fft.hpp"
#include "cincgan/resample.hpp"

namespace cincgan::metrics {

namespace {

void check_pair(const dsp::Waveform& ref, const dsp::Waveform& est, const char* who) {
  if (ref.size() != est.size())
    throw InvalidInputError(std::string(who) + ": reference and estimate lengths differ (" +
                            std::to_string(ref.size()) + " vs " + std::to_string(est.size()) + ")");
  if (ref.sample_rate != est.sample_rate)
    throw InvalidInputError(std::string(who) + ": sample rates differ");
  if (ref.empty()) throw InvalidInputError(std::string(who) + ": empty input");
}

// STOI constants.
constexpr int kStoiRate = 10000;
constexpr std::size_t kFrame = 256;
constexpr std::size_t kFrameHop = 128;
constexpr std::size_t kStoiFft = 512;
constexpr std::size_t kBands = 15;
constexpr double kMinFreq = 150.0;
constexpr std::size_t kSegmentFrames = 30;
constexpr double kBeta = -15.0;
constexpr double kDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Symmetric Hann without the zero end points (MATLAB hanning(n)).
std::vector<double> matlab_hanning(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i + 1) /
                                static_cast<double>(n + 1));
  return w;
}

// Frame starts 0, hop, ... strictly below len - frame.
std::size_t stoi_frame_count(std::size_t len) {
  if (len <= kFrame) return 0;
  return (len - kFrame - 1) / kFrameHop + 1;
}

struct BandMatrix {
  std::array<std::size_t, kBands> lo{};
  std::array<std::size_t, kBands> hi{};
};

BandMatrix third_octave_bands() {
  BandMatrix m;
  const std::size_t nbins = kStoiFft / 2 + 1;
  auto nearest_bin = [&](double freq) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nbins; ++b) {
      const double f = static_cast<double>(b) * kStoiRate / static_cast<double>(kStoiFft);
      const double d = (f - freq) * (f - freq);
      if (d < best_d) {
        best_d = d;
        best = b;
      }
    }
    return best;
  };
  for (std::size_t k = 0; k < kBands; ++k) {
    const double kk = static_cast<double>(k);
    m.lo[k] = nearest_bin(kMinFreq * std::pow(2.0, (2.0 * kk - 1.0) / 6.0));
    m.hi[k] = nearest_bin(kMinFreq * std::pow(2.0, (2.0 * kk + 1.0) / 6.0));
  }
  return m;
}

// Drops frames of both signals where the reference is more than kDynRange dB
// below its loudest frame, then overlap-adds the windowed survivors.
std::pair<std::vector<double>, std::vector<double>> remove_silent_frames(
    const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> w = matlab_hanning(kFrame);
  const std::size_t nframes = stoi_frame_count(x.size());
  std::vector<double> energy(nframes);
  double max_energy = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < nframes; ++t) {
    double e = 0.0;
    for (std::size_t i = 0; i < kFrame; ++i) {
      const double v = w[i] * x[t * kFrameHop + i];
      e += v * v;
    }
    energy[t] = 20.0 * std::log10(std::sqrt(e) + kEps);
    max_energy = std::max(max_energy, energy[t]);
  }
  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < nframes; ++t)
    if (max_energy - kDynRange - energy[t] < 0.0) kept.push_back(t);

  const std::size_t len = kept.empty() ? 0 : (kept.size() - 1) * kFrameHop + kFrame;
  std::vector<double> xs(len, 0.0), ys(len, 0.0);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const std::size_t src = kept[j] * kFrameHop;
    for (std::size_t i = 0; i < kFrame; ++i) {
      xs[j * kFrameHop + i] += w[i] * x[src + i];
      ys[j * kFrameHop + i] += w[i] * y[src + i];
    }
  }
  return {std::move(xs), std::move(ys)};
}

// One-third octave band envelopes, bands x frames (row-major).
std::vector<double> band_envelopes(const std::vector<double>& x, const BandMatrix& bands,
                                   std::size_t& frames_out) {
  const std::vector<double> w = matlab_hanning(kFrame);
  const dsp::RealFft fft(kStoiFft);
  const std::size_t frames = stoi_frame_count(x.size());
  frames_out = frames;
  std::vector<double> tob(kBands * frames, 0.0);
  std::vector<double> buf(kStoiFft, 0.0);
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < kFrame; ++i) buf[i] = w[i] * x[t * kFrameHop + i];
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < kBands; ++k) {
      double e = 0.0;
      for (std::size_t b = bands.lo[k]; b < bands.hi[k]; ++b) e += std::norm(spec[b]);
      tob[k * frames + t] = std::sqrt(e);
    }
  }
  return tob;
}

}  // namespace

double segsnr(const dsp::Waveform& ref, const dsp::Waveform& est, const SegSnrOptions& opts) {
  check_pair(ref, est, "segsnr");
  const std::size_t n = ref.size();
  const std::size_t seg = std::min(opts.segment_length, n);
  const std::size_t count = 1 + (n - seg) / opts.hop;

  std::vector<double> sig(count), err(count);
  double peak = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    double e_sig = 0.0, e_err = 0.0;
    for (std::size_t i = s * opts.hop; i < s * opts.hop + seg; ++i) {
      const double d = ref.samples[i] - est.samples[i];
      e_sig += ref.samples[i] * ref.samples[i];
      e_err += d * d;
    }
    sig[s] = e_sig;
    err[s] = e_err;
    peak = std::max(peak, e_sig);
  }
  if (peak <= 0.0) throw InvalidInputError("segsnr: reference is silent");

  const double gate = peak * std::pow(10.0, opts.gate_db / 10.0);
  double total = 0.0;
  std::size_t active = 0;
  for (std::size_t s = 0; s < count; ++s) {
    if (!(sig[s] > gate)) continue;
    const double snr = err[s] > 0.0 ? 10.0 * std::log10(sig[s] / err[s]) : opts.max_db;
    total += std::clamp(snr, opts.min_db, opts.max_db);
    ++active;
  }
  return total / static_cast<double>(active);
}

double stoi(const dsp::Waveform& ref, const dsp::Waveform& est) {
  check_pair(ref, est, "stoi");
  std::vector<double> x = ref.samples, y = est.samples;
  if (ref.sample_rate != kStoiRate) {
    x = dsp::resample_poly(x, kStoiRate, ref.sample_rate);
    y = dsp::resample_poly(y, kStoiRate, ref.sample_rate);
  }
  auto [xs, ys] = remove_silent_frames(x, y);

  static const BandMatrix bands = third_octave_bands();
  std::size_t frames = 0, frames_y = 0;
  const std::vector<double> xt = band_envelopes(xs, bands, frames);
  const std::vector<double> yt = band_envelopes(ys, bands, frames_y);
  if (frames < kSegmentFrames)
    throw InvalidInputError("stoi: fewer than 30 non-silent frames (signal shorter than one 384 ms analysis window)");

  const double clip = std::pow(10.0, -kBeta / 20.0);
  const std::size_t segments = frames - kSegmentFrames + 1;
  double sum = 0.0;
  std::array<double, kSegmentFrames> xv{}, yv{};
  for (std::size_t m = 0; m < segments; ++m) {
    for (std::size_t k = 0; k < kBands; ++k) {
      double nx = 0.0, ny = 0.0;
      for (std::size_t j = 0; j < kSegmentFrames; ++j) {
        xv[j] = xt[k * frames + m + j];
        yv[j] = yt[k * frames + m + j];
        nx += xv[j] * xv[j];
        ny += yv[j] * yv[j];
      }
      const double alpha = std::sqrt(nx) / (std::sqrt(ny) + kEps);
      double mx = 0.0, my = 0.0;
      for (std::size_t j = 0; j < kSegmentFrames; ++j) {
        yv[j] = std::min(alpha * yv[j], xv[j] * (1.0 + clip));
        mx += xv[j];
        my += yv[j];
      }
      mx /= kSegmentFrames;
      my /= kSegmentFrames;
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (std::size_t j = 0; j < kSegmentFrames; ++j) {
        xv[j] -= mx;
        yv[j] -= my;
        sxx += xv[j] * xv[j];
        syy += yv[j] * yv[j];
      }
      const double dx = std::sqrt(sxx) + kEps;
      const double dy = std::sqrt(syy) + kEps;
      for (std::size_t j = 0; j < kSegmentFrames; ++j) sxy += (xv[j] / dx) * (yv[j] / dy);
      sum += sxy;
    }
  }
  return sum / static_cast<double>(segments * kBands);
}

}  // namespace cincgan::metrics
