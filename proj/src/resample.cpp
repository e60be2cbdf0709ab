// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cincgan/errors.hpp"

namespace cincgan::dsp {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<double> design_resampling_filter(int p, int q) {
  if (p <= 0 || q <= 0) throw InvalidParameterError("resampling factors must be positive");
  constexpr double kRejectionDb = 60.0;
  const double cutoff = 1.0 / (2.0 * std::max(p, q));
  const double roll_off = cutoff / 10.0;
  const auto half = static_cast<long>(std::ceil((kRejectionDb - 8.0) / (28.714 * roll_off)));
  const double beta = 0.1102 * (kRejectionDb - 8.7);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);

  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  const double m = static_cast<double>(h.size() - 1);
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double t = static_cast<double>(n) - static_cast<double>(half);
    const double r = 2.0 * static_cast<double>(n) / m - 1.0;
    const double kaiser = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[n] = kaiser * 2.0 * p * cutoff * sinc(2.0 * cutoff * t);
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> resample_poly(std::span<const double> x, int p, int q) {
  const int g = std::gcd(p, q);
  p /= g;
  q /= g;
  if (p == 1 && q == 1) return {x.begin(), x.end()};
  const std::vector<double> h = design_resampling_filter(p, q);
  const auto half = static_cast<long>((h.size() - 1) / 2);
  const auto n_in = static_cast<long>(x.size());
  const long n_out = (n_in * p + q - 1) / q;
  const auto taps = static_cast<long>(h.size());

  std::vector<double> y(static_cast<std::size_t>(n_out), 0.0);
  for (long m = 0; m < n_out; ++m) {
    // y[m] = p * sum_k x[k] h[m q - k p + half]
    const long centre = m * q + half;
    const long lo_num = centre - (taps - 1);
    const long k_lo = lo_num <= 0 ? 0 : (lo_num + p - 1) / p;
    const long k_hi = std::min(n_in - 1, centre / p);
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      const long idx = centre - k * p;
      if (idx >= 0 && idx < taps) acc += x[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(idx)];
    }
    y[static_cast<std::size_t>(m)] = acc * p;
  }
  return y;
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw InvalidParameterError("target sample rate must be positive");
  Waveform out;
  out.sample_rate = target_rate;
  out.samples = resample_poly(w.samples, target_rate, w.sample_rate);
  return out;
}

}  // namespace cincgan::dsp
