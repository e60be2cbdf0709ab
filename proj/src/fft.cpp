// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "cincgan/errors.hpp"

namespace cincgan::dsp {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// FFTW's planner is not thread-safe, execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const int size = static_cast<int>(n);
  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(size, real, cplx, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_1d(size, cplx, real, FFTW_ESTIMATE);
  fftw_free(real);
  fftw_free(cplx);
  cache.emplace(n, p);
  return p;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2) throw InvalidParameterError("RealFft: size must be >= 2");
  PlanPair p = plans_for(size);
  plan_forward_ = p.forward;
  plan_inverse_ = p.inverse;
}

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() != size_ || out.size() != bins())
    throw ShapeError("RealFft::forward: buffer size mismatch");
  std::unique_ptr<double, FftwDeleter> buf(fftw_alloc_real(size_));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(fftw_alloc_complex(bins()));
  std::copy(in.begin(), in.end(), buf.get());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_forward_), buf.get(), spec.get());
  for (std::size_t k = 0; k < bins(); ++k) out[k] = {spec.get()[k][0], spec.get()[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (in.size() != bins() || out.size() != size_)
    throw ShapeError("RealFft::inverse: buffer size mismatch");
  std::unique_ptr<double, FftwDeleter> buf(fftw_alloc_real(size_));
  std::unique_ptr<fftw_complex, FftwDeleter> spec(fftw_alloc_complex(bins()));
  for (std::size_t k = 0; k < bins(); ++k) {
    spec.get()[k][0] = in[k].real();
    spec.get()[k][1] = in[k].imag();
  }
  // c2r destroys its input; spec is a scratch copy.
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inverse_), spec.get(), buf.get());
  std::copy(buf.get(), buf.get() + size_, out.begin());
}

}  // namespace cincgan::dsp
