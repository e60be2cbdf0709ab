// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <random>

#include "cincgan/cli.hpp"
#include "cincgan/data.hpp"
#include "cincgan/dsp.hpp"
#include "cincgan/enhance.hpp"
#include "cincgan/errors.hpp"
#include "cincgan/metrics.hpp"
#include "cincgan/training.hpp"
#include "cincgan/wav.hpp"

namespace py = pybind11;
using namespace cincgan;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

dsp::Waveform to_waveform(const Array& a, int sample_rate) {
  if (a.ndim() != 1) throw InvalidInputError("expected a 1-D waveform");
  dsp::Waveform w;
  w.samples.assign(a.data(), a.data() + a.size());
  w.sample_rate = sample_rate;
  return w;
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ComplexArray to_complex(const dsp::ComplexSpectrogram& s) {
  ComplexArray out({static_cast<py::ssize_t>(s.frames), static_cast<py::ssize_t>(s.bins)});
  auto* p = out.mutable_data();
  for (std::size_t t = 0; t < s.frames; ++t)
    for (std::size_t f = 0; f < s.bins; ++f) p[t * s.bins + f] = {s.re(t, f), s.im(t, f)};
  return out;
}

dsp::ComplexSpectrogram from_complex(const ComplexArray& a, std::optional<std::size_t> length) {
  if (a.ndim() != 2) throw InvalidInputError("expected a 2-D (frames, bins) spectrogram");
  dsp::ComplexSpectrogram s(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  const auto* p = a.data();
  for (std::size_t t = 0; t < s.frames; ++t)
    for (std::size_t f = 0; f < s.bins; ++f) {
      s.re(t, f) = p[t * s.bins + f].real();
      s.im(t, f) = p[t * s.bins + f].imag();
    }
  s.signal_length = length;
  return s;
}

}  // namespace

PYBIND11_MODULE(_cincgan, m) {
  m.doc() = "Cycle-in-cycle GAN speech enhancement";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());
  py::register_exception<InvalidParameterError>(m, "InvalidParameterError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<CheckpointError>(m, "CheckpointError", base.ptr());
  py::register_exception<TrainingError>(m, "TrainingError", base.ptr());

  m.attr("SAMPLE_RATE") = dsp::kSampleRate;
  m.attr("FFT_SIZE") = dsp::kFftSize;
  m.attr("HOP") = dsp::kHop;
  m.attr("NUM_BINS") = dsp::kNumBins;

  m.def(
      "stft", [](const Array& x) { return to_complex(dsp::stft(to_waveform(x, dsp::kSampleRate))); },
      py::arg("x"), "Complex STFT of a 16 kHz waveform, shape (frames, 257).");
  m.def(
      "istft",
      [](const ComplexArray& s, std::optional<std::size_t> length) {
        return to_array(dsp::istft(from_complex(s, length)).samples);
      },
      py::arg("spec"), py::arg("length") = py::none(),
      "Inverse STFT. Without length the full overlap-add span is returned.");
  m.def(
      "compress",
      [](const ComplexArray& s, double c) {
        auto p = dsp::compress(from_complex(s, std::nullopt), c);
        Array mag({static_cast<py::ssize_t>(p.frames), static_cast<py::ssize_t>(p.bins)});
        Array phase({static_cast<py::ssize_t>(p.frames), static_cast<py::ssize_t>(p.bins)});
        std::copy(p.mag.begin(), p.mag.end(), mag.mutable_data());
        std::copy(p.phase.begin(), p.phase.end(), phase.mutable_data());
        return py::make_tuple(mag, phase);
      },
      py::arg("spec"), py::arg("c") = dsp::kCompression);
  m.def(
      "decompress",
      [](const Array& mag, const Array& phase, double c) {
        if (mag.ndim() != 2 || phase.ndim() != 2 || mag.shape(0) != phase.shape(0) ||
            mag.shape(1) != phase.shape(1))
          throw ShapeError("mag and phase must be 2-D with equal shapes");
        dsp::MagPhasePair p;
        p.frames = static_cast<std::size_t>(mag.shape(0));
        p.bins = static_cast<std::size_t>(mag.shape(1));
        p.mag.assign(mag.data(), mag.data() + mag.size());
        p.phase.assign(phase.data(), phase.data() + phase.size());
        p.compression_exp = c;
        return to_complex(dsp::decompress(p));
      },
      py::arg("mag"), py::arg("phase"), py::arg("c") = dsp::kCompression);

  m.def(
      "mix_at_snr",
      [](const Array& clean, const Array& noise, double snr_db, std::optional<std::uint64_t> seed) {
        std::optional<std::mt19937_64> rng;
        if (seed) rng.emplace(*seed);
        auto r = data::mix_at_snr(to_waveform(clean, dsp::kSampleRate), to_waveform(noise, dsp::kSampleRate),
                                  snr_db, rng ? &*rng : nullptr);
        py::dict d;
        d["mixture"] = to_array(r.mixture.samples);
        d["noise"] = to_array(r.noise);
        d["noise_gain"] = r.noise_gain;
        d["achieved_snr_db"] = r.achieved_snr_db;
        d["noise_offset"] = r.noise_offset;
        return d;
      },
      py::arg("clean"), py::arg("noise"), py::arg("snr_db"), py::arg("seed") = py::none());

  m.def(
      "segsnr",
      [](const Array& ref, const Array& est, int sr) {
        return metrics::segsnr(to_waveform(ref, sr), to_waveform(est, sr));
      },
      py::arg("ref"), py::arg("est"), py::arg("sample_rate") = dsp::kSampleRate);
  m.def(
      "stoi",
      [](const Array& ref, const Array& est, int sr) {
        return metrics::stoi(to_waveform(ref, sr), to_waveform(est, sr));
      },
      py::arg("ref"), py::arg("est"), py::arg("sample_rate") = dsp::kSampleRate);

  m.def(
      "read_wav",
      [](const std::filesystem::path& path) {
        auto w = io::read_wav(path);
        return py::make_tuple(to_array(w.samples), w.sample_rate);
      },
      py::arg("path"), "Returns (samples, sample_rate).");
  m.def(
      "write_wav",
      [](const std::filesystem::path& path, const Array& x, int sr, const std::string& format) {
        io::WavFormat f;
        if (format == "float32") f = io::WavFormat::kFloat32;
        else if (format == "pcm16") f = io::WavFormat::kPcm16;
        else throw InvalidParameterError("format must be float32 or pcm16");
        io::write_wav(path, to_waveform(x, sr), f);
      },
      py::arg("path"), py::arg("x"), py::arg("sample_rate") = dsp::kSampleRate,
      py::arg("format") = "float32");

  m.def("learning_rate", &training::learning_rate, py::arg("base"), py::arg("epoch"),
        py::arg("decay_start"), py::arg("total"));

  py::class_<Enhancer>(m, "Enhancer")
      .def_static("from_checkpoint", &Enhancer::from_checkpoint, py::arg("path"))
      .def(
          "enhance",
          [](Enhancer& e, const Array& x) {
            dsp::Waveform w = to_waveform(x, dsp::kSampleRate);
            {
              py::gil_scoped_release release;
              w = e.enhance(w);
            }
            return to_array(w.samples);
          },
          py::arg("x"), "Enhance a 16 kHz waveform; output has the input length.")
      .def_property_readonly("has_complex_stage", &Enhancer::has_complex_stage);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "cincgan");
        py::gil_scoped_release release;
        return cli::run(args);
      },
      py::arg("args"), "Run a command-line invocation in-process; returns the exit code.");
}
