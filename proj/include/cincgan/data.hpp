// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cincgan/dsp.hpp"
#include "json.hpp"

namespace cincgan::data {

// Mean square of a signal.
double power(std::span<const double> x);

// 10 log10(P(clean) / P(noise)).
double snr_db(std::span<const double> clean, std::span<const double> noise);

struct MixResult {
  dsp::Waveform mixture;
  // Scaled noise actually added to the clean signal.
  std::vector<double> noise;
  double noise_gain = 0.0;
  double achieved_snr_db = 0.0;
  std::size_t noise_offset = 0;
};

// clean + g * noise with g = sqrt(P_clean / (P_noise * 10^(snr/10))), powers
// measured over the whole utterance. The noise is read circularly from an
// offset (drawn from rng when given, else 0), which tiles noise shorter than
// the clean signal. Throws InvalidInputError for silent inputs or mismatched
// sample rates.
MixResult mix_at_snr(const dsp::Waveform& clean, const dsp::Waveform& noise, double snr_db,
                     std::mt19937_64* rng = nullptr);

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to the manifest's directory
  double duration = 0.0;
  std::optional<std::string> speaker_id;
};

// Unpaired noisy and clean utterance lists. JSON schema:
//   {"version": 1, "seed": <int>,
//    "noisy": [{"id", "path", "duration", "speaker_id"?}, ...],
//    "clean": [...]}
// In paired mode a noisy entry's clean counterpart is the clean entry with the
// same id.
struct CorpusManifest {
  std::vector<ManifestEntry> noisy;
  std::vector<ManifestEntry> clean;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;

  nlohmann::json to_json() const;
  static CorpusManifest from_json(const nlohmann::json& j, std::filesystem::path base_dir);
  std::filesystem::path resolve(const ManifestEntry& e) const { return base_dir / e.path; }
};

CorpusManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const CorpusManifest& m, const std::filesystem::path& path);

// Lists *.wav in both directories (ids are file stems), paths relative to
// `manifest_dir`.
CorpusManifest scan_corpus(const std::filesystem::path& noisy_dir, const std::filesystem::path& clean_dir,
                           const std::filesystem::path& manifest_dir, std::uint64_t seed);

// Compressed magnitude/phase features of one utterance.
struct Utterance {
  std::string id;
  dsp::MagPhasePair features;
};

Utterance make_utterance(std::string id, const dsp::Waveform& w, double compression = dsp::kCompression);

struct SamplerOptions {
  int64_t crop_frames = 108;
  bool pad_short = true;
  bool paired = false;
};

// Cropped training examples. Magnitudes and phases are (B, 1, T, 257); the
// RI tensors are the compressed-domain complex spectra (B, 2, T, 257).
struct TrainingBatch {
  torch::Tensor noisy_mag, noisy_phase, noisy_ri;
  torch::Tensor clean_mag, clean_phase, clean_ri;
  std::vector<std::string> noisy_ids, clean_ids;
  std::vector<int64_t> noisy_offsets, clean_offsets;
};

// Random crop sampler. Unpaired mode draws a clean utterance whose id differs
// from the noisy one; paired mode uses the same-id clean utterance and the
// same crop offset. Utterances shorter than the crop are reflect-padded in
// time when pad_short is set. The stream is deterministic for a given seed.
class UnpairedSampler {
 public:
  struct Draw {
    std::size_t noisy_index = 0;
    std::size_t clean_index = 0;
    int64_t noisy_offset = 0;
    int64_t clean_offset = 0;
  };

  UnpairedSampler(std::vector<Utterance> noisy, std::vector<Utterance> clean, SamplerOptions options,
                  std::uint64_t seed);
  static UnpairedSampler from_manifest(const CorpusManifest& m, SamplerOptions options,
                                       double compression = dsp::kCompression);

  Draw draw();
  TrainingBatch next(int64_t batch_size);

  const std::vector<Utterance>& noisy() const { return noisy_; }
  const std::vector<Utterance>& clean() const { return clean_; }
  const SamplerOptions& options() const { return options_; }

 private:
  int64_t pick_offset(const Utterance& u);

  std::vector<Utterance> noisy_, clean_;
  SamplerOptions options_;
  std::mt19937_64 rng_;
  std::vector<std::vector<std::size_t>> clean_candidates_;
};

// Crop of `frames` frames starting at `offset` from a (T, F) plane, mirrored
// at the ends when the plane is shorter than the crop.
std::vector<double> crop_plane(const std::vector<double>& plane, std::size_t total_frames,
                               std::size_t bins, int64_t offset, int64_t frames);

// Synthetic corpus: clean signals are voiced-like harmonic tone bursts with
// pauses, noise is low-pass filtered Gaussian noise mixed at the given SNRs.
struct ToyCorpusOptions {
  int n_train = 16;
  int n_test = 4;
  double seconds = 1.5;
  std::uint64_t seed = 1234;
  std::vector<double> snrs_db{0.0, 5.0, 10.0, 15.0};
};

struct ToyPair {
  std::string id;
  dsp::Waveform clean;
  dsp::Waveform noisy;
  double snr_db = 0.0;
};

struct ToyCorpus {
  std::vector<ToyPair> train;
  std::vector<ToyPair> test;
};

dsp::Waveform toy_clean_signal(std::mt19937_64& rng, double seconds);
dsp::Waveform toy_noise_signal(std::mt19937_64& rng, double seconds);
ToyCorpus make_toy_corpus(const ToyCorpusOptions& options);

// Writes {train,test}/{noisy,clean}/<id>.wav and manifest.json (train lists)
// under `dir`; returns the manifest.
CorpusManifest write_toy_corpus(const ToyCorpus& corpus, const std::filesystem::path& dir,
                                std::uint64_t seed);

}  // namespace cincgan::data
