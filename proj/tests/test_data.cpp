// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cincgan/data.hpp"
#include "cincgan/dsp.hpp"
#include "cincgan/errors.hpp"
#include "cincgan/wav.hpp"
#include "test_support.hpp"

namespace cincgan::data {
namespace {

namespace fs = std::filesystem;

dsp::Waveform sine(double freq, double amp, std::size_t n, double phase = 0.0) {
  dsp::Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.samples[i] = amp * std::sin(2.0 * M_PI * freq * i / 16000.0 + phase);
  return w;
}

dsp::Waveform gaussian(std::mt19937_64& rng, std::size_t n, double sd) {
  std::normal_distribution<double> dist(0.0, sd);
  dsp::Waveform w;
  w.samples.resize(n);
  for (auto& s : w.samples) s = dist(rng);
  return w;
}

// Waveform long enough for exactly `frames` STFT frames.
dsp::Waveform with_frames(std::mt19937_64& rng, std::size_t frames) {
  return gaussian(rng, (frames - 1) * dsp::kHop, 0.1);
}

using testing::TempDir;

TEST(Mixing, EqualPowerAtZeroDbHasUnitGain) {
  const auto clean = sine(440.0, 1.0, 16000);
  const auto noise = sine(440.0, 1.0, 16000, 0.3);
  const auto r = mix_at_snr(clean, noise, 0.0);
  EXPECT_NEAR(r.noise_gain, 1.0, 1e-9);
  const auto r20 = mix_at_snr(clean, noise, 20.0);
  EXPECT_NEAR(r20.noise_gain, 0.1, 1e-9);
  for (std::size_t i = 0; i < clean.size(); i += 997)
    EXPECT_NEAR(r20.mixture.samples[i], clean.samples[i] + 0.1 * noise.samples[i], 1e-12);
}

TEST(Mixing, AchievedSnrWithinTenthOfDecibel) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> amp(0.01, 2.0);
  const std::vector<double> targets{0.0, 5.0, 10.0, 15.0};
  for (int pair = 0; pair < 20; ++pair) {
    const auto clean = sine(100.0 + 37.0 * pair, amp(rng), 16000 + 111 * pair);
    const auto noise = gaussian(rng, 9000 + 500 * pair, amp(rng));
    const double target = targets[pair % 4];
    const auto r = mix_at_snr(clean, noise, target, &rng);
    // Re-measure from the mixture itself.
    std::vector<double> added(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i) added[i] = r.mixture.samples[i] - clean.samples[i];
    EXPECT_NEAR(snr_db(clean.samples, added), target, 0.1) << pair;
    EXPECT_NEAR(r.achieved_snr_db, target, 0.1);
  }
}

TEST(Mixing, ShortNoiseIsTiledCircularly) {
  std::mt19937_64 rng(6);
  const auto clean = sine(300.0, 0.5, 1000);
  const auto noise = gaussian(rng, 300, 1.0);
  const auto r = mix_at_snr(clean, noise, 5.0, &rng);
  ASSERT_EQ(r.mixture.size(), clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    ASSERT_NEAR(r.noise[i], r.noise_gain * noise.samples[(r.noise_offset + i) % noise.size()], 1e-12);
}

TEST(Mixing, SilenceAndRateMismatchAreInvalid) {
  const auto clean = sine(300.0, 0.5, 1000);
  dsp::Waveform silent;
  silent.samples.assign(1000, 0.0);
  EXPECT_THROW(mix_at_snr(clean, silent, 0.0), InvalidInputError);
  EXPECT_THROW(mix_at_snr(silent, clean, 0.0), InvalidInputError);
  auto other = clean;
  other.sample_rate = 8000;
  EXPECT_THROW(mix_at_snr(clean, other, 0.0), InvalidInputError);
}

std::vector<Utterance> utterances(std::mt19937_64& rng, const std::string& prefix,
                                  const std::vector<std::size_t>& frames) {
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < frames.size(); ++i)
    out.push_back(make_utterance(prefix + std::to_string(i), with_frames(rng, frames[i])));
  return out;
}

TEST(Sampler, ReplaysFixedSeedSequence) {
  std::mt19937_64 gen(7);
  // Unpaired draws may pair any noisy with any clean: ids differ by prefix.
  const auto noisy = utterances(gen, "n", {150, 200});
  const auto clean = utterances(gen, "c", {120, 300, 109});
  ASSERT_EQ(noisy[0].features.frames, 150u);
  UnpairedSampler sampler(noisy, clean, SamplerOptions{}, 42);

  // Replay oracle: same engine, same draw order.
  std::mt19937_64 rng(42);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 1)(rng);
    const std::size_t c = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    const int64_t n_off = std::uniform_int_distribution<int64_t>(0, static_cast<int64_t>(noisy[n].features.frames) - 108)(rng);
    const int64_t c_slack = static_cast<int64_t>(clean[c].features.frames) - 108;
    const int64_t c_off = std::uniform_int_distribution<int64_t>(0, c_slack)(rng);
    const auto d = sampler.draw();
    ASSERT_EQ(d.noisy_index, n) << k;
    ASSERT_EQ(d.clean_index, c) << k;
    ASSERT_EQ(d.noisy_offset, n_off) << k;
    ASSERT_EQ(d.clean_offset, c_off) << k;
  }
}

TEST(Sampler, IdenticalSeedsGiveIdenticalBatches) {
  std::mt19937_64 gen(8);
  const auto noisy = utterances(gen, "u", {130, 140, 150});
  const auto clean = utterances(gen, "u", {130, 140, 150});
  UnpairedSampler a(noisy, clean, SamplerOptions{}, 9), b(noisy, clean, SamplerOptions{}, 9);
  for (int k = 0; k < 3; ++k) {
    const auto ba = a.next(4), bb = b.next(4);
    EXPECT_TRUE(torch::equal(ba.noisy_mag, bb.noisy_mag));
    EXPECT_TRUE(torch::equal(ba.clean_ri, bb.clean_ri));
    EXPECT_EQ(ba.noisy_ids, bb.noisy_ids);
    EXPECT_EQ(ba.clean_offsets, bb.clean_offsets);
  }
  UnpairedSampler c(noisy, clean, SamplerOptions{}, 10);
  EXPECT_FALSE(torch::equal(a.next(4).noisy_mag, c.next(4).noisy_mag));
}

TEST(Sampler, UnpairedNeverMatchesIds) {
  std::mt19937_64 gen(11);
  const auto noisy = utterances(gen, "u", {120, 130, 140});
  const auto clean = utterances(gen, "u", {120, 130, 140});
  UnpairedSampler sampler(noisy, clean, SamplerOptions{}, 12);
  for (int k = 0; k < 50; ++k) {
    const auto b = sampler.next(4);
    for (std::size_t i = 0; i < 4; ++i) ASSERT_NE(b.noisy_ids[i], b.clean_ids[i]);
  }
}

TEST(Sampler, UnpairedWithSingleSharedIdIsRejected) {
  std::mt19937_64 gen(13);
  const auto noisy = utterances(gen, "u", {120});
  const auto clean = utterances(gen, "u", {120});
  EXPECT_THROW(UnpairedSampler(noisy, clean, SamplerOptions{}, 0), InvalidInputError);
}

TEST(Sampler, PairedModeUsesAlignedCounterpart) {
  std::mt19937_64 gen(14);
  std::vector<Utterance> noisy, clean;
  for (int i = 0; i < 3; ++i) {
    const auto c = with_frames(gen, 130 + 10 * i);
    auto n = c;
    for (auto& s : n.samples) s *= 2.0;
    noisy.push_back(make_utterance("p" + std::to_string(i), n));
    clean.push_back(make_utterance("p" + std::to_string(i), c));
  }
  SamplerOptions opts;
  opts.paired = true;
  UnpairedSampler sampler(noisy, clean, opts, 15);
  const auto b = sampler.next(6);
  EXPECT_EQ(b.noisy_ids, b.clean_ids);
  EXPECT_EQ(b.noisy_offsets, b.clean_offsets);
  // Noisy is the clean signal doubled: magnitudes scale by 2^c = sqrt(2).
  EXPECT_TRUE(torch::allclose(b.noisy_mag, b.clean_mag * std::sqrt(2.0), 1e-5, 1e-6));
  EXPECT_TRUE(torch::allclose(b.noisy_phase, b.clean_phase, 1e-5, 1e-5));
}

TEST(Sampler, ShortUtteranceIsReflectPadded) {
  std::mt19937_64 gen(16);
  const auto noisy = utterances(gen, "n", {60});
  const auto clean = utterances(gen, "c", {60});
  UnpairedSampler sampler(noisy, clean, SamplerOptions{}, 17);
  const auto b = sampler.next(2);
  EXPECT_EQ(b.noisy_mag.sizes(), (std::vector<int64_t>{2, 1, 108, 257}));
  EXPECT_EQ(b.noisy_offsets[0], 0);
  // Frame 60 mirrors frame 58, frame 61 mirrors 57.
  const auto m = b.noisy_mag[0][0];
  EXPECT_TRUE(torch::equal(m[60], m[58]));
  EXPECT_TRUE(torch::equal(m[61], m[57]));
  EXPECT_TRUE(torch::equal(m[59], torch::tensor(noisy[0].features.mag).view({60, 257})[59].to(torch::kFloat32)));

  SamplerOptions strict;
  strict.pad_short = false;
  EXPECT_THROW(UnpairedSampler(noisy, clean, strict, 0), InvalidInputError);
}

TEST(Sampler, ComplexTensorsMatchPolarFeatures) {
  std::mt19937_64 gen(18);
  const auto noisy = utterances(gen, "n", {120});
  const auto clean = utterances(gen, "c", {125});
  UnpairedSampler sampler(noisy, clean, SamplerOptions{}, 19);
  const auto b = sampler.next(3);
  const auto re = (b.noisy_mag * torch::cos(b.noisy_phase)).squeeze(1);
  const auto im = (b.clean_mag * torch::sin(b.clean_phase)).squeeze(1);
  EXPECT_LT((b.noisy_ri.select(1, 0) - re).abs().max().item<double>(), 1e-5);
  EXPECT_LT((b.clean_ri.select(1, 1) - im).abs().max().item<double>(), 1e-5);
}

TEST(CropPlane, MirrorsBothEnds) {
  // 3 frames x 1 bin: [0, 1, 2] mirrored with period 4: 0 1 2 1 0 1 2 ...
  const std::vector<double> plane{0.0, 1.0, 2.0};
  EXPECT_EQ(crop_plane(plane, 3, 1, 0, 8), (std::vector<double>{0, 1, 2, 1, 0, 1, 2, 1}));
  EXPECT_EQ(crop_plane(plane, 3, 1, 1, 2), (std::vector<double>{1, 2}));
}

TEST(Manifest, RoundTripsThroughJson) {
  TempDir dir;
  CorpusManifest m;
  m.seed = 77;
  m.noisy.push_back({"a", "noisy/a.wav", 1.5, std::string("spk1")});
  m.clean.push_back({"b", "clean/b.wav", 2.0, std::nullopt});
  save_manifest(m, dir.path / "manifest.json");
  const auto back = load_manifest(dir.path / "manifest.json");
  EXPECT_EQ(back.seed, 77u);
  ASSERT_EQ(back.noisy.size(), 1u);
  EXPECT_EQ(back.noisy[0].id, "a");
  EXPECT_EQ(back.noisy[0].speaker_id, std::optional<std::string>("spk1"));
  EXPECT_EQ(back.clean[0].path, "clean/b.wav");
  EXPECT_FALSE(back.clean[0].speaker_id.has_value());
  EXPECT_EQ(back.resolve(back.clean[0]), dir.path / "clean/b.wav");
  EXPECT_EQ(back.to_json(), m.to_json());
}

TEST(Manifest, ScanListsSortedWavFiles) {
  TempDir dir;
  fs::create_directories(dir.path / "n");
  fs::create_directories(dir.path / "c");
  std::mt19937_64 gen(20);
  for (const char* id : {"z", "a", "m"}) {
    io::write_wav(dir.path / "n" / (std::string(id) + ".wav"), gaussian(gen, 1600, 0.1));
    io::write_wav(dir.path / "c" / (std::string(id) + ".wav"), gaussian(gen, 3200, 0.1));
  }
  std::ofstream(dir.path / "n" / "notes.txt") << "x";
  const auto m = scan_corpus(dir.path / "n", dir.path / "c", dir.path, 3);
  ASSERT_EQ(m.noisy.size(), 3u);
  EXPECT_EQ(m.noisy[0].id, "a");
  EXPECT_EQ(m.noisy[2].id, "z");
  EXPECT_EQ(m.noisy[0].path, "n/a.wav");
  EXPECT_NEAR(m.noisy[0].duration, 0.1, 1e-9);
  EXPECT_NEAR(m.clean[0].duration, 0.2, 1e-9);
  const auto sampler = UnpairedSampler::from_manifest(m, SamplerOptions{.crop_frames = 8});
  EXPECT_EQ(sampler.noisy().size(), 3u);
}

TEST(ToyCorpus, DeterministicAndMixedOnTheGrid) {
  ToyCorpusOptions o;
  o.n_train = 8;
  o.n_test = 2;
  o.seconds = 0.5;
  const auto a = make_toy_corpus(o), b = make_toy_corpus(o);
  ASSERT_EQ(a.train.size(), 8u);
  ASSERT_EQ(a.test.size(), 2u);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(a.train[i].noisy.samples, b.train[i].noisy.samples);
    EXPECT_EQ(a.train[i].snr_db, o.snrs_db[i % 4]);
    std::vector<double> noise(a.train[i].clean.size());
    for (std::size_t k = 0; k < noise.size(); ++k) noise[k] = a.train[i].noisy.samples[k] - a.train[i].clean.samples[k];
    EXPECT_NEAR(snr_db(a.train[i].clean.samples, noise), a.train[i].snr_db, 0.1);
  }
}

}  // namespace
}  // namespace cincgan::data
