// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "cincgan/errors.hpp"
#include "cincgan/wav.hpp"

namespace cincgan::data {

namespace fs = std::filesystem;

double power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double snr_db(std::span<const double> clean, std::span<const double> noise) {
  const double pn = power(noise);
  if (pn <= 0.0) throw InvalidInputError("snr: noise is silent");
  return 10.0 * std::log10(power(clean) / pn);
}

MixResult mix_at_snr(const dsp::Waveform& clean, const dsp::Waveform& noise, double target_db,
                     std::mt19937_64* rng) {
  if (clean.sample_rate != noise.sample_rate)
    throw InvalidInputError("mix_at_snr: clean and noise sample rates differ");
  if (clean.empty() || noise.empty()) throw InvalidInputError("mix_at_snr: empty input");
  const double p_clean = power(clean.samples);
  if (p_clean <= 0.0) throw InvalidInputError("mix_at_snr: clean signal is silent, SNR undefined");

  MixResult r;
  r.noise_offset = rng ? std::uniform_int_distribution<std::size_t>(0, noise.size() - 1)(*rng) : 0;
  std::vector<double> segment(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    segment[i] = noise.samples[(r.noise_offset + i) % noise.size()];
  const double p_noise = power(segment);
  if (p_noise <= 0.0) throw InvalidInputError("mix_at_snr: noise signal is silent, SNR undefined");

  r.noise_gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, target_db / 10.0)));
  r.mixture.sample_rate = clean.sample_rate;
  r.mixture.samples.resize(clean.size());
  r.noise.resize(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    r.noise[i] = r.noise_gain * segment[i];
    r.mixture.samples[i] = clean.samples[i] + r.noise[i];
  }
  r.achieved_snr_db = snr_db(clean.samples, r.noise);
  return r;
}

nlohmann::json CorpusManifest::to_json() const {
  auto entries = [](const std::vector<ManifestEntry>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : list) {
      nlohmann::json j{{"id", e.id}, {"path", e.path}, {"duration", e.duration}};
      if (e.speaker_id) j["speaker_id"] = *e.speaker_id;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  return {{"version", 1}, {"seed", seed}, {"noisy", entries(noisy)}, {"clean", entries(clean)}};
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j, fs::path base) {
  CorpusManifest m;
  m.base_dir = std::move(base);
  auto entries = [](const nlohmann::json& arr) {
    std::vector<ManifestEntry> list;
    for (const auto& item : arr) {
      ManifestEntry e;
      e.path = item.at("path").get<std::string>();
      e.id = item.contains("id") ? item.at("id").get<std::string>() : fs::path(e.path).stem().string();
      e.duration = item.value("duration", 0.0);
      if (item.contains("speaker_id") && !item.at("speaker_id").is_null())
        e.speaker_id = item.at("speaker_id").get<std::string>();
      list.push_back(std::move(e));
    }
    return list;
  };
  try {
    m.seed = j.value("seed", std::uint64_t{0});
    m.noisy = entries(j.at("noisy"));
    m.clean = entries(j.at("clean"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("invalid manifest: ") + e.what());
  }
  return m;
}

CorpusManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("manifest is not valid JSON (" + path.string() + "): " + e.what());
  }
  return CorpusManifest::from_json(j, path.parent_path());
}

void save_manifest(const CorpusManifest& m, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << m.to_json().dump(2) << "\n";
}

CorpusManifest scan_corpus(const fs::path& noisy_dir, const fs::path& clean_dir,
                           const fs::path& manifest_dir, std::uint64_t seed) {
  auto scan = [&](const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<ManifestEntry> list;
    for (const auto& f : files) {
      const dsp::Waveform w = io::read_wav(f);
      ManifestEntry e;
      e.id = f.stem().string();
      e.path = fs::relative(fs::absolute(f), fs::absolute(manifest_dir)).generic_string();
      e.duration = static_cast<double>(w.size()) / w.sample_rate;
      list.push_back(std::move(e));
    }
    return list;
  };
  CorpusManifest m;
  m.seed = seed;
  m.base_dir = manifest_dir;
  m.noisy = scan(noisy_dir);
  m.clean = scan(clean_dir);
  return m;
}

Utterance make_utterance(std::string id, const dsp::Waveform& w, double compression) {
  return Utterance{std::move(id), dsp::compress(dsp::stft(w), compression)};
}

std::vector<double> crop_plane(const std::vector<double>& plane, std::size_t total_frames,
                               std::size_t bins, int64_t offset, int64_t frames) {
  std::vector<double> out(static_cast<std::size_t>(frames) * bins);
  const auto n = static_cast<int64_t>(total_frames);
  for (int64_t t = 0; t < frames; ++t) {
    int64_t src = offset + t;
    if (n == 1) {
      src = 0;
    } else {
      const int64_t period = 2 * (n - 1);
      src %= period;
      if (src < 0) src += period;
      if (src >= n) src = period - src;
    }
    std::copy_n(plane.begin() + src * static_cast<int64_t>(bins), bins,
                out.begin() + t * static_cast<int64_t>(bins));
  }
  return out;
}

UnpairedSampler::UnpairedSampler(std::vector<Utterance> noisy, std::vector<Utterance> clean,
                                 SamplerOptions options, std::uint64_t seed)
    : noisy_(std::move(noisy)), clean_(std::move(clean)), options_(options), rng_(seed) {
  if (noisy_.empty() || clean_.empty())
    throw InvalidInputError("sampler: both noisy and clean lists must be non-empty");
  if (options_.crop_frames < 1) throw InvalidParameterError("sampler: crop length must be positive");
  for (const auto* list : {&noisy_, &clean_})
    for (const auto& u : *list)
      if (!options_.pad_short && static_cast<int64_t>(u.features.frames) < options_.crop_frames)
        throw InvalidInputError("sampler: utterance '" + u.id + "' is shorter than " +
                                std::to_string(options_.crop_frames) + " frames and padding is disabled");

  clean_candidates_.resize(noisy_.size());
  for (std::size_t i = 0; i < noisy_.size(); ++i) {
    for (std::size_t j = 0; j < clean_.size(); ++j) {
      const bool same = clean_[j].id == noisy_[i].id;
      if (options_.paired ? same : !same) clean_candidates_[i].push_back(j);
    }
    if (clean_candidates_[i].empty())
      throw InvalidInputError(options_.paired
                                  ? "sampler: no clean counterpart for noisy utterance '" + noisy_[i].id + "'"
                                  : "sampler: every clean utterance shares the id of '" + noisy_[i].id + "'");
  }
}

UnpairedSampler UnpairedSampler::from_manifest(const CorpusManifest& m, SamplerOptions options,
                                               double compression) {
  auto load = [&](const std::vector<ManifestEntry>& list) {
    std::vector<Utterance> out;
    out.reserve(list.size());
    for (const auto& e : list) out.push_back(make_utterance(e.id, io::load_for_training(m.resolve(e)), compression));
    return out;
  };
  return UnpairedSampler(load(m.noisy), load(m.clean), options, m.seed);
}

int64_t UnpairedSampler::pick_offset(const Utterance& u) {
  const int64_t slack = static_cast<int64_t>(u.features.frames) - options_.crop_frames;
  if (slack <= 0) return 0;
  return std::uniform_int_distribution<int64_t>(0, slack)(rng_);
}

UnpairedSampler::Draw UnpairedSampler::draw() {
  Draw d;
  d.noisy_index = std::uniform_int_distribution<std::size_t>(0, noisy_.size() - 1)(rng_);
  const auto& candidates = clean_candidates_[d.noisy_index];
  d.clean_index = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
  d.noisy_offset = pick_offset(noisy_[d.noisy_index]);
  d.clean_offset = options_.paired ? d.noisy_offset : pick_offset(clean_[d.clean_index]);
  return d;
}

TrainingBatch UnpairedSampler::next(int64_t batch_size) {
  if (batch_size < 1) throw InvalidParameterError("sampler: batch size must be positive");
  const int64_t T = options_.crop_frames;
  const auto bins = static_cast<int64_t>(dsp::kNumBins);
  const auto opts = torch::TensorOptions().dtype(torch::kFloat64);
  auto nm = torch::empty({batch_size, 1, T, bins}, opts), np = torch::empty_like(nm);
  auto cm = torch::empty_like(nm), cp = torch::empty_like(nm);

  TrainingBatch b;
  auto fill = [&](torch::Tensor& dst, int64_t i, const std::vector<double>& src) {
    std::copy(src.begin(), src.end(), dst[i].data_ptr<double>());
  };
  for (int64_t i = 0; i < batch_size; ++i) {
    const Draw d = draw();
    const auto& nu = noisy_[d.noisy_index];
    const auto& cu = clean_[d.clean_index];
    const auto& nf = nu.features;
    const auto& cf = cu.features;
    fill(nm, i, crop_plane(nf.mag, nf.frames, nf.bins, d.noisy_offset, T));
    fill(np, i, crop_plane(nf.phase, nf.frames, nf.bins, d.noisy_offset, T));
    fill(cm, i, crop_plane(cf.mag, cf.frames, cf.bins, d.clean_offset, T));
    fill(cp, i, crop_plane(cf.phase, cf.frames, cf.bins, d.clean_offset, T));
    b.noisy_ids.push_back(nu.id);
    b.clean_ids.push_back(cu.id);
    b.noisy_offsets.push_back(d.noisy_offset);
    b.clean_offsets.push_back(d.clean_offset);
  }
  b.noisy_mag = nm.to(torch::kFloat32);
  b.noisy_phase = np.to(torch::kFloat32);
  b.clean_mag = cm.to(torch::kFloat32);
  b.clean_phase = cp.to(torch::kFloat32);
  b.noisy_ri = torch::cat({nm * torch::cos(np), nm * torch::sin(np)}, 1).to(torch::kFloat32);
  b.clean_ri = torch::cat({cm * torch::cos(cp), cm * torch::sin(cp)}, 1).to(torch::kFloat32);
  return b;
}

dsp::Waveform toy_clean_signal(std::mt19937_64& rng, double seconds) {
  const double fs = dsp::kSampleRate;
  const auto n = static_cast<std::size_t>(seconds * fs);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  dsp::Waveform w;
  w.samples.assign(n, 0.0);
  std::size_t t = static_cast<std::size_t>(uniform(0.03, 0.12) * fs);
  while (t < n) {
    const auto dur = static_cast<std::size_t>(uniform(0.15, 0.4) * fs);
    const double f0 = uniform(120.0, 300.0);
    const double glide = uniform(-0.25, 0.25);
    const int harmonics = 3 + static_cast<int>(unit(rng) * 4.0);
    double phase = 0.0;
    for (std::size_t i = 0; i < dur && t + i < n; ++i) {
      const double tau = static_cast<double>(i) / static_cast<double>(dur);
      const double f = f0 * (1.0 + glide * tau);
      phase += 2.0 * std::numbers::pi * f / fs;
      const double env = std::pow(std::sin(std::numbers::pi * tau), 2.0);
      double v = 0.0;
      for (int h = 1; h <= harmonics; ++h) v += std::sin(h * phase) / h;
      w.samples[t + i] += env * v;
    }
    t += dur + static_cast<std::size_t>(uniform(0.05, 0.15) * fs);
  }
  const double peak = std::abs(*std::max_element(w.samples.begin(), w.samples.end(),
                                                 [](double a, double b) { return std::abs(a) < std::abs(b); }));
  if (peak > 0.0)
    for (double& v : w.samples) v *= 0.5 / peak;
  return w;
}

dsp::Waveform toy_noise_signal(std::mt19937_64& rng, double seconds) {
  const double fs = dsp::kSampleRate;
  const auto n = static_cast<std::size_t>(seconds * fs);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cutoff = 1000.0 + 3000.0 * unit(rng);
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff / fs);
  dsp::Waveform w;
  w.samples.resize(n);
  double state = 0.0;
  for (auto& v : w.samples) {
    state = a * state + (1.0 - a) * gauss(rng);
    v = state;
  }
  const double rms = std::sqrt(power(w.samples));
  for (double& v : w.samples) v *= 0.1 / rms;
  return w;
}

ToyCorpus make_toy_corpus(const ToyCorpusOptions& options) {
  if (options.snrs_db.empty()) throw InvalidParameterError("toy corpus: no SNRs given");
  std::mt19937_64 rng(options.seed);
  ToyCorpus corpus;
  auto make = [&](const std::string& prefix, int count, std::vector<ToyPair>& out) {
    for (int i = 0; i < count; ++i) {
      ToyPair p;
      char id[32];
      std::snprintf(id, sizeof id, "%s%03d", prefix.c_str(), i);
      p.id = id;
      p.clean = toy_clean_signal(rng, options.seconds);
      const dsp::Waveform noise = toy_noise_signal(rng, options.seconds);
      p.snr_db = options.snrs_db[static_cast<std::size_t>(i) % options.snrs_db.size()];
      p.noisy = mix_at_snr(p.clean, noise, p.snr_db, &rng).mixture;
      out.push_back(std::move(p));
    }
  };
  make("train", options.n_train, corpus.train);
  make("test", options.n_test, corpus.test);
  return corpus;
}

CorpusManifest write_toy_corpus(const ToyCorpus& corpus, const fs::path& dir, std::uint64_t seed) {
  CorpusManifest m;
  m.seed = seed;
  m.base_dir = dir;
  auto write = [&](const std::vector<ToyPair>& pairs, const std::string& split, bool record) {
    for (const auto& p : pairs) {
      const std::string noisy = split + "/noisy/" + p.id + ".wav";
      const std::string clean = split + "/clean/" + p.id + ".wav";
      io::write_wav(dir / noisy, p.noisy);
      io::write_wav(dir / clean, p.clean);
      if (!record) continue;
      const double dur = static_cast<double>(p.clean.size()) / p.clean.sample_rate;
      m.noisy.push_back({p.id, noisy, dur, std::nullopt});
      m.clean.push_back({p.id, clean, dur, std::nullopt});
    }
  };
  write(corpus.train, "train", true);
  write(corpus.test, "test", false);
  save_manifest(m, dir / "manifest.json");
  return m;
}

}  // namespace cincgan::data
