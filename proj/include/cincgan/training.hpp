// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cincgan/data.hpp"
#include "cincgan/dsp.hpp"
#include "cincgan/losses.hpp"
#include "cincgan/model.hpp"
#include "json.hpp"

namespace cincgan::training {

enum class Stage { kPretrain, kFinetune };
enum class CycleVariant { kI, kII, kIII, kIV };

std::string to_string(Stage s);
std::string to_string(CycleVariant v);
Stage parse_stage(const std::string& s);
CycleVariant parse_variant(const std::string& s);

// Which cycles of the cascade contribute losses. fc = noisy->clean->noisy,
// bc = clean->noisy->clean; mag = magnitude network, cc = complex network.
struct CycleWiring {
  bool mag_fc = true;
  bool mag_bc = true;
  bool cc_fc = true;
  bool cc_bc = true;

  // I: fc only. II: I + magnitude bc. III: I + complex bc. IV: everything.
  static CycleWiring for_variant(CycleVariant v);
  bool operator==(const CycleWiring&) const = default;
};

struct TrainConfig {
  Stage stage = Stage::kPretrain;
  CycleVariant cycle_variant = CycleVariant::kIV;
  double lr_g = 5e-4;
  double lr_d = 2e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int decay_start_epoch = 40;
  int total_epochs = 100;
  int batch_size = 4;
  std::uint64_t seed = 0;
  // 0: one pass over the noisy list per epoch.
  int64_t steps_per_epoch = 0;
  // 0: no limit. Stops mid-epoch when reached.
  int64_t max_steps = 0;
  int64_t crop_frames = 108;
  losses::LossWeights weights;
  ModelConfig model;
  std::filesystem::path out_dir = "runs";

  // Defaults per stage (fine-tuning uses 2e-4 for every network).
  static TrainConfig defaults(Stage stage);
  // Quartered widths, 5 epochs, 100 steps per epoch, no decay.
  static TrainConfig toy(Stage stage);

  void validate() const;
  nlohmann::json to_json() const;
};

// Linear decay to zero between decay_start and total epochs; constant before.
double learning_rate(double base, int epoch, int decay_start, int total);

struct StepRecord {
  int64_t step = 0;
  int epoch = 0;
  double lr_g = 0.0;
  double lr_d = 0.0;
  std::map<std::string, double> values;

  nlohmann::json to_json() const;
};

// Noisy/clean pairs scored with SegSNR after every epoch to pick the best
// checkpoint.
struct ValidationPair {
  std::string id;
  dsp::Waveform noisy;
  dsp::Waveform clean;
};

struct TrainResult {
  std::vector<StepRecord> log;
  std::vector<double> validation_segsnr;  // one per epoch when validation data exist
  std::filesystem::path last_checkpoint;
  std::optional<std::filesystem::path> best_checkpoint;
  double best_segsnr = 0.0;
  int64_t steps = 0;
};

// Called after every step; returning false stops training early.
using StepCallback = std::function<bool(const StepRecord&)>;

// Stage 1: magnitude CycleGAN alone. Writes <out_dir>/train_log.jsonl,
// last.ckpt every epoch and best.ckpt by validation SegSNR. A non-finite
// loss writes nan_snapshot.ckpt and throws TrainingError.
TrainResult pretrain_mcgan(const TrainConfig& config, data::UnpairedSampler& sampler,
                           const std::vector<ValidationPair>& validation = {},
                           const StepCallback& callback = {});

// Stage-2 starting point: magnitude networks loaded from a stage-1
// checkpoint (digest must match config.model), complex networks freshly
// initialised from config.seed.
struct CincganNetworks {
  MagnitudeCycleGan mc;
  ComplexCycleGan cc;
};
CincganNetworks init_cincgan(const TrainConfig& config, const std::filesystem::path& mcgan_checkpoint);

// Stage 2: joint fine-tuning of the magnitude and complex CycleGANs, the
// magnitude networks initialised from a stage-1 checkpoint whose model digest
// must match config.model.
TrainResult finetune_cincgan(const TrainConfig& config, data::UnpairedSampler& sampler,
                             const std::filesystem::path& mcgan_checkpoint,
                             const std::vector<ValidationPair>& validation = {},
                             const StepCallback& callback = {});

// Reads a JSON-lines training log.
std::vector<StepRecord> read_log(const std::filesystem::path& path);

}  // namespace cincgan::training
