// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/training.hpp"

#include <cmath>
#include <fstream>

#include "cincgan/checkpoint.hpp"
#include "cincgan/enhance.hpp"
#include "cincgan/errors.hpp"
#include "cincgan/features.hpp"
#include "cincgan/metrics.hpp"

namespace cincgan::training {

namespace fs = std::filesystem;
using losses::CycleGanTerms;
using losses::mean_l1;
using losses::rals_d_loss;
using losses::rals_g_loss;

std::string to_string(Stage s) { return s == Stage::kPretrain ? "pretrain" : "finetune"; }

std::string to_string(CycleVariant v) {
  switch (v) {
    case CycleVariant::kI: return "I";
    case CycleVariant::kII: return "II";
    case CycleVariant::kIII: return "III";
    case CycleVariant::kIV: return "IV";
  }
  return "IV";
}

Stage parse_stage(const std::string& s) {
  if (s == "pretrain") return Stage::kPretrain;
  if (s == "finetune") return Stage::kFinetune;
  throw InvalidParameterError("unknown stage '" + s + "' (expected pretrain or finetune)");
}

CycleVariant parse_variant(const std::string& s) {
  if (s == "I" || s == "1") return CycleVariant::kI;
  if (s == "II" || s == "2") return CycleVariant::kII;
  if (s == "III" || s == "3") return CycleVariant::kIII;
  if (s == "IV" || s == "4") return CycleVariant::kIV;
  throw InvalidParameterError("unknown cycle variant '" + s + "' (expected I, II, III or IV)");
}

CycleWiring CycleWiring::for_variant(CycleVariant v) {
  switch (v) {
    case CycleVariant::kI: return {true, false, true, false};
    case CycleVariant::kII: return {true, true, true, false};
    case CycleVariant::kIII: return {true, false, true, true};
    case CycleVariant::kIV: return {true, true, true, true};
  }
  return {};
}

TrainConfig TrainConfig::defaults(Stage stage) {
  TrainConfig c;
  c.stage = stage;
  if (stage == Stage::kFinetune) c.lr_g = 2e-4;
  return c;
}

TrainConfig TrainConfig::toy(Stage stage) {
  TrainConfig c = defaults(stage);
  c.model = ModelConfig::toy();
  c.total_epochs = 5;
  c.decay_start_epoch = 5;
  c.steps_per_epoch = 100;
  return c;
}

void TrainConfig::validate() const {
  if (!(lr_g > 0.0) || !(lr_d > 0.0) || !std::isfinite(lr_g) || !std::isfinite(lr_d))
    throw InvalidParameterError("learning rates must be positive and finite");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw InvalidParameterError("Adam betas must lie in [0, 1)");
  if (total_epochs < 1) throw InvalidParameterError("total_epochs must be at least 1");
  if (decay_start_epoch < 0 || decay_start_epoch > total_epochs)
    throw InvalidParameterError("decay_start_epoch must lie in [0, total_epochs]");
  if (batch_size < 1) throw InvalidParameterError("batch_size must be positive");
  if (steps_per_epoch < 0 || max_steps < 0) throw InvalidParameterError("step counts must be non-negative");
  if (crop_frames < 1) throw InvalidParameterError("crop_frames must be positive");
  losses::validate(weights);
}

nlohmann::json TrainConfig::to_json() const {
  return {{"stage", to_string(stage)},
          {"cycle_variant", to_string(cycle_variant)},
          {"lr_g", lr_g},
          {"lr_d", lr_d},
          {"adam_beta1", adam_beta1},
          {"adam_beta2", adam_beta2},
          {"decay_start_epoch", decay_start_epoch},
          {"total_epochs", total_epochs},
          {"id_epochs", weights.id_epochs},
          {"batch_size", batch_size},
          {"seed", seed},
          {"steps_per_epoch", steps_per_epoch},
          {"max_steps", max_steps},
          {"crop_frames", crop_frames},
          {"lambda_cycle", weights.lambda_cycle},
          {"lambda_id", weights.lambda_id},
          {"gamma", weights.gamma},
          {"out_dir", out_dir.string()},
          {"model", model.to_json()}};
}

double learning_rate(double base, int epoch, int decay_start, int total) {
  if (epoch >= total) return 0.0;
  if (epoch < decay_start) return base;
  return base * (1.0 - static_cast<double>(epoch - decay_start) / static_cast<double>(total - decay_start));
}

nlohmann::json StepRecord::to_json() const {
  nlohmann::json j{{"step", step}, {"epoch", epoch}, {"lr_g", lr_g}, {"lr_d", lr_d}};
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

std::vector<StepRecord> read_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open training log: " + path.string());
  std::vector<StepRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    StepRecord r;
    for (const auto& [k, v] : j.items()) {
      if (k == "step") r.step = v.get<int64_t>();
      else if (k == "epoch") r.epoch = v.get<int>();
      else if (k == "lr_g") r.lr_g = v.get<double>();
      else if (k == "lr_d") r.lr_d = v.get<double>();
      else if (v.is_number()) r.values[k] = v.get<double>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

using Params = std::vector<torch::Tensor>;

double value(const torch::Tensor& t) { return t.defined() ? t.item<double>() : 0.0; }

torch::Tensor sum_defined(const torch::Tensor& a, const torch::Tensor& b) {
  if (!a.defined()) return b;
  if (!b.defined()) return a;
  return a + b;
}

void set_requires_grad(const Params& params, bool on) {
  for (auto p : params) p.requires_grad_(on);
}

torch::optim::Adam make_adam(const Params& params, double lr, const TrainConfig& c) {
  return torch::optim::Adam(params, torch::optim::AdamOptions(lr).betas({c.adam_beta1, c.adam_beta2}));
}

void set_lr(torch::optim::Adam& opt, double lr) {
  for (auto& group : opt.param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
}

// Step bookkeeping shared by both stages: log file, NaN guard, checkpoints,
// validation and the step/epoch loop limits.
class Run {
 public:
  Run(const TrainConfig& config, const std::vector<ValidationPair>& validation, const StepCallback& callback)
      : config_(config), validation_(validation), callback_(callback) {
    config.validate();
    fs::create_directories(config.out_dir);
    log_.open(config.out_dir / "train_log.jsonl", std::ios::trunc);
    if (!log_) throw IoError("cannot write training log in " + config.out_dir.string());
  }

  int64_t steps_per_epoch(const data::UnpairedSampler& sampler) const {
    if (config_.steps_per_epoch > 0) return config_.steps_per_epoch;
    const auto n = static_cast<int64_t>(sampler.noisy().size());
    return (n + config_.batch_size - 1) / config_.batch_size;
  }

  bool out_of_steps() const { return config_.max_steps > 0 && result.steps >= config_.max_steps; }

  // Throws after writing a snapshot when any value is not finite.
  template <typename Snapshot>
  void guard(const StepRecord& rec, Snapshot&& snapshot) {
    for (const auto& [name, v] : rec.values) {
      if (std::isfinite(v)) continue;
      Checkpoint ckpt = snapshot();
      ckpt.metadata["diagnostic"] = rec.to_json();
      ckpt.metadata["diagnostic"]["non_finite"] = name;
      const fs::path path = config_.out_dir / "nan_snapshot.ckpt";
      save_checkpoint(ckpt, path);
      throw TrainingError("non-finite loss '" + name + "' at step " + std::to_string(rec.step) + " (epoch " +
                          std::to_string(rec.epoch) + "); snapshot written to " + path.string());
    }
  }

  // Returns false when the callback asks to stop.
  bool record(StepRecord rec) {
    // Infinite/NaN values are not representable in JSON; guard() runs first.
    log_ << rec.to_json().dump() << "\n";
    log_.flush();
    result.log.push_back(rec);
    ++result.steps;
    return !callback_ || callback_(rec);
  }

  template <typename Enhance>
  void end_epoch(Checkpoint ckpt, int epoch, Enhance&& enhance) {
    ckpt.metadata["epoch"] = epoch;
    ckpt.metadata["step"] = result.steps;
    std::optional<double> score;
    if (!validation_.empty()) {
      double acc = 0.0;
      for (const auto& v : validation_) acc += metrics::segsnr(v.clean, enhance(v.noisy));
      score = acc / static_cast<double>(validation_.size());
      result.validation_segsnr.push_back(*score);
      ckpt.metadata["validation_segsnr"] = *score;
    }
    result.last_checkpoint = config_.out_dir / "last.ckpt";
    save_checkpoint(ckpt, result.last_checkpoint);
    if (score && (!result.best_checkpoint || *score > result.best_segsnr)) {
      result.best_segsnr = *score;
      result.best_checkpoint = config_.out_dir / "best.ckpt";
      save_checkpoint(ckpt, *result.best_checkpoint);
    }
  }

  TrainResult result;

 private:
  const TrainConfig& config_;
  const std::vector<ValidationPair>& validation_;
  const StepCallback& callback_;
  std::ofstream log_;
};

Checkpoint base_checkpoint(const TrainConfig& config) {
  Checkpoint ckpt;
  ckpt.config_digest = config.model.digest();
  ckpt.metadata["stage"] = to_string(config.stage);
  ckpt.metadata["model"] = config.model.to_json();
  ckpt.metadata["train"] = config.to_json();
  return ckpt;
}

void put_terms(StepRecord& rec, const std::string& prefix, const CycleGanTerms& t, const torch::Tensor& cycle_fc,
               const torch::Tensor& cycle_bc, const losses::LossWeights& w, int epoch, const torch::Tensor& total) {
  const double id_w = losses::identity_weight(w, epoch);
  rec.values[prefix + "adv_forward"] = value(t.adv_forward);
  rec.values[prefix + "adv_backward"] = value(t.adv_backward);
  rec.values[prefix + "cycle_fc"] = value(cycle_fc);
  rec.values[prefix + "cycle_bc"] = value(cycle_bc);
  rec.values[prefix + "cycle"] = value(t.cycle);
  rec.values[prefix + "identity"] = value(t.identity);
  rec.values[prefix + "identity_weight"] = id_w;
  rec.values[prefix + "identity_contribution"] = id_w * value(t.identity);
  rec.values[prefix + "total"] = value(total);
}

}  // namespace

TrainResult pretrain_mcgan(const TrainConfig& config, data::UnpairedSampler& sampler,
                           const std::vector<ValidationPair>& validation, const StepCallback& callback) {
  if (config.stage != Stage::kPretrain) throw InvalidParameterError("pretrain_mcgan needs stage = pretrain");
  Run run(config, validation, callback);
  torch::manual_seed(config.seed);
  MagnitudeCycleGan mc = make_magnitude_cyclegan(config.model);
  const Params g_params = mc.generator_parameters();
  const Params d_params = mc.discriminator_parameters();
  auto opt_g = make_adam(g_params, config.lr_g, config);
  auto opt_d = make_adam(d_params, config.lr_d, config);
  const auto& w = config.weights;

  auto snapshot = [&] {
    Checkpoint ckpt = base_checkpoint(config);
    mc.store(ckpt, kMagPrefix);
    ckpt.blobs["optimizer.g"] = serialize_optimizer(opt_g);
    ckpt.blobs["optimizer.d"] = serialize_optimizer(opt_d);
    return ckpt;
  };

  const int64_t per_epoch = run.steps_per_epoch(sampler);
  for (int epoch = 0; epoch < config.total_epochs && !run.out_of_steps(); ++epoch) {
    const double lr_g = learning_rate(config.lr_g, epoch, config.decay_start_epoch, config.total_epochs);
    const double lr_d = learning_rate(config.lr_d, epoch, config.decay_start_epoch, config.total_epochs);
    set_lr(opt_g, lr_g);
    set_lr(opt_d, lr_d);
    bool stop = false;
    for (int64_t s = 0; s < per_epoch && !run.out_of_steps() && !stop; ++s) {
      mc.train(true);
      const data::TrainingBatch batch = sampler.next(config.batch_size);
      const auto& x = batch.noisy_mag;
      const auto& y = batch.clean_mag;

      // The discriminator update leaves G and F untouched, so one forward
      // serves both updates; the discriminators see detached copies.
      set_requires_grad(d_params, true);
      const auto fake_y = mc.g->forward(x);
      const auto fake_x = mc.f->forward(y);
      const auto d_y = rals_d_loss(mc.d_y->forward(y), mc.d_y->forward(fake_y.detach()));
      const auto d_x = rals_d_loss(mc.d_x->forward(x), mc.d_x->forward(fake_x.detach()));
      const auto d_loss = d_y + d_x;

      StepRecord rec;
      rec.step = run.result.steps;
      rec.epoch = epoch;
      rec.lr_g = lr_g;
      rec.lr_d = lr_d;
      rec.values["d_loss"] = value(d_loss);
      rec.values["d_y"] = value(d_y);
      rec.values["d_x"] = value(d_x);
      run.guard(rec, snapshot);
      opt_d.zero_grad();
      d_loss.backward();
      opt_d.step();

      set_requires_grad(d_params, false);
      CycleGanTerms t;
      t.adv_forward = rals_g_loss(mc.d_y->forward(y), mc.d_y->forward(fake_y));
      t.adv_backward = rals_g_loss(mc.d_x->forward(x), mc.d_x->forward(fake_x));
      const auto cycle_fc = mean_l1(mc.f->forward(fake_y), x);
      const auto cycle_bc = mean_l1(mc.g->forward(fake_x), y);
      t.cycle = cycle_fc + cycle_bc;
      if (losses::identity_weight(w, epoch) > 0.0)
        t.identity = losses::identity_loss(x, mc.f->forward(x), y, mc.g->forward(y));
      const auto g_loss = losses::mcgan_total(t, w, epoch);

      put_terms(rec, "", t, cycle_fc, cycle_bc, w, epoch, g_loss);
      run.guard(rec, snapshot);
      opt_g.zero_grad();
      g_loss.backward();
      opt_g.step();
      set_requires_grad(d_params, true);
      stop = !run.record(std::move(rec));
    }
    run.end_epoch(snapshot(), epoch,
                  [&](const dsp::Waveform& noisy) { return enhance_magnitude(mc.g, noisy, config.model.compression); });
    if (stop) break;
  }
  return run.result;
}

CincganNetworks init_cincgan(const TrainConfig& config, const fs::path& mcgan_checkpoint) {
  const Checkpoint init = load_checkpoint(mcgan_checkpoint, config.model.digest());
  if (!init.has_prefix(kMagPrefix))
    throw CheckpointError("checkpoint has no magnitude CycleGAN: " + mcgan_checkpoint.string());
  torch::manual_seed(config.seed);
  CincganNetworks nets{make_magnitude_cyclegan(config.model), make_complex_cyclegan(config.model)};
  nets.mc.load(init, kMagPrefix);
  return nets;
}

TrainResult finetune_cincgan(const TrainConfig& config, data::UnpairedSampler& sampler,
                             const fs::path& mcgan_checkpoint, const std::vector<ValidationPair>& validation,
                             const StepCallback& callback) {
  if (config.stage != Stage::kFinetune) throw InvalidParameterError("finetune_cincgan needs stage = finetune");
  CincganNetworks nets = init_cincgan(config, mcgan_checkpoint);
  Run run(config, validation, callback);
  MagnitudeCycleGan& mc = nets.mc;
  ComplexCycleGan& cc = nets.cc;
  const CycleWiring wiring = CycleWiring::for_variant(config.cycle_variant);

  Params g_params = mc.generator_parameters();
  for (const auto& p : cc.generator_parameters()) g_params.push_back(p);
  const Params d_mc_params = mc.discriminator_parameters();
  const Params d_cc_params = cc.discriminator_parameters();
  auto opt_g = make_adam(g_params, config.lr_g, config);
  auto opt_d_mc = make_adam(d_mc_params, config.lr_d, config);
  auto opt_d_cc = make_adam(d_cc_params, config.lr_d, config);
  const auto& w = config.weights;

  auto snapshot = [&] {
    Checkpoint ckpt = base_checkpoint(config);
    ckpt.metadata["cycle_variant"] = to_string(config.cycle_variant);
    mc.store(ckpt, kMagPrefix);
    cc.store(ckpt, kComplexPrefix);
    ckpt.blobs["optimizer.g"] = serialize_optimizer(opt_g);
    ckpt.blobs["optimizer.d_mc"] = serialize_optimizer(opt_d_mc);
    ckpt.blobs["optimizer.d_cc"] = serialize_optimizer(opt_d_cc);
    return ckpt;
  };
  auto freeze_d = [&](bool frozen) {
    set_requires_grad(d_mc_params, !frozen);
    set_requires_grad(d_cc_params, !frozen);
  };

  const int64_t per_epoch = run.steps_per_epoch(sampler);
  for (int epoch = 0; epoch < config.total_epochs && !run.out_of_steps(); ++epoch) {
    const double lr_g = learning_rate(config.lr_g, epoch, config.decay_start_epoch, config.total_epochs);
    const double lr_d = learning_rate(config.lr_d, epoch, config.decay_start_epoch, config.total_epochs);
    set_lr(opt_g, lr_g);
    set_lr(opt_d_mc, lr_d);
    set_lr(opt_d_cc, lr_d);
    bool stop = false;
    for (int64_t s = 0; s < per_epoch && !run.out_of_steps() && !stop; ++s) {
      mc.train(true);
      cc.train(true);
      const data::TrainingBatch b = sampler.next(config.batch_size);
      const auto& xm = b.noisy_mag;
      const auto& ym = b.clean_mag;
      const auto& xri = b.noisy_ri;
      const auto& yri = b.clean_ri;
      const bool any_bc = wiring.mag_bc || wiring.cc_bc;

      // Discriminators on detached generator outputs.
      // Generator outputs are shared with the generator update below.
      freeze_d(false);
      torch::Tensor fx, pseudo;
      const auto gy = mc.g->forward(xm);
      const auto refined = cc.g->forward(couple_tensor(gy, b.noisy_phase));
      if (any_bc) {
        fx = mc.f->forward(ym);
        if (wiring.cc_bc) pseudo = cc.f->forward(couple_tensor(fx, b.clean_phase));
      }
      torch::Tensor d_mc = rals_d_loss(mc.d_y->forward(ym), mc.d_y->forward(gy.detach()));
      if (wiring.mag_bc) d_mc = d_mc + rals_d_loss(mc.d_x->forward(xm), mc.d_x->forward(fx.detach()));
      torch::Tensor d_cc = rals_d_loss(cc.d_y->forward(yri), cc.d_y->forward(refined.detach()));
      if (wiring.cc_bc) d_cc = d_cc + rals_d_loss(cc.d_x->forward(xri), cc.d_x->forward(pseudo.detach()));

      StepRecord rec;
      rec.step = run.result.steps;
      rec.epoch = epoch;
      rec.lr_g = lr_g;
      rec.lr_d = lr_d;
      rec.values["d_mc"] = value(d_mc);
      rec.values["d_cc"] = value(d_cc);
      run.guard(rec, snapshot);
      opt_d_mc.zero_grad();
      d_mc.backward();
      opt_d_mc.step();
      opt_d_cc.zero_grad();
      d_cc.backward();
      opt_d_cc.step();

      // Generators.
      freeze_d(true);
      CycleGanTerms tm, tc;
      torch::Tensor mc_fc, mc_bc, cc_fc, cc_bc;
      tm.adv_forward = rals_g_loss(mc.d_y->forward(ym), mc.d_y->forward(gy));
      tc.adv_forward = rals_g_loss(cc.d_y->forward(yri), cc.d_y->forward(refined));
      if (wiring.mag_fc) mc_fc = mean_l1(mc.f->forward(gy), xm);
      if (wiring.cc_fc) cc_fc = mean_l1(cc.f->forward(refined), xri);
      if (wiring.mag_bc) {
        tm.adv_backward = rals_g_loss(mc.d_x->forward(xm), mc.d_x->forward(fx));
        mc_bc = mean_l1(mc.g->forward(fx), ym);
      }
      if (wiring.cc_bc) {
        tc.adv_backward = rals_g_loss(cc.d_x->forward(xri), cc.d_x->forward(pseudo));
        cc_bc = mean_l1(cc.g->forward(pseudo), yri);
      }
      tm.cycle = sum_defined(mc_fc, mc_bc);
      tc.cycle = sum_defined(cc_fc, cc_bc);
      if (losses::identity_weight(w, epoch) > 0.0) {
        tm.identity = losses::identity_loss(xm, mc.f->forward(xm), ym, mc.g->forward(ym));
        tc.identity = losses::identity_loss(xri, cc.f->forward(xri), yri, cc.g->forward(yri));
      }
      const auto l_mc = losses::mcgan_total(tm, w, epoch);
      const auto l_cc = losses::cyclegan_total(tc, w, epoch);
      const auto g_loss = losses::cincgan_total(l_mc, l_cc, w);

      put_terms(rec, "mc_", tm, mc_fc, mc_bc, w, epoch, l_mc);
      put_terms(rec, "cc_", tc, cc_fc, cc_bc, w, epoch, l_cc);
      rec.values["total"] = value(g_loss);
      run.guard(rec, snapshot);
      opt_g.zero_grad();
      g_loss.backward();
      opt_g.step();
      freeze_d(false);
      stop = !run.record(std::move(rec));
    }
    run.end_epoch(snapshot(), epoch, [&](const dsp::Waveform& noisy) {
      return enhance_cascade(mc.g, cc.g, noisy, config.model.compression);
    });
    if (stop) break;
  }
  return run.result;
}

}  // namespace cincgan::training
