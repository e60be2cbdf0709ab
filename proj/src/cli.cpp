// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "cincgan/config.hpp"
#include "cincgan/data.hpp"
#include "cincgan/enhance.hpp"
#include "cincgan/errors.hpp"
#include "cincgan/evaluate.hpp"
#include "cincgan/training.hpp"
#include "cincgan/wav.hpp"

namespace cincgan::cli {

namespace fs = std::filesystem;

namespace {

int verbosity = 1;

template <typename... Args>
void log(const char* fmt, Args... args) {
  if (verbosity <= 0) return;
  std::fprintf(stderr, "[cincgan] ");
  if constexpr (sizeof...(Args) == 0) std::fputs(fmt, stderr);
  else std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

void echo_config(const nlohmann::json& j) { log("resolved config: %s", j.dump().c_str()); }

void check_device(const std::string& device) {
  if (device != "cpu") throw InvalidParameterError("unsupported device '" + device + "' (only cpu is available)");
}

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw IoError("file not found: " + p.string());
}

struct TrainFlags {
  std::string preset = "default";
  std::optional<fs::path> config_path;
  std::optional<fs::path> manifest;
  std::optional<fs::path> valid_clean_dir;
  std::optional<fs::path> valid_noisy_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> epochs;
  std::optional<int> decay_start;
  std::optional<int> batch_size;
  std::optional<int64_t> steps_per_epoch;
  std::optional<int64_t> max_steps;
  std::optional<double> lr_g;
  std::optional<double> lr_d;
  std::optional<std::string> variant;
  fs::path init;
  bool paired = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--preset", f.preset, "Built-in defaults: default or toy")
      ->check(CLI::IsMember({"default", "toy"}))
      ->capture_default_str();
  cmd->add_option("--config", f.config_path, "TOML config file");
  cmd->add_option("--manifest", f.manifest, "Training manifest JSON (toy preset generates one when omitted)");
  cmd->add_option("--valid-clean-dir", f.valid_clean_dir, "Validation clean WAVs (for best checkpoint)");
  cmd->add_option("--valid-noisy-dir", f.valid_noisy_dir, "Validation noisy WAVs with matching names");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--out-dir", f.out_dir, "Run directory for log and checkpoints");
  cmd->add_option("--epochs", f.epochs, "Total epochs");
  cmd->add_option("--decay-start", f.decay_start, "Epoch where linear learning-rate decay starts");
  cmd->add_option("--batch-size", f.batch_size, "Batch size");
  cmd->add_option("--steps-per-epoch", f.steps_per_epoch, "Steps per epoch (0: one pass over the noisy list)");
  cmd->add_option("--max-steps", f.max_steps, "Stop after this many steps (0: no limit)");
  cmd->add_option("--lr-g", f.lr_g, "Generator learning rate");
  cmd->add_option("--lr-d", f.lr_d, "Discriminator learning rate");
  cmd->add_flag("--paired", f.paired, "Pair each noisy crop with its own clean counterpart");
}

training::TrainConfig resolve_train_config(const TrainFlags& f, training::Stage stage) {
  training::TrainConfig c =
      f.preset == "toy" ? training::TrainConfig::toy(stage) : training::TrainConfig::defaults(stage);
  if (f.config_path) {
    require_file(*f.config_path);
    config::apply(config::load_toml(*f.config_path), c);
    if (c.stage != stage) throw InvalidParameterError("config stage does not match the subcommand");
  }
  if (f.seed) c.seed = *f.seed;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.epochs) {
    // A shorter run keeps the decay window inside it.
    c.total_epochs = *f.epochs;
    if (c.decay_start_epoch > c.total_epochs) c.decay_start_epoch = c.total_epochs;
  }
  if (f.decay_start) c.decay_start_epoch = *f.decay_start;
  if (f.batch_size) c.batch_size = *f.batch_size;
  if (f.steps_per_epoch) c.steps_per_epoch = *f.steps_per_epoch;
  if (f.max_steps) c.max_steps = *f.max_steps;
  if (f.lr_g) c.lr_g = *f.lr_g;
  if (f.lr_d) c.lr_d = *f.lr_d;
  if (f.variant) c.cycle_variant = training::parse_variant(*f.variant);
  c.validate();
  return c;
}

std::vector<training::ValidationPair> load_validation(const fs::path& clean_dir, const fs::path& noisy_dir) {
  std::vector<training::ValidationPair> out;
  for (const auto& p : eval::pair_directories(clean_dir, noisy_dir)) {
    require_file(p.est);
    out.push_back({p.id, io::load_for_training(p.est), io::load_for_training(p.ref)});
  }
  return out;
}

struct TrainInputs {
  data::CorpusManifest manifest;
  std::vector<training::ValidationPair> validation;
};

TrainInputs prepare_inputs(const TrainFlags& f, const training::TrainConfig& c) {
  TrainInputs in;
  if (f.manifest) {
    require_file(*f.manifest);
    in.manifest = data::load_manifest(*f.manifest);
  } else if (f.preset == "toy") {
    data::ToyCorpusOptions opt;
    opt.seed = c.seed;
    const fs::path dir = c.out_dir / "toy_corpus";
    const data::ToyCorpus corpus = data::make_toy_corpus(opt);
    in.manifest = data::write_toy_corpus(corpus, dir, c.seed);
    for (const auto& p : corpus.test) in.validation.push_back({p.id, p.noisy, p.clean});
    log("generated toy corpus in %s", dir.string().c_str());
  } else {
    throw InvalidParameterError("--manifest is required unless --preset toy is used");
  }
  if (f.valid_clean_dir || f.valid_noisy_dir) {
    if (!f.valid_clean_dir || !f.valid_noisy_dir)
      throw InvalidParameterError("--valid-clean-dir and --valid-noisy-dir go together");
    in.validation = load_validation(*f.valid_clean_dir, *f.valid_noisy_dir);
  }
  return in;
}

int train(const TrainFlags& f, training::Stage stage) {
  const training::TrainConfig c = resolve_train_config(f, stage);
  nlohmann::json echo = c.to_json();
  echo["preset"] = f.preset;
  if (stage == training::Stage::kFinetune) echo["init"] = f.init.string();
  echo_config(echo);
  TrainInputs in = prepare_inputs(f, c);
  data::SamplerOptions so;
  so.crop_frames = c.crop_frames;
  so.paired = f.paired;
  in.manifest.seed = c.seed;
  data::UnpairedSampler sampler = data::UnpairedSampler::from_manifest(in.manifest, so, c.model.compression);
  auto progress = [&](const training::StepRecord& r) {
    if (verbosity >= 2 || r.step % 50 == 0) log("step %lld epoch %d %s", static_cast<long long>(r.step), r.epoch,
                                                 r.to_json().dump().c_str());
    return true;
  };
  training::TrainResult result;
  if (stage == training::Stage::kPretrain) {
    result = training::pretrain_mcgan(c, sampler, in.validation, progress);
  } else {
    require_file(f.init);
    result = training::finetune_cincgan(c, sampler, f.init, in.validation, progress);
  }
  if (!result.log.empty()) log("final losses: %s", result.log.back().to_json().dump().c_str());
  log("last checkpoint: %s", result.last_checkpoint.string().c_str());
  if (result.best_checkpoint)
    log("best checkpoint: %s (validation SegSNR %.3f dB)", result.best_checkpoint->string().c_str(),
        result.best_segsnr);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Cycle-in-cycle GAN speech enhancement toolkit", "cincgan"};
  app.require_subcommand(1);
  int verbose = 0;
  bool quiet = false;
  const char* env_device = std::getenv("CINCGAN_DEVICE");
  std::string device = env_device ? env_device : "cpu";
  app.add_flag("-v,--verbose", verbose, "More logging");
  app.add_flag("-q,--quiet", quiet, "No logging");
  app.add_option("--device", device, "Compute device (env CINCGAN_DEVICE); only cpu is supported");

  // mix
  auto* mix = app.add_subcommand("mix", "Mix clean speech and noise at a target SNR");
  fs::path mix_clean, mix_noise, mix_out;
  double mix_snr = 0.0;
  std::optional<std::uint64_t> mix_seed;
  std::string mix_format = "float32";
  mix->add_option("--clean", mix_clean, "Clean WAV")->required();
  mix->add_option("--noise", mix_noise, "Noise WAV")->required();
  mix->add_option("--snr", mix_snr, "Target SNR in dB")->required();
  mix->add_option("--out", mix_out, "Output WAV")->required();
  mix->add_option("--seed", mix_seed, "Draw a random circular noise offset with this seed (default offset 0)");
  mix->add_option("--format", mix_format, "Output sample format")
      ->check(CLI::IsMember({"float32", "pcm16"}))
      ->capture_default_str();

  // manifest
  auto* manifest = app.add_subcommand("manifest", "Build a corpus manifest or generate the toy corpus");
  std::optional<fs::path> man_noisy, man_clean, man_toy;
  fs::path man_out;
  std::uint64_t man_seed = 0;
  data::ToyCorpusOptions toy_opt;
  manifest->add_option("--noisy-dir", man_noisy, "Directory of noisy WAVs");
  manifest->add_option("--clean-dir", man_clean, "Directory of clean WAVs");
  manifest->add_option("--out", man_out, "Manifest path (default <toy dir>/manifest.json with --toy)");
  manifest->add_option("--seed", man_seed, "Seed recorded in the manifest and used for toy generation");
  manifest->add_option("--toy", man_toy, "Generate the synthetic toy corpus into this directory");
  manifest->add_option("--toy-train", toy_opt.n_train, "Toy training pairs")->capture_default_str();
  manifest->add_option("--toy-test", toy_opt.n_test, "Toy test pairs")->capture_default_str();
  manifest->add_option("--toy-seconds", toy_opt.seconds, "Toy utterance length in seconds")->capture_default_str();

  // training
  TrainFlags pre_flags, fine_flags;
  auto* train_mc = app.add_subcommand("train-mcgan", "Stage 1: pretrain the magnitude CycleGAN");
  add_train_flags(train_mc, pre_flags);
  auto* train_cinc = app.add_subcommand("train-cincgan", "Stage 2: fine-tune the full cascade");
  add_train_flags(train_cinc, fine_flags);
  train_cinc->add_option("--init", fine_flags.init, "Stage-1 checkpoint")->required();
  train_cinc->add_option("--variant", fine_flags.variant, "Cycle wiring: I, II, III or IV")
      ->check(CLI::IsMember({"I", "II", "III", "IV"}));

  // enhance
  auto* enhance = app.add_subcommand("enhance", "Enhance noisy WAV files with a trained checkpoint");
  std::optional<fs::path> enh_in, enh_out, enh_in_dir, enh_out_dir;
  fs::path enh_ckpt;
  enhance->add_option("--in", enh_in, "Noisy WAV");
  enhance->add_option("--out", enh_out, "Enhanced WAV");
  enhance->add_option("--in-dir", enh_in_dir, "Directory of noisy WAVs");
  enhance->add_option("--out-dir", enh_out_dir, "Directory for enhanced WAVs");
  enhance->add_option("--ckpt", enh_ckpt, "Checkpoint")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score estimates against references (SegSNR, STOI)");
  fs::path ev_ref, ev_est;
  std::optional<fs::path> ev_report, ev_csv, ev_ckpt, ev_enh_dir;
  std::vector<std::string> ev_scorers;
  std::string ev_dataset;
  evaluate->add_option("--ref-dir", ev_ref, "Reference (clean) WAVs")->required();
  evaluate->add_option("--est-dir", ev_est, "Estimates, or noisy inputs when --ckpt is given")->required();
  evaluate->add_option("--report", ev_report, "JSON report path");
  evaluate->add_option("--csv", ev_csv, "CSV report path");
  evaluate->add_option("--ckpt", ev_ckpt, "Enhance the --est-dir files with this checkpoint first");
  evaluate->add_option("--enhanced-dir", ev_enh_dir, "Where to write enhanced files (with --ckpt)");
  evaluate->add_option("--scorer", ev_scorers, "External scorer NAME=COMMAND with {ref} and {est} placeholders");
  evaluate->add_option("--dataset-id", ev_dataset, "Dataset label stored in the report");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  verbosity = quiet ? 0 : 1 + verbose;

  try {
    check_device(device);
    if (*mix) {
      require_file(mix_clean);
      require_file(mix_noise);
      const dsp::Waveform clean = io::read_wav(mix_clean);
      const dsp::Waveform noise = io::read_wav(mix_noise);
      echo_config({{"subcommand", "mix"}, {"clean", mix_clean.string()}, {"noise", mix_noise.string()},
                   {"snr_db", mix_snr}, {"out", mix_out.string()}, {"format", mix_format},
                   {"seed", mix_seed ? nlohmann::json(*mix_seed) : nlohmann::json()}});
      std::optional<std::mt19937_64> rng;
      if (mix_seed) rng.emplace(*mix_seed);
      const data::MixResult r = data::mix_at_snr(clean, noise, mix_snr, rng ? &*rng : nullptr);
      io::write_wav(mix_out, r.mixture, mix_format == "pcm16" ? io::WavFormat::kPcm16 : io::WavFormat::kFloat32);
      log("noise gain %.6f, noise offset %zu, achieved SNR %.4f dB", r.noise_gain, r.noise_offset,
          r.achieved_snr_db);
      return kExitOk;
    }
    if (*manifest) {
      echo_config({{"subcommand", "manifest"}, {"seed", man_seed},
                   {"toy", man_toy ? nlohmann::json(man_toy->string()) : nlohmann::json()}});
      if (man_toy) {
        toy_opt.seed = man_seed;
        const data::CorpusManifest m = data::write_toy_corpus(data::make_toy_corpus(toy_opt), *man_toy, man_seed);
        if (!man_out.empty()) {
          data::CorpusManifest moved = m;
          save_manifest(moved, man_out);
        }
        log("toy corpus with %zu training pairs written to %s", m.noisy.size(), man_toy->string().c_str());
        return kExitOk;
      }
      if (!man_noisy || !man_clean || man_out.empty())
        throw CLI::ValidationError("manifest needs --noisy-dir, --clean-dir and --out (or --toy DIR)");
      const fs::path dir = man_out.has_parent_path() ? man_out.parent_path() : fs::path(".");
      const data::CorpusManifest m = data::scan_corpus(*man_noisy, *man_clean, dir, man_seed);
      data::save_manifest(m, man_out);
      log("manifest with %zu noisy and %zu clean entries written to %s", m.noisy.size(), m.clean.size(),
          man_out.string().c_str());
      return kExitOk;
    }
    if (*train_mc) return train(pre_flags, training::Stage::kPretrain);
    if (*train_cinc) return train(fine_flags, training::Stage::kFinetune);
    if (*enhance) {
      const bool single = enh_in || enh_out;
      const bool batch = enh_in_dir || enh_out_dir;
      if (single == batch || (single && !(enh_in && enh_out)) || (batch && !(enh_in_dir && enh_out_dir)))
        throw CLI::ValidationError("enhance needs either --in and --out or --in-dir and --out-dir");
      require_file(enh_ckpt);
      echo_config({{"subcommand", "enhance"}, {"ckpt", enh_ckpt.string()},
                   {"in", (single ? *enh_in : *enh_in_dir).string()},
                   {"out", (single ? *enh_out : *enh_out_dir).string()}});
      Enhancer enhancer = Enhancer::from_checkpoint(enh_ckpt);
      log("chain: %s", enhancer.has_complex_stage() ? "magnitude + complex" : "magnitude only");
      std::vector<std::pair<fs::path, fs::path>> jobs;
      if (single) {
        jobs.emplace_back(*enh_in, *enh_out);
      } else {
        if (!fs::is_directory(*enh_in_dir)) throw IoError("not a directory: " + enh_in_dir->string());
        for (const auto& e : fs::directory_iterator(*enh_in_dir))
          if (e.is_regular_file() && e.path().extension() == ".wav")
            jobs.emplace_back(e.path(), *enh_out_dir / e.path().filename());
        std::sort(jobs.begin(), jobs.end());
      }
      for (const auto& [in, out] : jobs) {
        require_file(in);
        io::write_wav(out, enhancer.enhance(io::read_wav(in)));
        log("enhanced %s -> %s", in.string().c_str(), out.string().c_str());
      }
      return kExitOk;
    }
    if (*evaluate) {
      eval::EvalOptions opt;
      opt.dataset_id = ev_dataset;
      opt.enhanced_dir = ev_enh_dir;
      for (const auto& s : ev_scorers) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--scorer expects NAME=COMMAND");
        opt.scorers.push_back({s.substr(0, eq), s.substr(eq + 1)});
      }
      echo_config({{"subcommand", "evaluate"}, {"ref_dir", ev_ref.string()}, {"est_dir", ev_est.string()},
                   {"ckpt", ev_ckpt ? nlohmann::json(ev_ckpt->string()) : nlohmann::json()},
                   {"scorers", ev_scorers}, {"dataset_id", ev_dataset}});
      std::optional<Enhancer> enhancer;
      if (ev_ckpt) {
        require_file(*ev_ckpt);
        enhancer.emplace(Enhancer::from_checkpoint(*ev_ckpt));
        opt.checkpoint_id = enhancer->config().digest();
      }
      const auto report = eval::evaluate_corpus(eval::pair_directories(ev_ref, ev_est), opt,
                                                enhancer ? &*enhancer : nullptr);
      if (ev_report) eval::write_report_json(report, *ev_report);
      if (ev_csv) eval::write_report_csv(report, *ev_csv);
      if (!ev_report && !ev_csv) std::cout << report.to_json().dump(2) << "\n";
      log("%zu files scored, %zu failed; mean SegSNR %.3f dB, mean STOI %.4f", report.n_scored, report.n_failed,
          report.mean_segsnr_db, report.mean_stoi);
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace cincgan::cli
