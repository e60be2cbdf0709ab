// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cincgan/enhance.hpp"
#include "json.hpp"

namespace cincgan::eval {

struct FilePair {
  std::string id;
  std::filesystem::path ref;
  std::filesystem::path est;
};

// External metric program. The template is run through the shell with {ref}
// and {est} replaced by quoted paths and must print one number on stdout.
struct ExternalScorer {
  std::string name;
  std::string command_template;
};

struct FileScore {
  std::string id;
  std::filesystem::path ref;
  std::filesystem::path est;
  std::optional<double> segsnr_db;
  std::optional<double> stoi;
  std::map<std::string, double> external;
  std::optional<std::string> error;
};

struct EvalReport {
  std::vector<FileScore> files;
  // Arithmetic means over files that scored without error.
  double mean_segsnr_db = 0.0;
  double mean_stoi = 0.0;
  std::map<std::string, double> mean_external;
  std::size_t n_scored = 0;
  std::size_t n_failed = 0;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

struct EvalOptions {
  std::vector<ExternalScorer> scorers;
  std::string dataset_id;
  std::string checkpoint_id;
  // Directory for enhanced files when an enhancer is supplied.
  std::optional<std::filesystem::path> enhanced_dir;
};

// Pairs files by name: every *.wav in ref_dir with the same name in est_dir.
// Missing estimates still produce a pair so the report records the error.
std::vector<FilePair> pair_directories(const std::filesystem::path& ref_dir, const std::filesystem::path& est_dir);

// Runs the scorer on one pair; throws Error on a failing command or
// non-numeric output.
double run_external_scorer(const ExternalScorer& scorer, const std::filesystem::path& ref,
                           const std::filesystem::path& est);

// Scores every pair. With an enhancer the `est` side is treated as the noisy
// input and enhanced first. Unreadable or mismatched files become per-file
// errors and the run continues.
EvalReport evaluate_corpus(const std::vector<FilePair>& pairs, const EvalOptions& options = {},
                           Enhancer* enhancer = nullptr);

void write_report_json(const EvalReport& report, const std::filesystem::path& path);
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);

}  // namespace cincgan::eval
