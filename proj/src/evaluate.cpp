// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/evaluate.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cincgan/errors.hpp"
#include "cincgan/metrics.hpp"
#include "cincgan/wav.hpp"

namespace cincgan::eval {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::vector<FilePair> pair_directories(const fs::path& ref_dir, const fs::path& est_dir) {
  if (!fs::is_directory(ref_dir)) throw IoError("not a directory: " + ref_dir.string());
  if (!fs::is_directory(est_dir)) throw IoError("not a directory: " + est_dir.string());
  std::vector<FilePair> pairs;
  for (const auto& e : fs::directory_iterator(ref_dir))
    if (e.is_regular_file() && e.path().extension() == ".wav")
      pairs.push_back({e.path().stem().string(), e.path(), est_dir / e.path().filename()});
  std::sort(pairs.begin(), pairs.end(), [](const FilePair& a, const FilePair& b) { return a.id < b.id; });
  return pairs;
}

double run_external_scorer(const ExternalScorer& scorer, const fs::path& ref, const fs::path& est) {
  std::string cmd = scorer.command_template;
  replace_all(cmd, "{ref}", shell_quote(ref.string()));
  replace_all(cmd, "{est}", shell_quote(est.string()));
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw Error("cannot start scorer '" + scorer.name + "'");
  std::string output;
  std::array<char, 256> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) output += buf.data();
  const int status = ::pclose(pipe);
  if (status != 0) throw Error("scorer '" + scorer.name + "' exited with status " + std::to_string(status));
  std::istringstream in(output);
  double v = 0.0;
  if (!(in >> v)) throw Error("scorer '" + scorer.name + "' printed no number: '" + output + "'");
  return v;
}

EvalReport evaluate_corpus(const std::vector<FilePair>& pairs, const EvalOptions& options, Enhancer* enhancer) {
  EvalReport report;
  const metrics::SegSnrOptions seg;
  report.metadata = {{"dataset_id", options.dataset_id},
                     {"checkpoint_id", options.checkpoint_id},
                     {"enhanced", enhancer != nullptr},
                     {"segsnr",
                      {{"segment_length", seg.segment_length},
                       {"hop", seg.hop},
                       {"gate_db", seg.gate_db},
                       {"min_db", seg.min_db},
                       {"max_db", seg.max_db}}}};
  std::map<std::string, std::size_t> external_counts;
  for (const auto& pair : pairs) {
    FileScore score{pair.id, pair.ref, pair.est, std::nullopt, std::nullopt, {}, std::nullopt};
    try {
      const dsp::Waveform ref = io::read_wav(pair.ref);
      dsp::Waveform est = io::read_wav(pair.est);
      fs::path est_path = pair.est;
      if (enhancer) {
        est = enhancer->enhance(est);
        if (options.enhanced_dir) {
          est_path = *options.enhanced_dir / pair.est.filename();
          io::write_wav(est_path, est);
          score.est = est_path;
        }
      }
      const double s = metrics::segsnr(ref, est);
      const double t = metrics::stoi(ref, est);
      std::map<std::string, double> ext;
      for (const auto& scorer : options.scorers) {
        if (enhancer && !options.enhanced_dir)
          throw Error("external scorers need the enhanced files on disk (set an output directory)");
        ext[scorer.name] = run_external_scorer(scorer, pair.ref, est_path);
      }
      score.segsnr_db = s;
      score.stoi = t;
      score.external = std::move(ext);
    } catch (const std::exception& e) {
      score.error = e.what();
    }
    if (score.error) {
      ++report.n_failed;
    } else {
      ++report.n_scored;
      report.mean_segsnr_db += *score.segsnr_db;
      report.mean_stoi += *score.stoi;
      for (const auto& [k, v] : score.external) {
        report.mean_external[k] += v;
        ++external_counts[k];
      }
    }
    report.files.push_back(std::move(score));
  }
  if (report.n_scored > 0) {
    report.mean_segsnr_db /= static_cast<double>(report.n_scored);
    report.mean_stoi /= static_cast<double>(report.n_scored);
  }
  for (auto& [k, v] : report.mean_external) v /= static_cast<double>(external_counts[k]);
  return report;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) {
    nlohmann::json j{{"id", f.id}, {"ref", f.ref.string()}, {"est", f.est.string()}};
    j["segsnr_db"] = f.segsnr_db ? nlohmann::json(*f.segsnr_db) : nlohmann::json();
    j["stoi"] = f.stoi ? nlohmann::json(*f.stoi) : nlohmann::json();
    for (const auto& [k, v] : f.external) j["external"][k] = v;
    if (f.error) j["error"] = *f.error;
    files_json.push_back(std::move(j));
  }
  nlohmann::json means{{"segsnr_db", mean_segsnr_db}, {"stoi", mean_stoi}};
  for (const auto& [k, v] : mean_external) means[k] = v;
  return {{"files", files_json},
          {"mean", means},
          {"n_scored", n_scored},
          {"n_failed", n_failed},
          {"metadata", metadata}};
}

std::string EvalReport::to_csv() const {
  std::vector<std::string> ext_names;
  for (const auto& [k, v] : mean_external) ext_names.push_back(k);
  std::ostringstream out;
  out.precision(10);
  out << "id,segsnr_db,stoi";
  for (const auto& k : ext_names) out << "," << csv_field(k);
  out << ",error\n";
  for (const auto& f : files) {
    out << csv_field(f.id) << ",";
    if (f.segsnr_db) out << *f.segsnr_db;
    out << ",";
    if (f.stoi) out << *f.stoi;
    for (const auto& k : ext_names) {
      out << ",";
      if (const auto it = f.external.find(k); it != f.external.end()) out << it->second;
    }
    out << "," << csv_field(f.error.value_or("")) << "\n";
  }
  out << "mean," << mean_segsnr_db << "," << mean_stoi;
  for (const auto& k : ext_names) out << "," << mean_external.at(k);
  out << ",\n";
  return out.str();
}

void write_report_json(const EvalReport& report, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << report.to_json().dump(2) << "\n";
}

void write_report_csv(const EvalReport& report, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << report.to_csv();
}

}  // namespace cincgan::eval
