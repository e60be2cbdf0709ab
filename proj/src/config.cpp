// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cincgan/errors.hpp"

namespace cincgan::config {

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, int number) : s_(line), line_(number) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidParameterError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string key() {
    skip_ws();
    if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) return string_value();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
      ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{key()};
    while (consume('.')) parts.push_back(key());
    return parts;
  }

  nlohmann::json value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') return array();
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    return number();
  }

 private:
  std::string string_value() {
    const char quote = s_[pos_++];
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != quote) {
      char c = s_[pos_++];
      if (quote == '"' && c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '\\': c = '\\'; break;
          case '"': c = '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  nlohmann::json array() {
    ++pos_;
    nlohmann::json arr = nlohmann::json::array();
    if (consume(']')) return arr;
    while (true) {
      arr.push_back(value());
      if (consume(']')) return arr;
      if (!consume(',')) fail("expected ',' or ']' in array");
      if (consume(']')) return arr;
    }
  }

  nlohmann::json number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '+' ||
                                s_[pos_] == '-' || s_[pos_] == '.' || s_[pos_] == '_'))
      ++pos_;
    std::string text(s_.substr(start, pos_ - start));
    std::erase(text, '_');
    if (text.empty()) fail("expected a value");
    const bool is_float = text.find_first_of(".eE") != std::string::npos || text == "inf" || text == "nan";
    const char* first = text.data() + (text[0] == '+' ? 1 : 0);
    const char* last = text.data() + text.size();
    if (is_float) {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) fail("invalid number '" + text + "'");
      return v;
    }
    int64_t v = 0;
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) fail("invalid value '" + text + "'");
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

nlohmann::json& descend(nlohmann::json& root, const std::vector<std::string>& path, LineParser& p) {
  nlohmann::json* node = &root;
  for (const auto& part : path) {
    if (!node->contains(part)) (*node)[part] = nlohmann::json::object();
    node = &(*node)[part];
    if (!node->is_object()) p.fail("'" + part + "' is not a table");
  }
  return *node;
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    LineParser p(line, number);
    if (p.at_end_or_comment()) continue;
    if (p.consume('[')) {
      const auto path = p.dotted_key();
      if (!p.consume(']')) p.fail("expected ']'");
      if (!p.at_end_or_comment()) p.fail("trailing characters after table header");
      table = &descend(root, path, p);
      continue;
    }
    auto path = p.dotted_key();
    if (!p.consume('=')) p.fail("expected '='");
    nlohmann::json v = p.value();
    if (!p.at_end_or_comment()) p.fail("trailing characters after value");
    const std::string last = path.back();
    path.pop_back();
    nlohmann::json& target = descend(*table, path, p);
    if (target.contains(last)) p.fail("duplicate key '" + last + "'");
    target[last] = std::move(v);
  }
  return root;
}

nlohmann::json load_toml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

namespace {

template <typename T>
T get(const nlohmann::json& v, const std::string& key) {
  try {
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InvalidParameterError("");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw InvalidParameterError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw InvalidParameterError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw InvalidParameterError("config key '" + key + "' has the wrong type");
  }
}

void apply_train(const nlohmann::json& t, training::TrainConfig& c) {
  for (const auto& [k, v] : t.items()) {
    if (k == "model" || k == "data" || k == "train") continue;
    if (k == "stage") c.stage = training::parse_stage(get<std::string>(v, k));
    else if (k == "cycle_variant") c.cycle_variant = training::parse_variant(get<std::string>(v, k));
    else if (k == "lr_g") c.lr_g = get<double>(v, k);
    else if (k == "lr_d") c.lr_d = get<double>(v, k);
    else if (k == "adam_beta1") c.adam_beta1 = get<double>(v, k);
    else if (k == "adam_beta2") c.adam_beta2 = get<double>(v, k);
    else if (k == "decay_start_epoch") c.decay_start_epoch = get<int>(v, k);
    else if (k == "total_epochs") c.total_epochs = get<int>(v, k);
    else if (k == "id_epochs") c.weights.id_epochs = get<int>(v, k);
    else if (k == "batch_size") c.batch_size = get<int>(v, k);
    else if (k == "seed") c.seed = get<std::uint64_t>(v, k);
    else if (k == "steps_per_epoch") c.steps_per_epoch = get<int64_t>(v, k);
    else if (k == "max_steps") c.max_steps = get<int64_t>(v, k);
    else if (k == "crop_frames") c.crop_frames = get<int64_t>(v, k);
    else if (k == "lambda_cycle") c.weights.lambda_cycle = get<double>(v, k);
    else if (k == "lambda_id") c.weights.lambda_id = get<double>(v, k);
    else if (k == "gamma") c.weights.gamma = get<double>(v, k);
    else if (k == "out_dir") c.out_dir = get<std::string>(v, k);
    else throw InvalidParameterError("unknown config key '" + k + "'");
  }
}

std::vector<int64_t> channels(const nlohmann::json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw InvalidParameterError("config key '" + key + "' must be a non-empty array");
  std::vector<int64_t> out;
  for (const auto& x : v) out.push_back(get<int64_t>(x, key));
  return out;
}

}  // namespace

void apply(const nlohmann::json& doc, training::TrainConfig& config) {
  if (!doc.is_object()) throw InvalidParameterError("config document must be a table");
  for (const auto& [k, v] : doc.items())
    if (v.is_object() && k != "train" && k != "model" && k != "data")
      throw InvalidParameterError("unknown config table [" + k + "]");
  apply_train(doc, config);
  if (doc.contains("train")) apply_train(doc.at("train"), config);
  if (doc.contains("model")) {
    auto& m = config.model;
    for (const auto& [k, v] : doc.at("model").items()) {
      if (k == "mag_channels") m.mag_channels = channels(v, k);
      else if (k == "cc_channels") m.cc_channels = channels(v, k);
      else if (k == "disc_channels") m.disc_channels = channels(v, k);
      else if (k == "n_atfa") m.n_atfa = get<int64_t>(v, k);
      else if (k == "n_scales") m.n_scales = get<int64_t>(v, k);
      else if (k == "compression") m.compression = get<double>(v, k);
      else throw InvalidParameterError("unknown config key 'model." + k + "'");
    }
  }
}

}  // namespace cincgan::config
