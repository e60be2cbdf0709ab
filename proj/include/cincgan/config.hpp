// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <string>

#include "cincgan/training.hpp"
#include "json.hpp"

namespace cincgan::config {

// Reads the TOML subset used by training configs: comments, [table] and
// [a.b] headers, bare or quoted keys, basic and literal strings, integers,
// floats, booleans and single-line arrays of those. Anything else is a
// parse error naming the line.
nlohmann::json parse_toml(const std::string& text);
nlohmann::json load_toml(const std::filesystem::path& path);

// Applies [train] (or top-level) and [model] keys onto `config`. Unknown keys
// and wrongly typed values throw InvalidParameterError. A [data] table is
// left to the caller.
void apply(const nlohmann::json& doc, training::TrainConfig& config);

}  // namespace cincgan::config
