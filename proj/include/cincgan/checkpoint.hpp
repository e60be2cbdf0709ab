// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

namespace cincgan {

// Versioned parameter container.
//
// File layout (little endian):
//   "CINCCKPT"                       8-byte magic
//   u32 version
//   str config digest                (str = u32 length + bytes)
//   str metadata                     (JSON text)
//   u64 tensor count, then per tensor:
//     str name, u8 dtype (0 f32, 1 f64, 2 i64), u32 ndim, i64 dims[ndim], raw data
//   u64 blob count, then per blob: str name, u64 length, bytes
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string config_digest;
  nlohmann::json metadata = nlohmann::json::object();
  std::map<std::string, torch::Tensor> tensors;
  std::map<std::string, std::string> blobs;

  bool has_prefix(const std::string& prefix) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Throws CheckpointError on a malformed file, an unknown version, or (when
// expected_digest is given) a config digest mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_digest = std::nullopt);

// Copies named parameters and buffers of `module` under `prefix`.
void store_module(Checkpoint& ckpt, const std::string& prefix, const torch::nn::Module& module);

// Strict load: every parameter and buffer must be present with the same shape.
void load_module(const Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module);

std::string serialize_optimizer(const torch::optim::Optimizer& opt);
void deserialize_optimizer(torch::optim::Optimizer& opt, const std::string& bytes);

}  // namespace cincgan
