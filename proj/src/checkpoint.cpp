// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cincgan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "cincgan/errors.hpp"

namespace cincgan {

namespace {

constexpr char kMagic[8] = {'C', 'I', 'N', 'C', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <typename T>
  void pod(const T& v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void bytes(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string where) : is_(is), where_(std::move(where)) {}
  template <typename T>
  T pod() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    return chunk(n);
  }
  std::string chunk(std::uint64_t n) {
    std::string s(n, '\0');
    is_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }
  void read(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    check();
  }

 private:
  void check() {
    if (!is_) throw CheckpointError("truncated checkpoint: " + where_);
  }
  std::istream& is_;
  std::string where_;
};

std::uint8_t dtype_code(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return 0;
    case torch::kFloat64: return 1;
    case torch::kInt64: return 2;
    default: throw CheckpointError("unsupported tensor dtype in checkpoint");
  }
}

torch::ScalarType dtype_from(std::uint8_t code) {
  switch (code) {
    case 0: return torch::kFloat32;
    case 1: return torch::kFloat64;
    case 2: return torch::kInt64;
    default: throw CheckpointError("unknown tensor dtype code " + std::to_string(code));
  }
}

}  // namespace

bool Checkpoint::has_prefix(const std::string& prefix) const {
  auto it = tensors.lower_bound(prefix);
  return it != tensors.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write to a sibling file first so a crash never leaves a half-written checkpoint.
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw CheckpointError("cannot write checkpoint: " + path.string());
    Writer w(os);
    w.bytes(kMagic, sizeof kMagic);
    w.pod(Checkpoint::kVersion);
    w.str(ckpt.config_digest);
    w.str(ckpt.metadata.dump());
    w.pod(static_cast<std::uint64_t>(ckpt.tensors.size()));
    for (const auto& [name, tensor] : ckpt.tensors) {
      const auto t = tensor.detach().contiguous().cpu();
      w.str(name);
      w.pod(dtype_code(t.scalar_type()));
      w.pod(static_cast<std::uint32_t>(t.dim()));
      for (int64_t d : t.sizes()) w.pod(d);
      w.bytes(t.data_ptr(), t.numel() * t.element_size());
    }
    w.pod(static_cast<std::uint64_t>(ckpt.blobs.size()));
    for (const auto& [name, blob] : ckpt.blobs) {
      w.str(name);
      w.pod(static_cast<std::uint64_t>(blob.size()));
      w.bytes(blob.data(), blob.size());
    }
    if (!os) throw CheckpointError("failed writing checkpoint: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_digest) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint: " + path.string());
  Reader r(is, path.string());
  char magic[8];
  r.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError("not a checkpoint file: " + path.string());
  const auto version = r.pod<std::uint32_t>();
  if (version != Checkpoint::kVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  ckpt.config_digest = r.str();
  if (expected_digest && *expected_digest != ckpt.config_digest)
    throw CheckpointError("config digest mismatch: checkpoint " + ckpt.config_digest + ", expected " +
                          *expected_digest + " (" + path.string() + ")");
  try {
    ckpt.metadata = nlohmann::json::parse(r.str());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint metadata: ") + e.what());
  }
  const auto ntensors = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < ntensors; ++i) {
    std::string name = r.str();
    const auto dtype = dtype_from(r.pod<std::uint8_t>());
    const auto ndim = r.pod<std::uint32_t>();
    if (ndim > 8) throw CheckpointError("implausible tensor rank in checkpoint");
    std::vector<int64_t> dims(ndim);
    for (auto& d : dims) {
      d = r.pod<int64_t>();
      if (d < 0) throw CheckpointError("negative tensor dimension in checkpoint");
    }
    auto t = torch::empty(dims, torch::TensorOptions().dtype(dtype));
    r.read(t.data_ptr(), t.numel() * t.element_size());
    ckpt.tensors.emplace(std::move(name), std::move(t));
  }
  const auto nblobs = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < nblobs; ++i) {
    std::string name = r.str();
    const auto len = r.pod<std::uint64_t>();
    ckpt.blobs.emplace(std::move(name), r.chunk(len));
  }
  return ckpt;
}

void store_module(Checkpoint& ckpt, const std::string& prefix, const torch::nn::Module& module) {
  for (const auto& item : module.named_parameters(true))
    ckpt.tensors[prefix + item.key()] = item.value().detach().clone();
  for (const auto& item : module.named_buffers(true))
    ckpt.tensors[prefix + item.key()] = item.value().detach().clone();
}

void load_module(const Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  auto assign = [&](const std::string& key, torch::Tensor& target) {
    const auto it = ckpt.tensors.find(prefix + key);
    if (it == ckpt.tensors.end()) throw CheckpointError("checkpoint is missing tensor " + prefix + key);
    if (it->second.sizes() != target.sizes())
      throw CheckpointError("shape mismatch for " + prefix + key + ": checkpoint " +
                            c10::str(it->second.sizes()) + ", model " + c10::str(target.sizes()));
    target.copy_(it->second);
  };
  for (auto& item : module.named_parameters(true)) assign(item.key(), item.value());
  for (auto& item : module.named_buffers(true)) assign(item.key(), item.value());
}

std::string serialize_optimizer(const torch::optim::Optimizer& opt) {
  std::ostringstream os;
  torch::serialize::OutputArchive archive;
  opt.save(archive);
  archive.save_to(os);
  return os.str();
}

void deserialize_optimizer(torch::optim::Optimizer& opt, const std::string& bytes) {
  std::istringstream is(bytes);
  torch::serialize::InputArchive archive;
  archive.load_from(is);
  opt.load(archive);
}

}  // namespace cincgan
