// Copyright 2026 The pegsafe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pegsafe/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pegsafe/errors.hpp"

namespace pegsafe::rl {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'E', 'G', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

void put_doubles(std::ostream& out, const double* p, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) put<double>(out, p[i]);
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw IncompatibleCheckpoint("truncated checkpoint");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      std::reverse(bytes.begin(), bytes.end());
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }

  void get_doubles(double* p, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) p[i] = get<double>();
  }

  std::string raw(std::size_t n) {
    if (pos_ + n > data_.size()) throw IncompatibleCheckpoint("truncated checkpoint");
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

std::uint32_t mask_code(env::ObservationMask m) {
  switch (m) {
    case env::ObservationMask::kVFTM:
      return 0;
    case env::ObservationMask::kFTM:
      return 1;
    case env::ObservationMask::kVM:
      return 2;
  }
  return 0;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt,
                     const CheckpointMeta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ostringstream out;
  out.write(kMagic.data(), kMagic.size());
  const Architecture& arch = ckpt.params.arch();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.obs_dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.act_dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.hidden.size()));
  for (int h : arch.hidden) put<std::uint32_t>(out, static_cast<std::uint32_t>(h));
  put<std::uint32_t>(out, mask_code(ckpt.mask));
  const Vector& flat = ckpt.params.flat();
  put<std::uint64_t>(out, static_cast<std::uint64_t>(flat.size()));
  put_doubles(out, flat.data(), flat.size());
  put_doubles(out, ckpt.params.action_limits().data(), arch.act_dim);
  put_doubles(out, ckpt.normalizer.mean().data(), arch.obs_dim);
  put_doubles(out, ckpt.normalizer.var().data(), arch.obs_dim);
  put<double>(out, ckpt.normalizer.count());
  put<double>(out, ckpt.normalizer.clip());
  put<std::uint32_t>(out, ckpt.has_optimizer ? 1u : 0u);
  if (ckpt.has_optimizer) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(ckpt.adam_t));
    put_doubles(out, ckpt.adam_m.data(), flat.size());
    put_doubles(out, ckpt.adam_v.data(), flat.size());
  }
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write checkpoint " + path.string());
    const std::string bytes = out.str();
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }

  nlohmann::ordered_json j;
  j["format"] = "PEGCKPT1";
  j["step"] = meta.step;
  j["update"] = meta.update;
  j["episodes"] = meta.episodes;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["mask"] = meta.mask;
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  side << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IncompatibleCheckpoint("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  Reader r(ss.str());
  if (r.raw(kMagic.size()) != std::string(kMagic.data(), kMagic.size())) {
    throw IncompatibleCheckpoint("bad magic in " + path.string());
  }
  Architecture arch;
  arch.obs_dim = static_cast<int>(r.get<std::uint32_t>());
  arch.act_dim = static_cast<int>(r.get<std::uint32_t>());
  const std::uint32_t n_hidden = r.get<std::uint32_t>();
  if (n_hidden == 0 || n_hidden > 16) throw IncompatibleCheckpoint("implausible layer count");
  arch.hidden.clear();
  for (std::uint32_t i = 0; i < n_hidden; ++i) {
    arch.hidden.push_back(static_cast<int>(r.get<std::uint32_t>()));
  }
  if (arch.obs_dim <= 0 || arch.act_dim <= 0 || arch.obs_dim > 4096 || arch.act_dim > 64) {
    throw IncompatibleCheckpoint("implausible dimensions");
  }
  const std::uint32_t mask = r.get<std::uint32_t>();
  if (mask > 2) throw IncompatibleCheckpoint("unknown observation mask code");
  Checkpoint ckpt;
  ckpt.params = PolicyParams(arch);
  ckpt.normalizer = ObsNormalizer(arch.obs_dim);
  ckpt.mask = static_cast<env::ObservationMask>(mask);
  const std::uint64_t n = r.get<std::uint64_t>();
  if (n != static_cast<std::uint64_t>(ckpt.params.flat().size())) {
    throw IncompatibleCheckpoint("parameter count does not match the stored architecture");
  }
  r.get_doubles(ckpt.params.flat().data(), ckpt.params.flat().size());
  r.get_doubles(ckpt.params.action_limits().data(), arch.act_dim);
  Vector mean(arch.obs_dim), var(arch.obs_dim);
  r.get_doubles(mean.data(), arch.obs_dim);
  r.get_doubles(var.data(), arch.obs_dim);
  const double count = r.get<double>();
  const double clip = r.get<double>();
  ckpt.normalizer = ObsNormalizer(arch.obs_dim, clip);
  ckpt.normalizer.set(mean, var, count);
  ckpt.has_optimizer = r.get<std::uint32_t>() != 0;
  if (ckpt.has_optimizer) {
    ckpt.adam_t = static_cast<std::int64_t>(r.get<std::uint64_t>());
    ckpt.adam_m.resize(static_cast<Eigen::Index>(n));
    ckpt.adam_v.resize(static_cast<Eigen::Index>(n));
    r.get_doubles(ckpt.adam_m.data(), ckpt.adam_m.size());
    r.get_doubles(ckpt.adam_v.data(), ckpt.adam_v.size());
  }
  if (!r.at_end()) throw IncompatibleCheckpoint("trailing bytes in checkpoint");
  return ckpt;
}

CheckpointMeta load_checkpoint_meta(const std::filesystem::path& path) {
  std::ifstream f(sidecar_path(path));
  if (!f) throw IncompatibleCheckpoint("missing sidecar for " + path.string());
  CheckpointMeta meta;
  try {
    const auto j = nlohmann::json::parse(f);
    meta.step = j.at("step").get<std::int64_t>();
    meta.update = j.value("update", std::int64_t{0});
    meta.episodes = j.value("episodes", std::int64_t{0});
    meta.config_hash = j.at("config_hash").get<std::string>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.mask = j.value("mask", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw IncompatibleCheckpoint(std::string("bad sidecar: ") + e.what());
  }
  return meta;
}

void check_compatible(const Checkpoint& ckpt, const Architecture& arch,
                      env::ObservationMask mask) {
  if (!(ckpt.params.arch() == arch)) {
    throw IncompatibleCheckpoint("network dimensions differ from the experiment");
  }
  if (ckpt.mask != mask) {
    throw IncompatibleCheckpoint("checkpoint was trained with observation model " +
                                 env::to_string(ckpt.mask) + ", experiment uses " +
                                 env::to_string(mask));
  }
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

}  // namespace pegsafe::rl
