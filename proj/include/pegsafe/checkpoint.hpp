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

#ifndef PEGSAFE_CHECKPOINT_HPP_
#define PEGSAFE_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "pegsafe/env.hpp"
#include "pegsafe/policy.hpp"

namespace pegsafe::rl {

// Binary layout, all integers and floats little-endian:
//
//   char[8]  magic "PEGCKPT1"
//   u32      obs_dim, act_dim, hidden_count, hidden[hidden_count]
//   u32      observation mask (0 VFTM, 1 FTM, 2 VM)
//   u64      parameter count n
//   f64[n]   parameters: actor layers (W column-major, then b), log_std,
//            critic layers
//   f64[act] action limits
//   f64[obs] normalizer mean, f64[obs] normalizer variance
//   f64      normalizer count, f64 normalizer clip
//   u32      optimizer present; if 1: u64 step, f64[n] m, f64[n] v
struct Checkpoint {
  PolicyParams params;
  ObsNormalizer normalizer;
  env::ObservationMask mask = env::ObservationMask::kVFTM;
  bool has_optimizer = false;
  Vector adam_m;
  Vector adam_v;
  std::int64_t adam_t = 0;
};

// Sidecar stored next to the binary as <file>.json.
struct CheckpointMeta {
  std::int64_t step = 0;
  std::int64_t update = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string mask;
  std::int64_t episodes = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt,
                     const CheckpointMeta& meta);
// Throws IncompatibleCheckpoint on a malformed or truncated file.
Checkpoint load_checkpoint(const std::filesystem::path& path);
CheckpointMeta load_checkpoint_meta(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& path);

// Throws IncompatibleCheckpoint when the stored network or mask differs.
void check_compatible(const Checkpoint& ckpt, const Architecture& arch,
                      env::ObservationMask mask);

std::uint64_t fnv1a64(std::string_view data);
std::string hash_hex(std::uint64_t h);

}  // namespace pegsafe::rl

#endif  // PEGSAFE_CHECKPOINT_HPP_
