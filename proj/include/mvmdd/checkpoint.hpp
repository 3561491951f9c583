// include/mvmdd/checkpoint.hpp
//
// Copyright 2026  The mvmdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MVMDD_CHECKPOINT_HPP_
#define MVMDD_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mvmdd/netops.hpp"

namespace mvmdd {

// Model snapshot. On disk (little-endian):
//   "MVCK", u16 version (1), u16 reserved (0), u32 header length N,
//   N bytes of UTF-8 JSON {"net": {...}, "config": "...", "step": s,
//   "dev_per": p, "tensors": [{"name", "rows", "cols"}, ...]},
//   then every tensor listed, in order, as rows*cols float64 values.
struct Checkpoint {
  NetConfig net;
  ModelParams params;
  std::string config_echo;      // the experiment config that produced it
  std::int64_t step = -1;       // training step of the snapshot, -1 for untrained
  std::optional<double> dev_per;
};

inline constexpr std::uint16_t kCheckpointVersion = 1;

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
// Throws FormatError on any structural problem, IoError if unreadable.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace mvmdd

#endif  // MVMDD_CHECKPOINT_HPP_
