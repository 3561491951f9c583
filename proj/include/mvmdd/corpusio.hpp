// include/mvmdd/corpusio.hpp
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

#ifndef MVMDD_CORPUSIO_HPP_
#define MVMDD_CORPUSIO_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvmdd/af_inventory.hpp"
#include "mvmdd/types.hpp"

namespace mvmdd::corpus {

// ---------------------------------------------------------------------------
// Feature files
//
// Little-endian: "MVFT", u16 version (1), u16 reserved (0), u32 T, u32 D,
// then T*D float32 values, frame-major. Values are stored as float32, so a
// Matrix survives a write/read cycle exactly only if it holds floats.

inline constexpr std::uint16_t kFeatureVersion = 1;

void write_features(const Matrix& features, std::ostream& out);
void write_features(const Matrix& features, const std::filesystem::path& path);
// Throws FormatError (magic, version, truncation, trailing bytes, overflow)
// or IoError.
Matrix read_features(std::istream& in);
Matrix read_features(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Phone map: folds extended symbol sets onto the 39-phone inventory before
// validation. Symbols absent from the map pass through unchanged.

class PhoneMap {
 public:
  static const PhoneMap& builtin();
  // TSV "source\ttarget" with header, '#' comments. Targets must be phones of
  // `inventory`.
  static PhoneMap parse(std::istream& in,
                        const PhoneInventory& inventory = PhoneInventory::standard());
  static PhoneMap load(const std::filesystem::path& path,
                       const PhoneInventory& inventory = PhoneInventory::standard());
  static PhoneMap identity() { return PhoneMap{}; }

  std::string apply(std::string_view symbol) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> map_;
};

// ---------------------------------------------------------------------------
// Manifests (JSON Lines)

struct UtteranceRecord {
  std::string id;
  LabelSeq canonical;  // what the prompt should elicit
  LabelSeq perceived;  // what the annotator heard; the training target
  std::string mono;    // feature file paths as written, relative to the manifest
  std::string multi;
  int frames = 0;

  bool operator==(const UtteranceRecord&) const = default;
};

enum class OnInfeasible { Skip, Error };

struct ManifestOptions {
  OnInfeasible on_infeasible = OnInfeasible::Skip;
  const PhoneMap* phone_map = nullptr;  // nullptr selects PhoneMap::builtin()
  bool check_files = true;
  std::function<void(const std::string&)> warn;  // defaults to stderr
};

struct Manifest {
  std::filesystem::path dir;  // directory the relative feature paths resolve against
  std::vector<UtteranceRecord> records;

  std::filesystem::path resolve(const std::string& relative) const;
};

// Validates phones against the inventory (after the phone map), feature file
// presence, and CTC feasibility of `perceived` in `frames`. Errors name the
// 1-based line.
Manifest parse_manifest(std::istream& in, const std::filesystem::path& dir,
                        const ManifestOptions& options = {});
Manifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});

std::string manifest_line(const UtteranceRecord& record);
void write_manifest(std::span<const UtteranceRecord> records, std::ostream& out);
void write_manifest(std::span<const UtteranceRecord> records, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SynthConfig {
  int n_train = 400;
  int n_dev = 50;
  int n_test = 50;
  int min_phones = 4;
  int max_phones = 10;
  int min_frames_per_phone = 2;
  int max_frames_per_phone = 5;
  double rho = 0.15;             // per-phone mispronunciation probability
  double confusion_bias = 0.8;   // share of substitutions drawn from confusable pairs
  double sigma = 0.3;            // feature noise standard deviation
  int code_dim = 32;             // shared phone code projected into both views
  std::uint64_t seed = 7;

  // Throws ConfigError.
  void validate() const;
};

// Per-phone mean feature vectors. Row p-1 belongs to phone label p.
struct SynthPrototypes {
  Matrix mono;   // 39 x 768
  Matrix multi;  // 39 x 1024

  static SynthPrototypes make(std::uint64_t seed, int code_dim);
  // Nearest prototype by squared distance in the concatenated views.
  Label classify(std::span<const double> mono_frame, std::span<const double> multi_frame) const;
};

// Substitution partners: same manner with a different place for consonants,
// neighbouring height/backness for vowels. Every phone except SIL has one.
const std::vector<Label>& confusable_with(Label phone);

struct SplitSummary {
  std::string name;
  std::filesystem::path manifest;
  int utterances = 0;
  std::int64_t phones = 0;
  std::int64_t mispronounced = 0;
  std::int64_t frames = 0;
};

struct GeneratedCorpus {
  std::vector<SplitSummary> splits;  // train, dev, test
  double mispronounced_fraction() const;
};

// Writes <out>/{train,dev,test}.jsonl and <out>/feats/<split>/<id>.{mono,multi}.mvft.
// Each manifest is written after its feature files. Output is a pure function
// of `config`.
GeneratedCorpus generate(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace mvmdd::corpus

#endif  // MVMDD_CORPUSIO_HPP_
