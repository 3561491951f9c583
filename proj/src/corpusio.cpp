// src/corpusio.cpp
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

#include "mvmdd/corpusio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

#include "binary_io.hpp"
#include "builtin_data.hpp"
#include "mvmdd/ctc.hpp"
#include "mvmdd/error.hpp"
#include "mvmdd/netops.hpp"
#include "text_util.hpp"

namespace mvmdd::corpus {

namespace {

constexpr char kMagic[4] = {'M', 'V', 'F', 'T'};
constexpr std::size_t kHeaderBytes = 16;

using binary::get_le;
using binary::put_le;

void default_warn(const std::string& msg) { std::cerr << "WARNING: " << msg << '\n'; }

}  // namespace

// ---------------------------------------------------------------------------
// Feature files

void write_features(const Matrix& features, std::ostream& out) {
  if (features.rows() > std::numeric_limits<std::uint32_t>::max() ||
      features.cols() > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("feature matrix too large for the container");
  std::string buf;
  buf.reserve(kHeaderBytes + static_cast<std::size_t>(features.size()) * 4);
  buf.append(kMagic, 4);
  put_le<std::uint16_t>(buf, kFeatureVersion);
  put_le<std::uint16_t>(buf, 0);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(features.rows()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    const auto v = static_cast<float>(features.data()[i]);
    if (!std::isfinite(v)) throw ValidationError("feature value is not finite in float32");
    put_le<float>(buf, v);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed to write feature data");
}

void write_features(const Matrix& features, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  write_features(features, out);
}

Matrix read_features(std::istream& in) {
  const std::string buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (buf.size() < kHeaderBytes) throw FormatError("feature file shorter than its header");
  if (std::memcmp(buf.data(), kMagic, 4) != 0) throw FormatError("bad feature file magic");
  const auto version = get_le<std::uint16_t>(buf.data() + 4);
  if (version != kFeatureVersion)
    throw FormatError("unsupported feature file version " + std::to_string(version));
  const auto frames = get_le<std::uint32_t>(buf.data() + 8);
  const auto dim = get_le<std::uint32_t>(buf.data() + 12);
  const std::uint64_t count = static_cast<std::uint64_t>(frames) * dim;
  if (count > (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 4 ||
      count > static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max()))
    throw FormatError("feature dimensions overflow");
  const std::uint64_t expected = kHeaderBytes + count * 4;
  if (buf.size() < expected)
    throw FormatError("truncated feature payload: header says " + std::to_string(frames) + "x" +
                      std::to_string(dim) + ", file holds " +
                      std::to_string((buf.size() - kHeaderBytes) / 4) + " values");
  if (buf.size() > expected) throw FormatError("trailing bytes after feature payload");

  Matrix m(frames, dim);
  const char* p = buf.data() + kHeaderBytes;
  for (Eigen::Index i = 0; i < m.size(); ++i, p += 4) {
    m.data()[i] = get_le<float>(p);
    if (!std::isfinite(m.data()[i])) throw FormatError("non-finite feature value");
  }
  return m;
}

Matrix read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file " + path.string());
  try {
    return read_features(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Phone map

const PhoneMap& PhoneMap::builtin() {
  static const PhoneMap map = [] {
    std::istringstream in{std::string(data::kPhoneMapTsv)};
    return parse(in);
  }();
  return map;
}

PhoneMap PhoneMap::parse(std::istream& in, const PhoneInventory& inventory) {
  PhoneMap pm;
  std::string line;
  int row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (text::is_blank_or_comment(line)) continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError("expected source<TAB>target", row);
    if (!have_header) {
      if (fields[0] != "source" || fields[1] != "target")
        throw ParseError("bad header, expected source/target", row);
      have_header = true;
      continue;
    }
    if (!inventory.find(fields[1]))
      throw ParseError("target '" + std::string(fields[1]) + "' is not in the phone inventory",
                       row);
    if (!pm.map_.emplace(std::string(fields[0]), std::string(fields[1])).second)
      throw ParseError("duplicate source '" + std::string(fields[0]) + "'", row);
  }
  if (!have_header) throw ParseError("missing header row", row);
  return pm;
}

PhoneMap PhoneMap::load(const std::filesystem::path& path, const PhoneInventory& inventory) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open phone map " + path.string());
  try {
    return parse(in, inventory);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

std::string PhoneMap::apply(std::string_view symbol) const {
  auto it = map_.find(symbol);
  return it == map_.end() ? std::string(symbol) : it->second;
}

// ---------------------------------------------------------------------------
// Manifests

std::filesystem::path Manifest::resolve(const std::string& relative) const {
  std::filesystem::path p(relative);
  return p.is_absolute() ? p : dir / p;
}

Manifest parse_manifest(std::istream& in, const std::filesystem::path& dir,
                        const ManifestOptions& options) {
  const PhoneMap& phone_map = options.phone_map ? *options.phone_map : PhoneMap::builtin();
  const auto& warn = options.warn ? options.warn : default_warn;
  const PhoneInventory& inventory = PhoneInventory::standard();

  Manifest manifest;
  manifest.dir = dir;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), row);
    }
    UtteranceRecord rec;
    auto phones = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_array())
        throw ParseError(std::string("missing array field '") + key + "'", row);
      LabelSeq out;
      for (const auto& p : j[key]) {
        if (!p.is_string()) throw ParseError(std::string(key) + " holds a non-string phone", row);
        const std::string mapped = phone_map.apply(p.get<std::string>());
        auto id = inventory.find(mapped);
        if (!id)
          throw ParseError("unknown phone '" + p.get<std::string>() + "' in " + key, row);
        out.push_back(*id);
      }
      if (out.empty()) throw ParseError(std::string(key) + " sequence is empty", row);
      return out;
    };
    auto string_field = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_string())
        throw ParseError(std::string("missing string field '") + key + "'", row);
      return j[key].get<std::string>();
    };
    rec.id = string_field("id");
    rec.canonical = phones("canonical");
    rec.perceived = phones("perceived");
    rec.mono = string_field("mono");
    rec.multi = string_field("multi");
    if (!j.contains("frames") || !j["frames"].is_number_integer() || j["frames"].get<long>() < 1 ||
        j["frames"].get<long>() > std::numeric_limits<int>::max())
      throw ParseError("'frames' must be a positive integer", row);
    rec.frames = j["frames"].get<int>();

    if (options.check_files) {
      for (const auto* rel : {&rec.mono, &rec.multi}) {
        const auto path = manifest.resolve(*rel);
        if (!std::filesystem::exists(path))
          throw IoError("row " + std::to_string(row) + ": missing feature file " + path.string());
      }
    }
    const int needed = ctc::min_frames(rec.perceived);
    if (needed > rec.frames) {
      const std::string msg = "row " + std::to_string(row) + ": utterance '" + rec.id +
                              "' needs " + std::to_string(needed) + " frames for its " +
                              "perceived phones but has " + std::to_string(rec.frames);
      if (options.on_infeasible == OnInfeasible::Error) throw InfeasibleError(msg);
      warn(msg + "; skipped");
      continue;
    }
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  try {
    return parse_manifest(in, path.parent_path(), options);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

std::string manifest_line(const UtteranceRecord& record) {
  const PhoneInventory& inventory = PhoneInventory::standard();
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["canonical"] = inventory.decode(record.canonical);
  j["perceived"] = inventory.decode(record.perceived);
  j["mono"] = record.mono;
  j["multi"] = record.multi;
  j["frames"] = record.frames;
  return j.dump();
}

void write_manifest(std::span<const UtteranceRecord> records, std::ostream& out) {
  for (const auto& r : records) out << manifest_line(r) << '\n';
  if (!out) throw IoError("failed to write manifest");
}

void write_manifest(std::span<const UtteranceRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  write_manifest(records, out);
}

// ---------------------------------------------------------------------------
// Synthetic corpus

void SynthConfig::validate() const {
  if (n_train < 1 || n_dev < 1 || n_test < 0)
    throw ConfigError("need at least one train and one dev utterance");
  if (min_phones < 1 || max_phones < min_phones)
    throw ConfigError("phones_per_utt range must satisfy 1 <= min <= max");
  if (min_frames_per_phone < 1 || max_frames_per_phone < min_frames_per_phone)
    throw ConfigError("frames_per_phone range must satisfy 1 <= min <= max");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
  if (!(confusion_bias >= 0.0 && confusion_bias <= 1.0))
    throw ConfigError("confusion_bias must lie in [0, 1]");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be >= 0");
  if (code_dim < 1) throw ConfigError("code_dim must be positive");
}

SynthPrototypes SynthPrototypes::make(std::uint64_t seed, int code_dim) {
  const int phones = PhoneInventory::standard().size();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto random = [&](Eigen::Index r, Eigen::Index c, double scale) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * unit(rng);
    return m;
  };
  const Matrix codes = random(phones, code_dim, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(code_dim));
  const Matrix to_mono = random(code_dim, kMonoDim, scale);
  const Matrix to_multi = random(code_dim, kMultiDim, scale);
  // Round through float so prototypes equal what a noise-free feature file holds.
  return {(codes * to_mono).cast<float>().cast<double>(),
          (codes * to_multi).cast<float>().cast<double>()};
}

Label SynthPrototypes::classify(std::span<const double> mono_frame,
                                std::span<const double> multi_frame) const {
  Eigen::Map<const Eigen::RowVectorXd> a(mono_frame.data(),
                                         static_cast<Eigen::Index>(mono_frame.size()));
  Eigen::Map<const Eigen::RowVectorXd> b(multi_frame.data(),
                                         static_cast<Eigen::Index>(multi_frame.size()));
  Label best = 1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index p = 0; p < mono.rows(); ++p) {
    const double d = (mono.row(p) - a).squaredNorm() + (multi.row(p) - b).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<Label>(p) + 1;
    }
  }
  return best;
}

const std::vector<Label>& confusable_with(Label phone) {
  static const std::vector<std::vector<Label>> table = [] {
    const PhoneInventory& inv = PhoneInventory::standard();
    const std::vector<std::vector<std::string_view>> groups = {
        {"P", "T", "K"},       {"B", "D", "G"},   {"DX", "T", "D"},  {"F", "TH", "S", "SH"},
        {"V", "DH", "Z"},      {"CH", "JH", "SH"}, {"HH", "F"},       {"M", "N", "NG"},
        {"L", "R", "W", "Y"},  {"ER", "R"},        {"IY", "IH", "EY"}, {"EH", "AE", "EY"},
        {"AH", "AA", "AW"},    {"AY", "AW", "AA"}, {"UW", "UH", "OW"}, {"OW", "OY"},
        {"ER", "AH"}};
    std::vector<std::vector<Label>> out(inv.size() + 1);
    for (const auto& g : groups)
      for (auto a : g)
        for (auto b : g)
          if (a != b) {
            auto& v = out[inv.id(a)];
            if (std::find(v.begin(), v.end(), inv.id(b)) == v.end()) v.push_back(inv.id(b));
          }
    for (auto& v : out) std::sort(v.begin(), v.end());
    return out;
  }();
  static const std::vector<Label> none;
  if (phone < 1 || phone >= static_cast<Label>(table.size())) return none;
  return table[phone];
}

double GeneratedCorpus::mispronounced_fraction() const {
  std::int64_t phones = 0, bad = 0;
  for (const auto& s : splits) {
    phones += s.phones;
    bad += s.mispronounced;
  }
  return phones == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(phones);
}

namespace {

class UtteranceSampler {
 public:
  UtteranceSampler(const SynthConfig& config, std::mt19937_64& rng)
      : config_(config), rng_(rng), inventory_(PhoneInventory::standard()) {
    for (Label p = 1; p <= inventory_.size(); ++p)
      if (p != inventory_.silence()) speech_phones_.push_back(p);
  }

  // Canonical phones with no immediate repeats.
  LabelSeq canonical() {
    const int n = uniform_int(config_.min_phones, config_.max_phones);
    LabelSeq seq;
    while (static_cast<int>(seq.size()) < n) {
      const Label p = pick(speech_phones_);
      if (seq.empty() || seq.back() != p) seq.push_back(p);
    }
    return seq;
  }

  // Flip each position with probability rho, never producing an immediate
  // repeat, because identical adjacent phones have no audible boundary in the
  // synthetic features.
  LabelSeq perceive(const LabelSeq& canonical) {
    LabelSeq out = canonical;
    std::bernoulli_distribution flip(config_.rho);
    std::bernoulli_distribution confusable(config_.confusion_bias);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!flip(rng_)) continue;
      const Label prev = i > 0 ? out[i - 1] : kBlank;
      const Label next = i + 1 < out.size() ? canonical[i + 1] : kBlank;
      auto allowed = [&](Label p) { return p != canonical[i] && p != prev && p != next; };
      std::vector<Label> candidates;
      if (confusable(rng_))
        for (Label p : confusable_with(canonical[i]))
          if (allowed(p)) candidates.push_back(p);
      if (candidates.empty())
        for (Label p : speech_phones_)
          if (allowed(p)) candidates.push_back(p);
      out[i] = pick(candidates);
    }
    return out;
  }

  int duration() { return uniform_int(config_.min_frames_per_phone, config_.max_frames_per_phone); }

  double noise() { return config_.sigma > 0.0 ? noise_(rng_) * config_.sigma : 0.0; }

 private:
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Label pick(const std::vector<Label>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

  const SynthConfig& config_;
  std::mt19937_64& rng_;
  const PhoneInventory& inventory_;
  std::vector<Label> speech_phones_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

}  // namespace

GeneratedCorpus generate(const SynthConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  const SynthPrototypes protos = SynthPrototypes::make(config.seed, config.code_dim);
  std::mt19937_64 rng(config.seed);
  UtteranceSampler sampler(config, rng);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  GeneratedCorpus corpus;
  const std::pair<const char*, int> splits[] = {
      {"train", config.n_train}, {"dev", config.n_dev}, {"test", config.n_test}};
  for (const auto& [name, count] : splits) {
    SplitSummary summary;
    summary.name = name;
    summary.manifest = out_dir / (std::string(name) + ".jsonl");
    const auto feat_rel = std::filesystem::path("feats") / name;
    std::filesystem::create_directories(out_dir / feat_rel, ec);
    if (ec) throw IoError("cannot create " + (out_dir / feat_rel).string() + ": " + ec.message());

    std::vector<UtteranceRecord> records;
    for (int u = 0; u < count; ++u) {
      UtteranceRecord rec;
      char id[64];
      std::snprintf(id, sizeof id, "%s_%05d", name, u);
      rec.id = id;
      rec.canonical = sampler.canonical();
      rec.perceived = sampler.perceive(rec.canonical);

      std::vector<int> durations;
      for (std::size_t i = 0; i < rec.perceived.size(); ++i) durations.push_back(sampler.duration());
      int frames = 0;
      for (int d : durations) frames += d;
      rec.frames = frames;

      Matrix mono(frames, kMonoDim), multi(frames, kMultiDim);
      int t = 0;
      for (std::size_t i = 0; i < rec.perceived.size(); ++i) {
        const Eigen::Index row = rec.perceived[i] - 1;
        for (int k = 0; k < durations[i]; ++k, ++t) {
          for (Eigen::Index c = 0; c < kMonoDim; ++c)
            mono(t, c) = protos.mono(row, c) + sampler.noise();
          for (Eigen::Index c = 0; c < kMultiDim; ++c)
            multi(t, c) = protos.multi(row, c) + sampler.noise();
        }
      }
      rec.mono = (feat_rel / (rec.id + ".mono.mvft")).generic_string();
      rec.multi = (feat_rel / (rec.id + ".multi.mvft")).generic_string();
      write_features(mono, out_dir / rec.mono);
      write_features(multi, out_dir / rec.multi);

      summary.utterances += 1;
      summary.frames += frames;
      summary.phones += static_cast<std::int64_t>(rec.canonical.size());
      for (std::size_t i = 0; i < rec.canonical.size(); ++i)
        if (rec.canonical[i] != rec.perceived[i]) ++summary.mispronounced;
      records.push_back(std::move(rec));
    }
    write_manifest(records, summary.manifest);
    corpus.splits.push_back(std::move(summary));
  }
  return corpus;
}

}  // namespace mvmdd::corpus
