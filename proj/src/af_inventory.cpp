// src/af_inventory.cpp
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

#include "mvmdd/af_inventory.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "builtin_data.hpp"
#include "mvmdd/error.hpp"
#include "text_util.hpp"

namespace mvmdd {

namespace {

constexpr std::array<std::string_view, 7> kMannerClasses = {
    "vowel", "stop", "fricative", "retroflex", "approximant", "nasal", "silence"};
constexpr std::array<std::string_view, 6> kPlaceClasses = {
    "bilabial", "alveolar", "dental", "labiodental", "velar", "nil"};
constexpr std::array<std::string_view, 4> kHighLowClasses = {"low", "mid", "high", "nil"};
constexpr std::array<std::string_view, 4> kFrontBackClasses = {"front", "central", "back",
                                                               "nil"};

int stream_index(AfStream s) { return static_cast<int>(s); }

}  // namespace

// ---------------------------------------------------------------------------
// PhoneInventory

const PhoneInventory& PhoneInventory::standard() {
  static const PhoneInventory inv({"AA", "AE", "AH", "AW", "AY", "B",  "CH", "D",
                                   "DH", "DX", "EH", "ER", "EY", "F",  "G",  "HH",
                                   "IH", "IY", "JH", "K",  "L",  "M",  "N",  "NG",
                                   "OW", "OY", "P",  "R",  "S",  "SH", "SIL", "T",
                                   "TH", "UH", "UW", "V",  "W",  "Y",  "Z"});
  return inv;
}

PhoneInventory::PhoneInventory(std::vector<std::string> phones) : phones_(std::move(phones)) {
  for (std::size_t i = 0; i < phones_.size(); ++i) {
    const auto& p = phones_[i];
    if (p.empty() || !std::all_of(p.begin(), p.end(), [](unsigned char c) {
          return std::isupper(c) || std::isdigit(c);
        }))
      throw ValidationError("phone symbol '" + p + "' is not uppercase ASCII");
    if (std::find(phones_.begin(), phones_.begin() + i, p) != phones_.begin() + i)
      throw ValidationError("duplicate phone symbol '" + p + "'");
    if (p == "SIL") silence_ = static_cast<Label>(i) + 1;
  }
  if (silence_ == kBlank) throw ValidationError("phone inventory lacks SIL");
}

const std::string& PhoneInventory::symbol(Label id) const {
  if (!valid(id)) throw ValidationError("phone index " + std::to_string(id) + " out of range");
  return phones_[id - 1];
}

std::optional<Label> PhoneInventory::find(std::string_view symbol) const {
  auto it = std::find(phones_.begin(), phones_.end(), symbol);
  if (it == phones_.end()) return std::nullopt;
  return static_cast<Label>(it - phones_.begin()) + 1;
}

Label PhoneInventory::id(std::string_view symbol) const {
  if (auto found = find(symbol)) return *found;
  throw ValidationError("unknown phone '" + std::string(symbol) + "'");
}

LabelSeq PhoneInventory::encode(std::span<const std::string> symbols) const {
  LabelSeq out;
  out.reserve(symbols.size());
  for (const auto& s : symbols) out.push_back(id(s));
  return out;
}

std::vector<std::string> PhoneInventory::decode(std::span<const Label> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (Label l : ids) out.push_back(symbol(l));
  return out;
}

// ---------------------------------------------------------------------------
// AF streams

std::string_view code_name(AfStream s) {
  switch (s) {
    case AfStream::Manner: return "AF_M";
    case AfStream::Place: return "AF_P";
    case AfStream::HighLow: return "AF_HL";
    case AfStream::FrontBack: return "AF_FB";
  }
  return "?";
}

std::string_view column_name(AfStream s) {
  switch (s) {
    case AfStream::Manner: return "manner";
    case AfStream::Place: return "place";
    case AfStream::HighLow: return "highlow";
    case AfStream::FrontBack: return "frontback";
  }
  return "?";
}

std::optional<AfStream> parse_af_stream(std::string_view name) {
  for (AfStream s : kAfStreams)
    if (name == code_name(s) || name == column_name(s)) return s;
  return std::nullopt;
}

std::span<const std::string_view> af_class_names(AfStream s) {
  switch (s) {
    case AfStream::Manner: return kMannerClasses;
    case AfStream::Place: return kPlaceClasses;
    case AfStream::HighLow: return kHighLowClasses;
    case AfStream::FrontBack: return kFrontBackClasses;
  }
  return {};
}

// ---------------------------------------------------------------------------
// AfTable

AfTable::AfTable(const PhoneInventory& inventory) : inventory_(&inventory) {
  for (auto& m : map_) m.assign(inventory.size() + 1, kBlank);
}

const AfTable& AfTable::builtin() {
  static const AfTable table = [] {
    std::istringstream in{std::string(builtin_text())};
    return parse(in);
  }();
  return table;
}

std::string_view AfTable::builtin_text() { return data::kAfTableTsv; }

int AfTable::num_classes(AfStream s) const {
  return static_cast<int>(af_class_names(s).size());
}

std::string_view AfTable::class_name(AfStream s, Label cls) const {
  auto names = af_class_names(s);
  if (cls < 1 || cls > static_cast<Label>(names.size()))
    throw ValidationError("class index " + std::to_string(cls) + " out of range for " +
                          std::string(code_name(s)));
  return names[cls - 1];
}

std::optional<Label> AfTable::class_id(AfStream s, std::string_view name) const {
  auto names = af_class_names(s);
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Label>(it - names.begin()) + 1;
}

Label AfTable::class_of(Label phone, AfStream s) const {
  if (!inventory_->valid(phone))
    throw ValidationError("phone index " + std::to_string(phone) + " out of range");
  return map_[stream_index(s)][phone];
}

AfTable AfTable::parse(std::istream& in, const PhoneInventory& inventory) {
  AfTable table(inventory);
  std::vector<int> defined_on_row(inventory.size() + 1, 0);
  bool have_header = false;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::is_blank_or_comment(line)) continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 5)
      throw ParseError("expected 5 tab-separated fields, got " + std::to_string(fields.size()),
                       row);
    if (!have_header) {
      if (fields[0] != "phone" || fields[1] != "manner" || fields[2] != "place" ||
          fields[3] != "highlow" || fields[4] != "frontback")
        throw ParseError("bad header, expected phone/manner/place/highlow/frontback", row);
      have_header = true;
      continue;
    }
    auto phone = inventory.find(fields[0]);
    if (!phone) throw ParseError("unknown phone '" + std::string(fields[0]) + "'", row);
    if (defined_on_row[*phone] != 0)
      throw ParseError("phone '" + std::string(fields[0]) + "' already defined on row " +
                           std::to_string(defined_on_row[*phone]),
                       row);
    defined_on_row[*phone] = row;
    for (AfStream s : kAfStreams) {
      auto cls = table.class_id(s, fields[1 + stream_index(s)]);
      if (!cls)
        throw ParseError("unknown " + std::string(column_name(s)) + " class '" +
                             std::string(fields[1 + stream_index(s)]) + "'",
                         row);
      table.map_[stream_index(s)][*phone] = *cls;
    }

    // Vowel/consonant consistency.
    const auto manner = table.class_name(AfStream::Manner, table.map_[0][*phone]);
    const auto place = table.class_name(AfStream::Place, table.map_[1][*phone]);
    const auto hl = table.class_name(AfStream::HighLow, table.map_[2][*phone]);
    const auto fb = table.class_name(AfStream::FrontBack, table.map_[3][*phone]);
    const bool vowel = manner == "vowel";
    if (vowel != (hl != "nil") || vowel != (fb != "nil"))
      throw ParseError("phone '" + std::string(fields[0]) +
                           "': highlow/frontback must be non-nil exactly for vowels",
                       row);
    if (manner == "silence" && (place != "nil" || hl != "nil" || fb != "nil"))
      throw ParseError("silence must map to nil in place/highlow/frontback", row);
    if (*phone == inventory.silence() && manner != "silence")
      throw ParseError("SIL must have manner 'silence'", row);
  }
  if (!have_header) throw ParseError("missing header row", row);
  for (Label p = 1; p <= inventory.size(); ++p)
    if (defined_on_row[p] == 0)
      throw ParseError("missing phone '" + inventory.symbol(p) + "' (mapping is not total)",
                       row);
  return table;
}

AfTable AfTable::load(const std::filesystem::path& path, const PhoneInventory& inventory) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open AF table " + path.string());
  try {
    return parse(in, inventory);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

AfTable AfTable::load_or_builtin(const std::filesystem::path& path) {
  if (path.empty()) return builtin();
  return load(path);
}

LabelSeq map_sequence(std::span<const Label> phones, AfStream stream, const AfTable& table) {
  LabelSeq out;
  out.reserve(phones.size());
  for (Label p : phones) out.push_back(table.class_of(p, stream));
  return out;
}

}  // namespace mvmdd
