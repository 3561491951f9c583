// include/mvmdd/af_inventory.hpp
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

#ifndef MVMDD_AF_INVENTORY_HPP_
#define MVMDD_AF_INVENTORY_HPP_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvmdd/types.hpp"

namespace mvmdd {

// The reduced 39-phone ARPAbet set. Phone labels run 1..39 in the order of
// phones(); label 0 is the CTC blank and never names a phone.
class PhoneInventory {
 public:
  static const PhoneInventory& standard();

  explicit PhoneInventory(std::vector<std::string> phones);

  int size() const { return static_cast<int>(phones_.size()); }
  std::span<const std::string> phones() const { return phones_; }
  Label blank_id() const { return kBlank; }
  Label silence() const { return silence_; }

  bool valid(Label id) const { return id >= 1 && id <= size(); }
  const std::string& symbol(Label id) const;
  std::optional<Label> find(std::string_view symbol) const;
  // Throws ValidationError naming the symbol.
  Label id(std::string_view symbol) const;

  LabelSeq encode(std::span<const std::string> symbols) const;
  std::vector<std::string> decode(std::span<const Label> ids) const;

 private:
  std::vector<std::string> phones_;
  Label silence_ = kBlank;
};

enum class AfStream { Manner = 0, Place = 1, HighLow = 2, FrontBack = 3 };

inline constexpr int kNumAfStreams = 4;
inline constexpr std::array<AfStream, kNumAfStreams> kAfStreams = {
    AfStream::Manner, AfStream::Place, AfStream::HighLow, AfStream::FrontBack};

// "AF_M", "AF_P", "AF_HL", "AF_FB".
std::string_view code_name(AfStream s);
// Column name used in the table file: "manner", "place", ...
std::string_view column_name(AfStream s);
std::optional<AfStream> parse_af_stream(std::string_view code_or_column);

// Class inventories, fixed by the model definition. Index i holds class label
// i + 1.
std::span<const std::string_view> af_class_names(AfStream s);

// Total mapping phone -> AF class for all four streams. Immutable once built.
class AfTable {
 public:
  // The mapping shipped with the library (data/af_table.tsv).
  static const AfTable& builtin();
  static std::string_view builtin_text();

  // TSV: header "phone\tmanner\tplace\thighlow\tfrontback", '#' comments.
  // Throws ParseError carrying the offending row.
  static AfTable parse(std::istream& in,
                       const PhoneInventory& inventory = PhoneInventory::standard());
  static AfTable load(const std::filesystem::path& path,
                      const PhoneInventory& inventory = PhoneInventory::standard());
  // Empty path selects builtin().
  static AfTable load_or_builtin(const std::filesystem::path& path);

  const PhoneInventory& inventory() const { return *inventory_; }
  int num_classes(AfStream s) const;
  std::string_view class_name(AfStream s, Label cls) const;
  std::optional<Label> class_id(AfStream s, std::string_view name) const;
  Label class_of(Label phone, AfStream s) const;

 private:
  explicit AfTable(const PhoneInventory& inventory);

  const PhoneInventory* inventory_;
  // map_[stream][phone label]; slot 0 unused.
  std::array<std::vector<Label>, kNumAfStreams> map_;
};

// Elementwise phone -> class mapping. Repeated classes are kept, so the
// result always has the length of `phones`.
LabelSeq map_sequence(std::span<const Label> phones, AfStream stream, const AfTable& table);

}  // namespace mvmdd

#endif  // MVMDD_AF_INVENTORY_HPP_
