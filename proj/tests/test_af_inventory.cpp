// tests/test_af_inventory.cpp
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

#include <cctype>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mvmdd/af_inventory.hpp"
#include "mvmdd/error.hpp"
#include "support.hpp"

using namespace mvmdd;

namespace {

const PhoneInventory& inv() { return PhoneInventory::standard(); }
const AfTable& table() { return AfTable::builtin(); }

std::string cls(const char* phone, AfStream s) {
  return std::string(table().class_name(s, table().class_of(inv().id(phone), s)));
}

// Builtin table text with one line replaced (1-based line number).
std::string with_line(int line_no, const std::string& replacement) {
  std::istringstream in{std::string(AfTable::builtin_text())};
  std::string out, line;
  for (int n = 1; std::getline(in, line); ++n) out += (n == line_no ? replacement : line) + "\n";
  return out;
}

int line_of(const std::string& phone) {
  std::istringstream in{std::string(AfTable::builtin_text())};
  std::string line;
  for (int n = 1; std::getline(in, line); ++n)
    if (line.rfind(phone + "\t", 0) == 0) return n;
  return -1;
}

void expect_parse_error(const std::string& text, int row) {
  std::istringstream in(text);
  try {
    AfTable::parse(in);
    FAIL("parse accepted a broken table");
  } catch (const ParseError& e) {
    CHECK(e.row() == row);
  }
}

}  // namespace

TEST_CASE("inventory") {
  CHECK(inv().size() == 39);
  std::set<std::string> seen;
  for (const auto& p : inv().phones()) {
    CHECK(seen.insert(p).second);
    for (char c : p) CHECK(std::isupper(static_cast<unsigned char>(c)));
  }
  CHECK(inv().find("SIL").has_value());
  CHECK(inv().blank_id() == 0);
  CHECK_FALSE(inv().valid(inv().blank_id()));
  CHECK(inv().valid(1));
  CHECK(inv().valid(39));
  CHECK_FALSE(inv().valid(40));
  CHECK(inv().decode(inv().encode(std::vector<std::string>{"P", "T", "K"})) ==
        std::vector<std::string>{"P", "T", "K"});
  CHECK_THROWS_AS(inv().id("ZZ"), ValidationError);
  CHECK_THROWS_AS(PhoneInventory({"A", "B"}), ValidationError);
  CHECK_THROWS_AS(PhoneInventory({"SIL", "a"}), ValidationError);
  CHECK_THROWS_AS(PhoneInventory({"SIL", "A", "A"}), ValidationError);
}

TEST_CASE("stream names") {
  CHECK(kAfStreams.size() == 4);
  CHECK(code_name(AfStream::Manner) == "AF_M");
  CHECK(code_name(AfStream::Place) == "AF_P");
  CHECK(code_name(AfStream::HighLow) == "AF_HL");
  CHECK(code_name(AfStream::FrontBack) == "AF_FB");
  for (AfStream s : kAfStreams) {
    CHECK(parse_af_stream(code_name(s)) == s);
    CHECK(parse_af_stream(column_name(s)) == s);
  }
  CHECK_FALSE(parse_af_stream("AF_X").has_value());
}

TEST_CASE("class cardinalities and names") {
  CHECK(table().num_classes(AfStream::Manner) == 7);
  CHECK(table().num_classes(AfStream::Place) == 6);
  CHECK(table().num_classes(AfStream::HighLow) == 4);
  CHECK(table().num_classes(AfStream::FrontBack) == 4);
  const std::vector<std::string> manner = {"vowel", "stop", "fricative", "retroflex",
                                           "approximant", "nasal", "silence"};
  for (std::size_t i = 0; i < manner.size(); ++i)
    CHECK(table().class_name(AfStream::Manner, static_cast<Label>(i + 1)) == manner[i]);
  CHECK(table().class_id(AfStream::Place, "velar").has_value());
  CHECK_FALSE(table().class_id(AfStream::Place, "dorsal").has_value());
}

TEST_CASE("spot values") {
  CHECK(cls("P", AfStream::Manner) == "stop");
  CHECK(cls("P", AfStream::Place) == "bilabial");
  CHECK(cls("T", AfStream::Place) == "alveolar");
  CHECK(cls("K", AfStream::Place) == "velar");
  CHECK(cls("SIL", AfStream::Manner) == "silence");
  CHECK(cls("SIL", AfStream::Place) == "nil");
  CHECK(cls("SIL", AfStream::HighLow) == "nil");
  CHECK(cls("SIL", AfStream::FrontBack) == "nil");
  CHECK(cls("IY", AfStream::Manner) == "vowel");
  CHECK(cls("IY", AfStream::Place) == "nil");
  CHECK(cls("IY", AfStream::HighLow) == "high");
  CHECK(cls("IY", AfStream::FrontBack) == "front");
}

TEST_CASE("totality and vowel/consonant consistency over the inventory") {
  for (Label p = 1; p <= inv().size(); ++p) {
    std::array<std::string, 4> c;
    for (AfStream s : kAfStreams) {
      const Label k = table().class_of(p, s);
      CHECK(k >= 1);
      CHECK(k <= table().num_classes(s));
      c[static_cast<int>(s)] = std::string(table().class_name(s, k));
    }
    const bool vowel = c[0] == "vowel";
    CHECK(vowel == (c[2] != "nil"));
    CHECK(vowel == (c[3] != "nil"));
    if (c[0] != "vowel" && c[0] != "silence") {
      CHECK(c[2] == "nil");
      CHECK(c[3] == "nil");
    }
  }
}

TEST_CASE("map_sequence") {
  const auto seq = [](std::vector<std::string> s) { return inv().encode(s); };
  CHECK(map_sequence(LabelSeq{}, AfStream::Manner, table()).empty());
  const LabelSeq m = map_sequence(seq({"P", "T", "K"}), AfStream::Manner, table());
  const Label stop = *table().class_id(AfStream::Manner, "stop");
  CHECK(m == LabelSeq{stop, stop, stop});
  const LabelSeq p = map_sequence(seq({"P", "T"}), AfStream::Place, table());
  CHECK(p == LabelSeq{*table().class_id(AfStream::Place, "bilabial"),
                      *table().class_id(AfStream::Place, "alveolar")});
  // Elementwise: mapping a concatenation is the concatenation of mappings.
  std::mt19937_64 rng(1);
  for (int n = 0; n < 50; ++n) {
    const LabelSeq a = testing::random_labels(n % 7, 39, rng);
    const LabelSeq b = testing::random_labels(n % 5, 39, rng);
    LabelSeq ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    for (AfStream s : kAfStreams) {
      LabelSeq joined = map_sequence(a, s, table());
      const LabelSeq mb = map_sequence(b, s, table());
      joined.insert(joined.end(), mb.begin(), mb.end());
      CHECK(map_sequence(ab, s, table()) == joined);
    }
  }
  CHECK_THROWS_AS(map_sequence(LabelSeq{40}, AfStream::Manner, table()), ValidationError);
  CHECK_THROWS_AS(map_sequence(LabelSeq{0}, AfStream::Manner, table()), ValidationError);
}

TEST_CASE("builtin table equals the shipped data file") {
  const std::string file = testing::slurp(MVMDD_DATA_DIR "/af_table.tsv");
  CHECK(file == std::string(AfTable::builtin_text()));
  const AfTable loaded = AfTable::load(MVMDD_DATA_DIR "/af_table.tsv");
  for (Label p = 1; p <= inv().size(); ++p)
    for (AfStream s : kAfStreams) CHECK(loaded.class_of(p, s) == table().class_of(p, s));
  CHECK(&AfTable::load_or_builtin("").inventory() == &inv());
}

TEST_CASE("parse errors carry the row") {
  const int p_row = line_of("P");
  const int iy_row = line_of("IY");
  REQUIRE(p_row > 0);
  expect_parse_error(with_line(p_row, "P\tstop\tbilabial\tnil"), p_row);
  expect_parse_error(with_line(p_row, "ZZ\tstop\tbilabial\tnil\tnil"), p_row);
  expect_parse_error(with_line(p_row, "P\tplosive\tbilabial\tnil\tnil"), p_row);
  expect_parse_error(with_line(p_row, "P\tstop\tdorsal\tnil\tnil"), p_row);
  expect_parse_error(with_line(p_row, "P\tstop\tbilabial\thigh\tnil"), p_row);
  expect_parse_error(with_line(iy_row, "IY\tvowel\tnil\tnil\tfront"), iy_row);
  // A duplicate is reported where the second definition appears.
  expect_parse_error(with_line(iy_row, "P\tstop\tbilabial\tnil\tnil"), std::max(p_row, iy_row));
  expect_parse_error(with_line(line_of("SIL"), "SIL\tsilence\tbilabial\tnil\tnil"), line_of("SIL"));
  expect_parse_error(with_line(line_of("SIL"), "SIL\tstop\tbilabial\tnil\tnil"), line_of("SIL"));
  // Dropping a row breaks totality.
  std::istringstream missing(with_line(p_row, "# removed"));
  CHECK_THROWS_AS(AfTable::parse(missing), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(AfTable::parse(empty), ParseError);
  CHECK_THROWS_AS(AfTable::load("/nonexistent/af.tsv"), IoError);
}
