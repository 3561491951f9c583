// include/mvmdd/evalmetrics.hpp
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

#ifndef MVMDD_EVALMETRICS_HPP_
#define MVMDD_EVALMETRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvmdd/af_inventory.hpp"
#include "mvmdd/types.hpp"

namespace mvmdd::eval {

enum class EditKind { Match, Substitute, Delete, Insert };

// ref_index is -1 for Insert, hyp_index is -1 for Delete.
struct EditOp {
  EditKind kind;
  int ref_index;
  int hyp_index;
  bool operator==(const EditOp&) const = default;
};

struct Alignment {
  std::vector<EditOp> ops;

  int substitutions() const;
  int deletions() const;
  int insertions() const;
  int errors() const { return substitutions() + deletions() + insertions(); }
};

// Unit-cost Levenshtein alignment. Backtrace prefers
// Match > Substitute > Delete > Insert whenever costs tie.
Alignment align(std::span<const Label> ref, std::span<const Label> hyp);

// Edit distance only, O(min) memory.
int edit_distance(std::span<const Label> ref, std::span<const Label> hyp);

// (S + D + I) / |ref|. Throws ValidationError for an empty reference.
double per(std::span<const Label> ref, std::span<const Label> hyp);

// Corpus-level PER as a micro average: total edits over total reference length.
struct PerTally {
  std::int64_t edits = 0;
  std::int64_t ref_length = 0;

  void add(std::span<const Label> ref, std::span<const Label> hyp);
  PerTally& operator+=(const PerTally& o);
  // Throws ValidationError when nothing was added.
  double value() const;
};

struct MddCounts {
  std::int64_t ta = 0;
  std::int64_t fr = 0;
  std::int64_t fa = 0;
  std::int64_t tr = 0;
  std::int64_t tr_correct_diag = 0;  // TR where the predicted phone equals the perceived one
  std::int64_t insertions = 0;       // insertion slots, see MddOptions

  std::int64_t scored() const { return ta + fr + fa + tr; }
  MddCounts& operator+=(const MddCounts& o);
  bool operator==(const MddCounts&) const = default;
};

struct MddOptions {
  // Insertion slots are the gaps between canonical phones where the
  // perceived or predicted sequence inserted something. By default they are
  // only counted in `insertions`. When true they are also scored: both
  // inserted -> TR, only perceived -> FA, only predicted -> FR.
  bool score_insertions = false;
};

// Three-way comparison via two alignments against the canonical sequence.
// Every phone must be a valid label of `inventory`.
MddCounts mdd_counts(std::span<const Label> canonical, std::span<const Label> perceived,
                     std::span<const Label> predicted, const MddOptions& options = {},
                     const PhoneInventory& inventory = PhoneInventory::standard());

struct MddMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double per = 0.0;
  // Set when TR+FA or TR+FR was zero and the affected ratio was forced to 0.
  bool degenerate = false;
};

// R = TR/(TR+FA), P = TR/(TR+FR), F1 their harmonic mean.
MddMetrics metrics(const MddCounts& counts, double per_value);

// Pools per-utterance results. Micro pools counts before taking ratios;
// macro averages per-utterance metrics.
enum class Averaging { Micro, Macro };

class Scorer {
 public:
  explicit Scorer(MddOptions options = {},
                  const PhoneInventory& inventory = PhoneInventory::standard())
      : options_(options), inventory_(&inventory) {}

  // PER is measured between perceived and predicted.
  MddCounts add(std::span<const Label> canonical, std::span<const Label> perceived,
                std::span<const Label> predicted);

  const MddCounts& counts() const { return counts_; }
  const PerTally& per_tally() const { return per_; }
  std::int64_t utterances() const { return static_cast<std::int64_t>(per_utt_.size()); }
  MddMetrics result(Averaging averaging = Averaging::Micro) const;

 private:
  MddOptions options_;
  const PhoneInventory* inventory_;
  MddCounts counts_;
  PerTally per_;
  std::vector<MddMetrics> per_utt_;
};

}  // namespace mvmdd::eval

#endif  // MVMDD_EVALMETRICS_HPP_
