// src/evalmetrics.cpp
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

#include "mvmdd/evalmetrics.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "mvmdd/error.hpp"

namespace mvmdd::eval {

namespace {

int count_kind(const Alignment& a, EditKind k) {
  return static_cast<int>(
      std::count_if(a.ops.begin(), a.ops.end(), [k](const EditOp& op) { return op.kind == k; }));
}

// What an alignment against the canonical sequence says about each canonical
// position and each gap between positions.
struct CanonicalView {
  std::vector<bool> matched;                  // per canonical position
  std::vector<std::optional<Label>> aligned;  // hyp phone at that position, none if deleted
  std::map<int, LabelSeq> inserted;           // gap index (phones consumed before) -> phones
};

CanonicalView view_against(std::span<const Label> canonical, std::span<const Label> hyp) {
  CanonicalView v;
  v.matched.assign(canonical.size(), false);
  v.aligned.assign(canonical.size(), std::nullopt);
  int consumed = 0;
  for (const EditOp& op : align(canonical, hyp).ops) {
    switch (op.kind) {
      case EditKind::Match:
        v.matched[op.ref_index] = true;
        [[fallthrough]];
      case EditKind::Substitute:
        v.aligned[op.ref_index] = hyp[op.hyp_index];
        ++consumed;
        break;
      case EditKind::Delete:
        ++consumed;
        break;
      case EditKind::Insert:
        v.inserted[consumed].push_back(hyp[op.hyp_index]);
        break;
    }
  }
  return v;
}

void check_phones(std::span<const Label> seq, const PhoneInventory& inventory, const char* what) {
  for (Label l : seq)
    if (!inventory.valid(l))
      throw ValidationError(std::string(what) + " sequence contains label " + std::to_string(l) +
                            " outside the phone inventory");
}

}  // namespace

int Alignment::substitutions() const { return count_kind(*this, EditKind::Substitute); }
int Alignment::deletions() const { return count_kind(*this, EditKind::Delete); }
int Alignment::insertions() const { return count_kind(*this, EditKind::Insert); }

Alignment align(std::span<const Label> ref, std::span<const Label> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<int> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});

  Alignment out;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int here = at(i, j);
    const int ri = static_cast<int>(i) - 1, hj = static_cast<int>(j) - 1;
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && here == at(i - 1, j - 1)) {
      out.ops.push_back({EditKind::Match, ri, hj});
      --i, --j;
    } else if (i > 0 && j > 0 && ref[i - 1] != hyp[j - 1] && here == at(i - 1, j - 1) + 1) {
      out.ops.push_back({EditKind::Substitute, ri, hj});
      --i, --j;
    } else if (i > 0 && here == at(i - 1, j) + 1) {
      out.ops.push_back({EditKind::Delete, ri, -1});
      --i;
    } else {
      out.ops.push_back({EditKind::Insert, -1, hj});
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

int edit_distance(std::span<const Label> ref, std::span<const Label> hyp) {
  std::vector<int> prev(hyp.size() + 1), cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= hyp.size(); ++j)
      cur[j] = std::min({prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1), prev[j] + 1,
                         cur[j - 1] + 1});
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

double per(std::span<const Label> ref, std::span<const Label> hyp) {
  if (ref.empty()) throw ValidationError("PER is undefined for an empty reference");
  return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

void PerTally::add(std::span<const Label> ref, std::span<const Label> hyp) {
  if (ref.empty()) throw ValidationError("PER is undefined for an empty reference");
  edits += edit_distance(ref, hyp);
  ref_length += static_cast<std::int64_t>(ref.size());
}

PerTally& PerTally::operator+=(const PerTally& o) {
  edits += o.edits;
  ref_length += o.ref_length;
  return *this;
}

double PerTally::value() const {
  if (ref_length == 0) throw ValidationError("PER over an empty corpus");
  return static_cast<double>(edits) / static_cast<double>(ref_length);
}

MddCounts& MddCounts::operator+=(const MddCounts& o) {
  ta += o.ta;
  fr += o.fr;
  fa += o.fa;
  tr += o.tr;
  tr_correct_diag += o.tr_correct_diag;
  insertions += o.insertions;
  return *this;
}

MddCounts mdd_counts(std::span<const Label> canonical, std::span<const Label> perceived,
                     std::span<const Label> predicted, const MddOptions& options,
                     const PhoneInventory& inventory) {
  check_phones(canonical, inventory, "canonical");
  check_phones(perceived, inventory, "perceived");
  check_phones(predicted, inventory, "predicted");

  const CanonicalView human = view_against(canonical, perceived);
  const CanonicalView model = view_against(canonical, predicted);

  MddCounts c;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    const bool correct = human.matched[i];
    const bool accepted = model.matched[i];
    if (correct && accepted) {
      ++c.ta;
    } else if (correct) {
      ++c.fr;
    } else if (accepted) {
      ++c.fa;
    } else {
      ++c.tr;
      if (human.aligned[i] == model.aligned[i]) ++c.tr_correct_diag;
    }
  }

  std::map<int, std::pair<const LabelSeq*, const LabelSeq*>> slots;
  for (const auto& [gap, phones] : human.inserted) slots[gap].first = &phones;
  for (const auto& [gap, phones] : model.inserted) slots[gap].second = &phones;
  c.insertions = static_cast<std::int64_t>(slots.size());
  if (options.score_insertions) {
    for (const auto& [gap, pair] : slots) {
      const auto [heard, predicted_ins] = pair;
      if (heard && predicted_ins) {
        ++c.tr;
        if (*heard == *predicted_ins) ++c.tr_correct_diag;
      } else if (heard) {
        ++c.fa;
      } else {
        ++c.fr;
      }
    }
  }
  return c;
}

MddMetrics metrics(const MddCounts& counts, double per_value) {
  MddMetrics m;
  m.per = per_value;
  const auto tr = static_cast<double>(counts.tr);
  if (counts.tr + counts.fa > 0)
    m.recall = tr / static_cast<double>(counts.tr + counts.fa);
  else
    m.degenerate = true;
  if (counts.tr + counts.fr > 0)
    m.precision = tr / static_cast<double>(counts.tr + counts.fr);
  else
    m.degenerate = true;
  if (m.precision + m.recall > 0.0)
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  else
    m.degenerate = true;
  return m;
}

MddCounts Scorer::add(std::span<const Label> canonical, std::span<const Label> perceived,
                      std::span<const Label> predicted) {
  const MddCounts c = mdd_counts(canonical, perceived, predicted, options_, *inventory_);
  PerTally utt;
  utt.add(perceived, predicted);
  counts_ += c;
  per_ += utt;
  per_utt_.push_back(metrics(c, utt.value()));
  return c;
}

MddMetrics Scorer::result(Averaging averaging) const {
  if (averaging == Averaging::Micro) return metrics(counts_, per_.value());
  if (per_utt_.empty()) throw ValidationError("no utterances scored");
  MddMetrics avg;
  for (const auto& m : per_utt_) {
    avg.recall += m.recall;
    avg.precision += m.precision;
    avg.f1 += m.f1;
    avg.per += m.per;
    avg.degenerate = avg.degenerate || m.degenerate;
  }
  const auto n = static_cast<double>(per_utt_.size());
  avg.recall /= n;
  avg.precision /= n;
  avg.f1 /= n;
  avg.per /= n;
  return avg;
}

}  // namespace mvmdd::eval
