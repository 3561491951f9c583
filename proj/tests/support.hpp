// tests/support.hpp
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

// Helpers shared by the unit tests and the acceptance runner.

#ifndef MVMDD_TESTS_SUPPORT_HPP_
#define MVMDD_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mvmdd/netops.hpp"
#include "mvmdd/types.hpp"

namespace mvmdd::testing {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0);
// Rows are probability distributions (strictly positive).
Matrix random_probs(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);
LabelSeq random_labels(int length, int max_label, std::mt19937_64& rng);

std::string slurp(const std::filesystem::path& path);

// Fresh directory, removed with its contents on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mvmdd");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Small network used by the gradient checks: 5 phones, emb 16, 2 channels.
NetConfig tiny_net();

struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst;  // tensor[index] with the largest error
  int checked = 0;
  int skipped = 0;  // perturbations that flipped a max(0, .) unit
};

// Total loss CTC(PR) + CTC(AF manner) on a random T=12 utterance through the
// tiny network; every parameter's analytic gradient against central
// differences with step `h`. Relative error is |a - n| / max(|a|, |n|, floor).
GradCheck check_model_gradient(std::uint64_t seed, double h = 1e-5, double floor = 1e-6);

}  // namespace mvmdd::testing

#endif  // MVMDD_TESTS_SUPPORT_HPP_
