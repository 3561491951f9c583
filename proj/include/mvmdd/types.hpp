// include/mvmdd/types.hpp
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

#ifndef MVMDD_TYPES_HPP_
#define MVMDD_TYPES_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace mvmdd {

// Row-major so that one frame is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Output label of a CTC vocabulary. Phones and AF classes are numbered
// from 1; 0 is the blank in every head.
using Label = int;
inline constexpr Label kBlank = 0;

using LabelSeq = std::vector<Label>;

}  // namespace mvmdd

#endif  // MVMDD_TYPES_HPP_
