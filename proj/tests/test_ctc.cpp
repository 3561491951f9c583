// tests/test_ctc.cpp
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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "mvmdd/ctc.hpp"
#include "mvmdd/error.hpp"
#include "support.hpp"

using namespace mvmdd;
using mvmdd::testing::random_labels;
using mvmdd::testing::random_matrix;
using mvmdd::testing::random_probs;

namespace {

Matrix uniform(int frames, int vocab) { return Matrix::Constant(frames, vocab, 0.0); }

// Logits whose per-frame argmax is the given label.
Matrix peaked(const LabelSeq& argmax, int vocab) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(argmax.size()), vocab);
  for (std::size_t t = 0; t < argmax.size(); ++t) m(static_cast<Eigen::Index>(t), argmax[t]) = 3.0;
  return m;
}

}  // namespace

TEST_CASE("single frame, single label") {
  const auto r = ctc::ctc_loss(uniform(1, 2), LabelSeq{1});
  CHECK(r.loss == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(std::abs(r.loss - std::log(2.0)) < 1e-12);
  CHECK(std::abs(ctc::ctc_brute_force(Matrix::Constant(1, 2, 0.5), LabelSeq{1}) - std::log(2.0)) <
        1e-12);
}

TEST_CASE("two uniform frames") {
  const auto r = ctc::ctc_loss(uniform(2, 2), LabelSeq{1});
  CHECK(std::abs(r.loss - (-std::log(0.75))) < 1e-12);
  CHECK(r.loss == doctest::Approx(0.287682).epsilon(1e-6));
  CHECK(std::abs(ctc::ctc_brute_force(Matrix::Constant(2, 2, 0.5), LabelSeq{1}) + std::log(0.75)) <
        1e-12);
}

TEST_CASE("loss matches brute force on random lattices") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> frames(1, 6), vocab(2, 4), len(1, 3);
  int compared = 0;
  for (int n = 0; n < 300; ++n) {
    const int t = frames(rng), v = vocab(rng);
    const LabelSeq target = random_labels(len(rng), v - 1, rng);
    const Matrix logits = random_matrix(t, v, rng, -2.0, 2.0);
    const Matrix probs = ctc::log_softmax(logits).array().exp().matrix();
    if (t < ctc::min_frames(target)) {
      CHECK_THROWS_AS(ctc::ctc_loss(logits, target), InfeasibleError);
      CHECK_THROWS_AS(ctc::ctc_brute_force(probs, target), InfeasibleError);
      continue;
    }
    CHECK(std::abs(ctc::ctc_loss(logits, target).loss - ctc::ctc_brute_force(probs, target)) <=
          1e-9);
    ++compared;
  }
  CHECK(compared >= 200);
}

TEST_CASE("repeated target on a 5x3 lattice") {
  std::mt19937_64 rng(5);
  const Matrix logits = random_matrix(5, 3, rng);
  const Matrix probs = ctc::log_softmax(logits).array().exp().matrix();
  const double brute = ctc::ctc_brute_force(probs, LabelSeq{1, 1});
  CHECK(std::isfinite(brute));
  CHECK(std::abs(ctc::ctc_loss(logits, LabelSeq{1, 1}).loss - brute) < 1e-9);
}

TEST_CASE("alpha-beta occupancy sums to the likelihood at every frame") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    const Matrix logits = random_matrix(9, 5, rng, -3, 3);
    const LabelSeq target = random_labels(3, 4, rng);
    const auto lat = ctc::forward_backward(ctc::log_softmax(logits), target);
    for (Eigen::Index t = 0; t < logits.rows(); ++t) {
      double acc = -std::numeric_limits<double>::infinity();
      for (Eigen::Index s = 0; s < lat.log_alpha.cols(); ++s)
        acc = ctc::log_add(acc, lat.log_alpha(t, s) + lat.log_beta(t, s));
      CHECK(std::abs(acc - lat.log_likelihood) < 1e-8);
    }
    CHECK(lat.extended.size() == 7);
  }
}

TEST_CASE("gradient matches central differences and rows sum to zero") {
  std::mt19937_64 rng(17);
  const double h = 1e-5;
  for (int n = 0; n < 20; ++n) {
    Matrix logits = random_matrix(7, 4, rng, -2, 2);
    const LabelSeq target = random_labels(3, 3, rng);
    if (7 < ctc::min_frames(target)) continue;
    const auto r = ctc::ctc_loss(logits, target);
    CHECK(r.loss >= 0.0);
    for (Eigen::Index t = 0; t < logits.rows(); ++t) CHECK(std::abs(r.grad_logits.row(t).sum()) < 1e-6);
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      const double saved = logits.data()[i];
      logits.data()[i] = saved + h;
      const double up = ctc::ctc_loss(logits, target).loss;
      logits.data()[i] = saved - h;
      const double down = ctc::ctc_loss(logits, target).loss;
      logits.data()[i] = saved;
      const double num = (up - down) / (2 * h);
      const double a = r.grad_logits.data()[i];
      CHECK(std::abs(a - num) / std::max({std::abs(a), std::abs(num), 1e-6}) <= 1e-4);
    }
  }
}

TEST_CASE("appending a uniform frame keeps a target feasible") {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 40; ++n) {
    const LabelSeq target = random_labels(3, 3, rng);
    const int t = ctc::min_frames(target);
    Matrix logits = random_matrix(t, 4, rng);
    REQUIRE_NOTHROW(ctc::ctc_loss(logits, target));
    Matrix longer(t + 1, 4);
    longer << logits, Matrix::Zero(1, 4);
    CHECK(std::isfinite(ctc::ctc_loss(longer, target).loss));
  }
}

TEST_CASE("minimum frame counts") {
  CHECK(ctc::min_frames(LabelSeq{1, 2, 3}) == 3);
  CHECK(ctc::min_frames(LabelSeq{1, 1}) == 3);
  CHECK(ctc::min_frames(LabelSeq{2, 2, 2}) == 5);
  CHECK_THROWS_AS(ctc::ctc_loss(uniform(2, 3), LabelSeq{1, 1}), InfeasibleError);
  CHECK_NOTHROW(ctc::ctc_loss(uniform(3, 3), LabelSeq{1, 1}));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(ctc::ctc_loss(uniform(3, 3), LabelSeq{}), ValidationError);
  CHECK_THROWS_AS(ctc::ctc_loss(uniform(3, 3), LabelSeq{1, 0}), ValidationError);
  CHECK_THROWS_AS(ctc::ctc_loss(uniform(3, 3), LabelSeq{3}), ValidationError);
  CHECK_THROWS_AS(ctc::ctc_loss(uniform(3, 1), LabelSeq{1}), ValidationError);
  Matrix bad = uniform(3, 3);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ctc::ctc_loss(bad, LabelSeq{1}), NumericalError);
  CHECK_THROWS_AS(ctc::ctc_brute_force(Matrix::Constant(13, 2, 0.5), LabelSeq{1}), ValidationError);
  CHECK_THROWS_AS(ctc::ctc_brute_force(Matrix::Constant(2, 2, 0.5), LabelSeq{1, 1, 1}),
                  InfeasibleError);
}

TEST_CASE("long sequences stay finite in log space") {
  std::mt19937_64 rng(29);
  const Matrix logits = random_matrix(2000, 40, rng, -8, 8);
  const LabelSeq target = random_labels(300, 39, rng);
  const auto r = ctc::ctc_loss(logits, target);
  CHECK(std::isfinite(r.loss));
  CHECK(r.grad_logits.allFinite());
}

TEST_CASE("greedy decoding") {
  CHECK(ctc::greedy_decode(peaked({0, 1, 1, 0, 2}, 3)) == LabelSeq{1, 2});
  CHECK(ctc::greedy_decode(peaked({0, 0, 0}, 3)).empty());
  CHECK(ctc::greedy_decode(peaked({1, 0, 1}, 3)) == LabelSeq{1, 1});
  // Ties go to the smaller index: the blank here.
  CHECK(ctc::greedy_decode(Matrix::Constant(4, 3, 0.25)).empty());
  Matrix tie = Matrix::Zero(2, 3);
  tie(0, 1) = tie(0, 2) = 1.0;
  tie(1, 2) = 1.0;
  CHECK(ctc::greedy_decode(tie) == LabelSeq{1, 2});
  CHECK(ctc::collapse(LabelSeq{2, 2, 0, 2, 3, 3, 0}) == LabelSeq{2, 2, 3});
}
