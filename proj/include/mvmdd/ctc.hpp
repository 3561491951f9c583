// include/mvmdd/ctc.hpp
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

#ifndef MVMDD_CTC_HPP_
#define MVMDD_CTC_HPP_

#include <span>

#include "mvmdd/types.hpp"

namespace mvmdd::ctc {

// log(exp(a) + exp(b)) without overflow; -inf is the identity.
double log_add(double a, double b);

// Row-wise log-softmax of a T x V logit matrix.
Matrix log_softmax(const Matrix& logits);

// Smallest T for which `target` is producible: one frame per label plus one
// blank between every adjacent equal pair.
int min_frames(std::span<const Label> target);

struct CtcResult {
  double loss = 0.0;   // -log p(target | logits), nats
  Matrix grad_logits;  // d loss / d logits, T x V
};

// Forward and backward variables over the blank-extended target
// (length 2L+1). alpha(t, s) includes the emission at frame t, beta(t, s)
// covers frames t+1..T-1 only, so logsumexp_s(alpha(t,s) + beta(t,s)) is the
// total log-likelihood for every t.
struct Lattice {
  LabelSeq extended;
  Matrix log_alpha;  // T x (2L+1)
  Matrix log_beta;   // T x (2L+1)
  double log_likelihood = 0.0;
};

// `log_probs` is a normalized T x V log-probability lattice, blank at
// column 0. Throws InfeasibleError, ValidationError (bad target) or
// NumericalError (non-finite input).
Lattice forward_backward(const Matrix& log_probs, std::span<const Label> target);

// CTC negative log-likelihood and its gradient w.r.t. pre-softmax logits.
CtcResult ctc_loss(const Matrix& logits, std::span<const Label> target);

// Test oracle: sums the probability of every V^T frame path that collapses
// onto `target`. `probs` rows are probability distributions. T <= 12.
double ctc_brute_force(const Matrix& probs, std::span<const Label> target);

// Collapse repeats, then drop blanks.
LabelSeq collapse(std::span<const Label> frame_labels);

// Best-path decoding: per-frame argmax (lowest index on ties), then collapse.
LabelSeq greedy_decode(const Matrix& logits);

}  // namespace mvmdd::ctc

#endif  // MVMDD_CTC_HPP_
