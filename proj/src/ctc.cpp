// src/ctc.cpp
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

#include "mvmdd/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mvmdd/error.hpp"

namespace mvmdd::ctc {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + " contains NaN or Inf");
}

void check_target(std::span<const Label> target, Eigen::Index vocab) {
  if (target.empty()) throw ValidationError("CTC target is empty");
  for (Label l : target) {
    if (l == kBlank) throw ValidationError("CTC target contains the blank label");
    if (l < 0 || l >= vocab)
      throw ValidationError("CTC target label " + std::to_string(l) + " outside vocabulary of " +
                            std::to_string(vocab));
  }
}

void check_lattice_shape(const Matrix& m) {
  if (m.rows() < 1) throw ValidationError("CTC lattice has no frames");
  if (m.cols() < 2) throw ValidationError("CTC lattice needs at least 2 labels");
}

}  // namespace

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

Matrix log_softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

int min_frames(std::span<const Label> target) {
  int n = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++n;
  return n;
}

Lattice forward_backward(const Matrix& log_probs, std::span<const Label> target) {
  check_lattice_shape(log_probs);
  if (log_probs.array().isNaN().any()) throw NumericalError("CTC lattice contains NaN");
  check_target(target, log_probs.cols());

  const Eigen::Index frames = log_probs.rows();
  const int needed = min_frames(target);
  if (frames < needed)
    throw InfeasibleError("CTC target of length " + std::to_string(target.size()) + " needs " +
                          std::to_string(needed) + " frames, lattice has " +
                          std::to_string(frames));

  Lattice lat;
  lat.extended.assign(2 * target.size() + 1, kBlank);
  for (std::size_t i = 0; i < target.size(); ++i) lat.extended[2 * i + 1] = target[i];
  const auto& ext = lat.extended;
  const Eigen::Index states = static_cast<Eigen::Index>(ext.size());

  // A label state may be entered from two states back unless that would
  // merge two equal labels.
  auto can_skip = [&](Eigen::Index s) {
    return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2];
  };

  lat.log_alpha.setConstant(frames, states, kLogZero);
  lat.log_alpha(0, 0) = log_probs(0, ext[0]);
  lat.log_alpha(0, 1) = log_probs(0, ext[1]);
  for (Eigen::Index t = 1; t < frames; ++t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      double acc = lat.log_alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, lat.log_alpha(t - 1, s - 1));
      if (can_skip(s)) acc = log_add(acc, lat.log_alpha(t - 1, s - 2));
      if (acc != kLogZero) lat.log_alpha(t, s) = acc + log_probs(t, ext[s]);
    }
  }

  lat.log_beta.setConstant(frames, states, kLogZero);
  lat.log_beta(frames - 1, states - 1) = 0.0;
  lat.log_beta(frames - 1, states - 2) = 0.0;
  for (Eigen::Index t = frames - 2; t >= 0; --t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      double acc = lat.log_beta(t + 1, s) + log_probs(t + 1, ext[s]);
      if (s + 1 < states)
        acc = log_add(acc, lat.log_beta(t + 1, s + 1) + log_probs(t + 1, ext[s + 1]));
      if (s + 2 < states && can_skip(s + 2))
        acc = log_add(acc, lat.log_beta(t + 1, s + 2) + log_probs(t + 1, ext[s + 2]));
      lat.log_beta(t, s) = acc;
    }
  }

  lat.log_likelihood =
      log_add(lat.log_alpha(frames - 1, states - 1), lat.log_alpha(frames - 1, states - 2));
  if (!std::isfinite(lat.log_likelihood))
    throw InfeasibleError("CTC target has zero probability under the lattice");
  return lat;
}

CtcResult ctc_loss(const Matrix& logits, std::span<const Label> target) {
  check_lattice_shape(logits);
  check_finite(logits, "CTC logits");
  const Matrix log_probs = log_softmax(logits);
  const Lattice lat = forward_backward(log_probs, target);

  CtcResult result;
  result.loss = -lat.log_likelihood;
  // d(-log p)/d z_tk = y_tk - (1/p) sum_{s: ext[s] = k} alpha_t(s) beta_t(s)
  result.grad_logits = log_probs.array().exp();
  const Eigen::Index states = static_cast<Eigen::Index>(lat.extended.size());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    for (Eigen::Index s = 0; s < states; ++s) {
      const double occ = lat.log_alpha(t, s) + lat.log_beta(t, s);
      if (occ == kLogZero) continue;
      result.grad_logits(t, lat.extended[s]) -= std::exp(occ - lat.log_likelihood);
    }
  }
  return result;
}

double ctc_brute_force(const Matrix& probs, std::span<const Label> target) {
  check_lattice_shape(probs);
  check_finite(probs, "CTC probabilities");
  check_target(target, probs.cols());
  const Eigen::Index frames = probs.rows();
  const Eigen::Index vocab = probs.cols();
  if (frames > 12) throw ValidationError("brute-force CTC is limited to 12 frames");

  std::vector<Label> path(frames, 0);
  double total = 0.0;
  while (true) {
    double p = 1.0;
    for (Eigen::Index t = 0; t < frames; ++t) p *= probs(t, path[t]);
    if (p > 0.0) {
      const LabelSeq collapsed = collapse(path);
      if (collapsed.size() == target.size() &&
          std::equal(collapsed.begin(), collapsed.end(), target.begin()))
        total += p;
    }
    // Odometer increment over V^T paths.
    Eigen::Index t = frames - 1;
    while (t >= 0 && ++path[t] == vocab) path[t--] = 0;
    if (t < 0) break;
  }
  if (total <= 0.0) throw InfeasibleError("no frame path collapses onto the target");
  return -std::log(total);
}

LabelSeq collapse(std::span<const Label> frame_labels) {
  LabelSeq out;
  Label prev = -1;
  for (Label l : frame_labels) {
    if (l != prev && l != kBlank) out.push_back(l);
    prev = l;
  }
  return out;
}

LabelSeq greedy_decode(const Matrix& logits) {
  check_lattice_shape(logits);
  check_finite(logits, "CTC logits");
  std::vector<Label> best(logits.rows());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    Eigen::Index arg = 0;
    for (Eigen::Index v = 1; v < logits.cols(); ++v)
      if (logits(t, v) > logits(t, arg)) arg = v;
    best[t] = static_cast<Label>(arg);
  }
  return collapse(best);
}

}  // namespace mvmdd::ctc
