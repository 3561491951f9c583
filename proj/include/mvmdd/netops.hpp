// include/mvmdd/netops.hpp
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

#ifndef MVMDD_NETOPS_HPP_
#define MVMDD_NETOPS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "mvmdd/af_inventory.hpp"
#include "mvmdd/types.hpp"

namespace mvmdd {

inline constexpr int kMonoDim = 768;
inline constexpr int kMultiDim = 1024;

// Architecture hyperparameters. Defaults give the full-size model; the
// gradient checks shrink emb_dim, channels and friends.
struct NetConfig {
  int pool_dim = 300;    // pooled feature size per view
  int kernel_size = 16;  // conv extent along the feature axis; depth extent is always 2
  int stride = 4;        // conv stride along the feature axis
  int channels = 8;
  int emb_dim = 256;
  int af_hidden = 128;
  int num_phones = 39;   // PR vocabulary is num_phones + 1 (blank)
  std::array<int, kNumAfStreams> af_classes = {7, 6, 4, 4};

  int conv_positions() const { return (pool_dim - kernel_size) / stride + 1; }
  int flat_dim() const { return conv_positions() * channels; }
  int pr_vocab() const { return num_phones + 1; }
  int af_vocab(AfStream s) const { return af_classes[static_cast<int>(s)] + 1; }

  // Throws ValidationError on non-positive sizes or a kernel wider than the
  // pooled map.
  void validate() const;
};

// Time-aligned encoder outputs for one utterance.
struct FeatureStreams {
  Matrix mono;   // T x 768
  Matrix multi;  // T x 1024
};

// Equal-T check plus the small-mismatch rule: if the frame counts differ by
// at most `tolerance`, both are truncated to the shorter; otherwise throws.
FeatureStreams align_streams(Matrix mono, Matrix multi, int tolerance = 2);

// Two pooled views stacked along a depth axis of size 2. Depth 0 is the
// multilingual view and depth 1 the monolingual one. Storage is T x (2F)
// with depth fastest, so a (k, 2) kernel window is one contiguous span.
class StackedViews {
 public:
  StackedViews() = default;
  StackedViews(Eigen::Index frames, Eigen::Index features)
      : data_(Matrix::Zero(frames, 2 * features)) {}

  Eigen::Index frames() const { return data_.rows(); }
  Eigen::Index features() const { return data_.cols() / 2; }
  double at(Eigen::Index t, Eigen::Index f, int depth) const { return data_(t, 2 * f + depth); }
  double& at(Eigen::Index t, Eigen::Index f, int depth) { return data_(t, 2 * f + depth); }
  const Matrix& data() const { return data_; }

  // {mono, multi}
  std::pair<Matrix, Matrix> unstack() const;

 private:
  Matrix data_;
};

// Adaptive average pooling along the feature axis: output column i averages
// input columns [floor(i*D/out), ceil((i+1)*D/out)).
Matrix downsample(const Matrix& x, int out_dim = 300);

StackedViews stack_views(const Matrix& mono_pooled, const Matrix& multi_pooled);

// downsample both views and stack them.
StackedViews prepare_input(const FeatureStreams& streams, int pool_dim = 300);

struct Affine {
  Matrix weight;  // out x in
  Matrix bias;    // 1 x out
};

struct AfHeadParams {
  Affine hidden;
  Affine out;
};

// All trainable tensors. Gradients share the layout.
struct ModelParams {
  Matrix conv_weight;  // channels x (kernel_size * 2), window laid out depth-fastest
  Matrix conv_bias;    // 1 x channels
  Affine proj;         // flat_dim -> emb_dim
  Affine pr_out;       // emb_dim -> pr_vocab
  std::array<AfHeadParams, kNumAfStreams> af_head;

  // Glorot-uniform weights, zero biases, deterministic in `seed`.
  static ModelParams init(const NetConfig& config, std::uint64_t seed);
  static ModelParams zeros(const NetConfig& config);

  // Visits every tensor in a fixed order with a stable name.
  void for_each(const std::function<void(const std::string&, Matrix&)>& fn);
  void visit(const std::function<void(const std::string&, const Matrix&)>& fn) const;

  std::size_t num_values() const;
  bool all_finite() const;
  // Throws ValidationError unless every tensor matches `config`.
  void check_shapes(const NetConfig& config) const;

  // Architecture metadata that tensor shapes cannot express; not trained.
  int conv_stride = 4;

  // Bumped by every in-place update; a ForwardCache remembers it.
  std::uint64_t revision = 0;
};

using Gradients = ModelParams;

// Adds `other` into `acc` tensor by tensor.
void accumulate(Gradients& acc, const Gradients& other);

struct ForwardCache {
  const ModelParams* params = nullptr;
  std::uint64_t revision = 0;
  Matrix input;     // stacked data, T x 2F
  Matrix conv_act;  // T x (positions * channels), after max(0, .)
  Matrix fused;     // T x emb_dim; also the phoneme embedding
  std::array<std::optional<Matrix>, kNumAfStreams> af_hidden;  // after max(0, .)
};

struct HeadOutputs {
  Matrix pr_logits;                                            // T x pr_vocab
  std::array<std::optional<Matrix>, kNumAfStreams> af_logits;  // T x af_vocab(s)
};

// Which AF heads to evaluate. Skipped heads produce no logits and no cache.
using HeadMask = std::array<bool, kNumAfStreams>;
inline constexpr HeadMask kAllHeads = {true, true, true, true};

// Convolution, max(0, .), flatten, projection. Returns the fused T x emb_dim
// representation and fills `cache`.
Matrix fuse_forward(const StackedViews& stacked, const ModelParams& params, ForwardCache& cache);

// PR and AF heads on the phoneme embedding (the fused representation).
HeadOutputs heads_forward(const Matrix& fused, const ModelParams& params, ForwardCache& cache,
                          const HeadMask& heads = kAllHeads);

// fuse_forward followed by heads_forward.
HeadOutputs model_forward(const StackedViews& stacked, const ModelParams& params,
                          ForwardCache& cache, const HeadMask& heads = kAllHeads);

// d loss / d logits for every head that contributes. Missing AF entries
// contribute nothing.
struct HeadGrads {
  Matrix pr;
  std::array<std::optional<Matrix>, kNumAfStreams> af;
};

// Reverse-mode pass through the graph recorded in `cache`. Throws
// ValidationError when the cache is empty, stale, or shapes disagree.
Gradients backward(const HeadGrads& upstream, const ForwardCache& cache);

}  // namespace mvmdd

#endif  // MVMDD_NETOPS_HPP_
