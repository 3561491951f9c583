// src/netops.cpp
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

#include "mvmdd/netops.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mvmdd/error.hpp"

namespace mvmdd {

namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw ValidationError(what + " has shape " + shape_str(m) + ", expected " +
                          std::to_string(rows) + "x" + std::to_string(cols));
}

// y = x W^T + b
Matrix affine(const Matrix& x, const Affine& a) {
  Matrix y = x * a.weight.transpose();
  y.rowwise() += a.bias.row(0);
  return y;
}

void relu_inplace(Matrix& m) { m = m.cwiseMax(0.0); }

// One row per (frame, position): the (kernel_size x 2) window, depth fastest.
Matrix im2col(const Matrix& input, int positions, int stride, int window) {
  const Eigen::Index frames = input.rows();
  Matrix cols(frames * positions, window);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (int p = 0; p < positions; ++p)
      cols.row(t * positions + p) = input.row(t).segment(2 * stride * p, window);
  return cols;
}

// Infer the architecture from tensor shapes so backward() needs no config.
struct Dims {
  int channels, window, flat, positions, emb;
};

Dims dims_of(const ModelParams& p) {
  Dims d;
  d.channels = static_cast<int>(p.conv_weight.rows());
  d.window = static_cast<int>(p.conv_weight.cols());
  d.flat = static_cast<int>(p.proj.weight.cols());
  d.positions = d.channels > 0 ? d.flat / d.channels : 0;
  d.emb = static_cast<int>(p.proj.weight.rows());
  return d;
}

void accumulate_affine(Affine& grad, const Matrix& upstream, const Matrix& input) {
  grad.weight.noalias() += upstream.transpose() * input;
  grad.bias += upstream.colwise().sum();
}

}  // namespace

// ---------------------------------------------------------------------------

void NetConfig::validate() const {
  if (pool_dim < 1 || kernel_size < 1 || stride < 1 || channels < 1 || emb_dim < 1 ||
      af_hidden < 1 || num_phones < 1)
    throw ValidationError("network sizes must be positive");
  if (kernel_size > pool_dim)
    throw ValidationError("conv kernel (" + std::to_string(kernel_size) +
                          ") wider than the pooled map (" + std::to_string(pool_dim) + ")");
  for (int c : af_classes)
    if (c < 1) throw ValidationError("AF class counts must be positive");
}

FeatureStreams align_streams(Matrix mono, Matrix multi, int tolerance) {
  if (mono.cols() != kMonoDim || multi.cols() != kMultiDim)
    throw ValidationError("feature widths " + std::to_string(mono.cols()) + "/" +
                          std::to_string(multi.cols()) + ", expected " +
                          std::to_string(kMonoDim) + "/" + std::to_string(kMultiDim));
  const Eigen::Index diff = std::abs(mono.rows() - multi.rows());
  if (diff > tolerance)
    throw ValidationError("feature streams disagree in frame count (" +
                          std::to_string(mono.rows()) + " vs " + std::to_string(multi.rows()) +
                          ")");
  const Eigen::Index frames = std::min(mono.rows(), multi.rows());
  if (mono.rows() != frames) mono.conservativeResize(frames, Eigen::NoChange);
  if (multi.rows() != frames) multi.conservativeResize(frames, Eigen::NoChange);
  return {std::move(mono), std::move(multi)};
}

std::pair<Matrix, Matrix> StackedViews::unstack() const {
  const Eigen::Index f = features();
  Matrix mono(frames(), f), multi(frames(), f);
  for (Eigen::Index t = 0; t < frames(); ++t)
    for (Eigen::Index i = 0; i < f; ++i) {
      multi(t, i) = at(t, i, 0);
      mono(t, i) = at(t, i, 1);
    }
  return {std::move(mono), std::move(multi)};
}

Matrix downsample(const Matrix& x, int out_dim) {
  const Eigen::Index in_dim = x.cols();
  if (out_dim < 1) throw ValidationError("pooled dimension must be positive");
  if (in_dim < out_dim)
    throw ValidationError("cannot pool " + std::to_string(in_dim) + " features down to " +
                          std::to_string(out_dim));
  Matrix out(x.rows(), out_dim);
  for (int i = 0; i < out_dim; ++i) {
    const Eigen::Index lo = (static_cast<Eigen::Index>(i) * in_dim) / out_dim;
    const Eigen::Index hi = ((static_cast<Eigen::Index>(i) + 1) * in_dim + out_dim - 1) / out_dim;
    out.col(i) = x.middleCols(lo, hi - lo).rowwise().sum() / static_cast<double>(hi - lo);
  }
  return out;
}

StackedViews stack_views(const Matrix& mono_pooled, const Matrix& multi_pooled) {
  if (mono_pooled.rows() != multi_pooled.rows() || mono_pooled.cols() != multi_pooled.cols())
    throw ValidationError("cannot stack views of shape " + shape_str(mono_pooled) + " and " +
                          shape_str(multi_pooled));
  StackedViews out(mono_pooled.rows(), mono_pooled.cols());
  for (Eigen::Index t = 0; t < out.frames(); ++t)
    for (Eigen::Index i = 0; i < out.features(); ++i) {
      out.at(t, i, 0) = multi_pooled(t, i);
      out.at(t, i, 1) = mono_pooled(t, i);
    }
  return out;
}

StackedViews prepare_input(const FeatureStreams& streams, int pool_dim) {
  if (streams.mono.rows() != streams.multi.rows())
    throw ValidationError("feature streams disagree in frame count");
  return stack_views(downsample(streams.mono, pool_dim), downsample(streams.multi, pool_dim));
}

// ---------------------------------------------------------------------------
// ModelParams

ModelParams ModelParams::zeros(const NetConfig& config) {
  config.validate();
  const int window = config.kernel_size * 2;
  ModelParams p;
  p.conv_stride = config.stride;
  p.conv_weight = Matrix::Zero(config.channels, window);
  p.conv_bias = Matrix::Zero(1, config.channels);
  p.proj = {Matrix::Zero(config.emb_dim, config.flat_dim()), Matrix::Zero(1, config.emb_dim)};
  p.pr_out = {Matrix::Zero(config.pr_vocab(), config.emb_dim), Matrix::Zero(1, config.pr_vocab())};
  for (AfStream s : kAfStreams) {
    auto& h = p.af_head[static_cast<int>(s)];
    h.hidden = {Matrix::Zero(config.af_hidden, config.emb_dim), Matrix::Zero(1, config.af_hidden)};
    h.out = {Matrix::Zero(config.af_vocab(s), config.af_hidden),
             Matrix::Zero(1, config.af_vocab(s))};
  }
  return p;
}

ModelParams ModelParams::init(const NetConfig& config, std::uint64_t seed) {
  ModelParams p = zeros(config);
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](Matrix& w, double fan_in, double fan_out) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  };
  const double window = static_cast<double>(p.conv_weight.cols());
  glorot(p.conv_weight, window, window * config.channels);
  glorot(p.proj.weight, config.flat_dim(), config.emb_dim);
  glorot(p.pr_out.weight, config.emb_dim, config.pr_vocab());
  for (AfStream s : kAfStreams) {
    auto& h = p.af_head[static_cast<int>(s)];
    glorot(h.hidden.weight, config.emb_dim, config.af_hidden);
    glorot(h.out.weight, config.af_hidden, config.af_vocab(s));
  }
  return p;
}

void ModelParams::for_each(const std::function<void(const std::string&, Matrix&)>& fn) {
  fn("conv.weight", conv_weight);
  fn("conv.bias", conv_bias);
  fn("proj.weight", proj.weight);
  fn("proj.bias", proj.bias);
  fn("pr_out.weight", pr_out.weight);
  fn("pr_out.bias", pr_out.bias);
  for (AfStream s : kAfStreams) {
    auto& h = af_head[static_cast<int>(s)];
    const std::string prefix = std::string(column_name(s)) + ".";
    fn(prefix + "hidden.weight", h.hidden.weight);
    fn(prefix + "hidden.bias", h.hidden.bias);
    fn(prefix + "out.weight", h.out.weight);
    fn(prefix + "out.bias", h.out.bias);
  }
}

void ModelParams::visit(const std::function<void(const std::string&, const Matrix&)>& fn) const {
  const_cast<ModelParams*>(this)->for_each(
      [&fn](const std::string& name, Matrix& m) { fn(name, m); });
}

std::size_t ModelParams::num_values() const {
  std::size_t n = 0;
  visit([&n](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  visit([&ok](const std::string&, const Matrix& m) { ok = ok && m.allFinite(); });
  return ok;
}

void ModelParams::check_shapes(const NetConfig& config) const {
  const ModelParams ref = zeros(config);
  if (conv_stride != config.stride)
    throw ValidationError("conv stride " + std::to_string(conv_stride) + ", expected " +
                          std::to_string(config.stride));
  std::vector<std::pair<std::string, const Matrix*>> expected;
  ref.visit([&](const std::string& n, const Matrix& m) { expected.emplace_back(n, &m); });
  std::size_t i = 0;
  visit([&](const std::string& n, const Matrix& m) {
    expect_shape(m, expected[i].second->rows(), expected[i].second->cols(), n);
    ++i;
  });
}

void accumulate(Gradients& acc, const Gradients& other) {
  std::vector<const Matrix*> src;
  other.visit([&src](const std::string&, const Matrix& m) { src.push_back(&m); });
  std::size_t i = 0;
  acc.for_each([&](const std::string& name, Matrix& m) {
    expect_shape(*src[i], m.rows(), m.cols(), name);
    m += *src[i++];
  });
}

// ---------------------------------------------------------------------------
// Forward

Matrix fuse_forward(const StackedViews& stacked, const ModelParams& params, ForwardCache& cache) {
  const Dims d = dims_of(params);
  const int kernel = d.window / 2;
  const Eigen::Index features = stacked.features();
  if (d.positions < 1 || d.positions * d.channels != d.flat)
    throw ValidationError("projection input " + std::to_string(d.flat) +
                          " is not a multiple of the conv channel count");
  const int span = static_cast<int>(features) - kernel;
  const int stride = params.conv_stride;
  if (span < 0 || stride < 1 || span / stride + 1 != d.positions)
    throw ValidationError("stacked input with " + std::to_string(features) +
                          " features does not match a conv with " +
                          std::to_string(d.positions) + " positions");

  cache = ForwardCache{};
  cache.params = &params;
  cache.revision = params.revision;
  cache.input = stacked.data();

  const Eigen::Index frames = stacked.frames();
  const Matrix cols = im2col(cache.input, d.positions, stride, d.window);
  Matrix conv = cols * params.conv_weight.transpose();
  conv.rowwise() += params.conv_bias.row(0);
  relu_inplace(conv);
  // (T*P) x C row-major is bit-for-bit T x (P*C) row-major.
  cache.conv_act = Eigen::Map<const Matrix>(conv.data(), frames, d.flat);
  cache.fused = affine(cache.conv_act, params.proj);
  return cache.fused;
}

HeadOutputs heads_forward(const Matrix& fused, const ModelParams& params, ForwardCache& cache,
                          const HeadMask& heads) {
  if (fused.cols() != params.pr_out.weight.cols())
    throw ValidationError("phoneme embedding has " + std::to_string(fused.cols()) +
                          " columns, PR head expects " +
                          std::to_string(params.pr_out.weight.cols()));
  if (cache.params != &params || cache.fused.rows() != fused.rows()) {
    // Heads evaluated on an externally supplied embedding.
    cache.params = &params;
    cache.revision = params.revision;
    cache.fused = fused;
  }
  HeadOutputs out;
  out.pr_logits = affine(fused, params.pr_out);
  for (AfStream s : kAfStreams) {
    const int i = static_cast<int>(s);
    cache.af_hidden[i].reset();
    if (!heads[i]) continue;
    Matrix hidden = affine(fused, params.af_head[i].hidden);
    relu_inplace(hidden);
    out.af_logits[i] = affine(hidden, params.af_head[i].out);
    cache.af_hidden[i] = std::move(hidden);
  }
  return out;
}

HeadOutputs model_forward(const StackedViews& stacked, const ModelParams& params,
                          ForwardCache& cache, const HeadMask& heads) {
  fuse_forward(stacked, params, cache);
  return heads_forward(cache.fused, params, cache, heads);
}

// ---------------------------------------------------------------------------
// Backward

Gradients backward(const HeadGrads& upstream, const ForwardCache& cache) {
  if (cache.params == nullptr || cache.input.size() == 0)
    throw ValidationError("backward called without a forward cache");
  const ModelParams& params = *cache.params;
  if (cache.revision != params.revision)
    throw ValidationError("forward cache is stale: parameters changed since forward");
  const Dims d = dims_of(params);
  const Eigen::Index frames = cache.fused.rows();

  Gradients grads = params;
  grads.for_each([](const std::string&, Matrix& m) { m.setZero(); });
  grads.revision = 0;

  Matrix d_fused = Matrix::Zero(frames, d.emb);
  if (upstream.pr.size() != 0) {
    expect_shape(upstream.pr, frames, params.pr_out.weight.rows(), "PR upstream gradient");
    accumulate_affine(grads.pr_out, upstream.pr, cache.fused);
    d_fused.noalias() += upstream.pr * params.pr_out.weight;
  }
  for (AfStream s : kAfStreams) {
    const int i = static_cast<int>(s);
    if (!upstream.af[i]) continue;
    if (!cache.af_hidden[i])
      throw ValidationError("upstream gradient for " + std::string(code_name(s)) +
                            " but that head was not evaluated in forward");
    const auto& head = params.af_head[i];
    const Matrix& hidden = *cache.af_hidden[i];
    const Matrix& d_logits = *upstream.af[i];
    expect_shape(d_logits, frames, head.out.weight.rows(),
                 std::string(code_name(s)) + " upstream gradient");
    accumulate_affine(grads.af_head[i].out, d_logits, hidden);
    Matrix d_hidden = d_logits * head.out.weight;
    d_hidden = (hidden.array() > 0.0).select(d_hidden, 0.0);
    accumulate_affine(grads.af_head[i].hidden, d_hidden, cache.fused);
    d_fused.noalias() += d_hidden * head.hidden.weight;
  }

  accumulate_affine(grads.proj, d_fused, cache.conv_act);
  Matrix d_act = d_fused * params.proj.weight;
  d_act = (cache.conv_act.array() > 0.0).select(d_act, 0.0);

  const Matrix cols = im2col(cache.input, d.positions, params.conv_stride, d.window);
  Eigen::Map<const Matrix> d_conv(d_act.data(), frames * d.positions, d.channels);
  grads.conv_weight.noalias() += d_conv.transpose() * cols;
  grads.conv_bias += d_conv.colwise().sum();
  return grads;
}

}  // namespace mvmdd
