// tests/test_netops.cpp
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
#include <set>

#include "doctest.h"
#include "mvmdd/error.hpp"
#include "mvmdd/netops.hpp"
#include "support.hpp"

using namespace mvmdd;
using mvmdd::testing::random_matrix;

namespace {

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

HeadOutputs forward_random(const NetConfig& net, const ModelParams& p, int frames,
                           std::uint64_t seed, ForwardCache& cache) {
  std::mt19937_64 rng(seed);
  FeatureStreams fs{random_matrix(frames, kMonoDim, rng), random_matrix(frames, kMultiDim, rng)};
  return model_forward(prepare_input(fs, net.pool_dim), p, cache);
}

}  // namespace

TEST_CASE("downsample") {
  CHECK(bitwise_equal(downsample(Matrix::Ones(3, 600)), Matrix::Ones(3, 300)));
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(4, 300, rng);
  CHECK(bitwise_equal(downsample(x), x));

  // D=768: bin 0 averages inputs 0, 1, 2.
  Matrix y = Matrix::Zero(1, 768);
  y(0, 0) = 3.0;
  y(0, 1) = 6.0;
  y(0, 2) = 9.0;
  y(0, 3) = 100.0;
  const Matrix d = downsample(y);
  CHECK(d.cols() == 300);
  CHECK(d(0, 0) == doctest::Approx(6.0));
  CHECK(downsample(Matrix::Constant(2, 1024, 2.5)).isApproxToConstant(2.5, 1e-15));

  // Linear.
  const Matrix a = random_matrix(5, 768, rng), b = random_matrix(5, 768, rng);
  const Matrix lhs = downsample(2.5 * a - 0.75 * b);
  const Matrix rhs = 2.5 * downsample(a) - 0.75 * downsample(b);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK(downsample(Matrix::Zero(0, 768)).rows() == 0);
  CHECK_THROWS_AS(downsample(Matrix::Ones(2, 299)), ValidationError);
}

TEST_CASE("stacking views") {
  const StackedViews s = stack_views(Matrix::Zero(3, 300), Matrix::Ones(3, 300));
  CHECK(s.frames() == 3);
  CHECK(s.features() == 300);
  for (int t = 0; t < 3; ++t)
    for (int f = 0; f < 300; ++f) {
      CHECK(s.at(t, f, 0) == 1.0);
      CHECK(s.at(t, f, 1) == 0.0);
    }
  std::mt19937_64 rng(4);
  const Matrix mono = random_matrix(5, 300, rng), multi = random_matrix(5, 300, rng);
  const auto [m1, m2] = stack_views(mono, multi).unstack();
  CHECK(bitwise_equal(m1, mono));
  CHECK(bitwise_equal(m2, multi));
  CHECK(stack_views(Matrix(0, 300), Matrix(0, 300)).frames() == 0);
  CHECK_THROWS_AS(stack_views(Matrix::Zero(3, 300), Matrix::Zero(4, 300)), ValidationError);
}

TEST_CASE("stream alignment tolerates small frame mismatches") {
  const auto fs = align_streams(Matrix::Zero(10, kMonoDim), Matrix::Zero(12, kMultiDim));
  CHECK(fs.mono.rows() == 10);
  CHECK(fs.multi.rows() == 10);
  CHECK_THROWS_AS(align_streams(Matrix::Zero(10, kMonoDim), Matrix::Zero(13, kMultiDim)),
                  ValidationError);
  CHECK_THROWS_AS(align_streams(Matrix::Zero(10, 700), Matrix::Zero(10, kMultiDim)),
                  ValidationError);
}

TEST_CASE("default shapes") {
  const NetConfig net;
  CHECK(net.conv_positions() == 72);
  CHECK(net.flat_dim() == 576);
  CHECK(net.pr_vocab() == 40);
  const ModelParams p = ModelParams::init(net, 1);
  CHECK(p.conv_weight.rows() == 8);
  CHECK(p.conv_weight.cols() == 32);
  CHECK(p.proj.weight.rows() == 256);
  CHECK(p.proj.weight.cols() == 576);
  CHECK(p.pr_out.weight.rows() == 40);
  CHECK_NOTHROW(p.check_shapes(net));

  ForwardCache cache;
  const HeadOutputs out = forward_random(net, p, 7, 3, cache);
  CHECK(out.pr_logits.rows() == 7);
  CHECK(out.pr_logits.cols() == 40);
  CHECK(out.af_logits[0]->cols() == 8);
  CHECK(out.af_logits[1]->cols() == 7);
  CHECK(out.af_logits[2]->cols() == 5);
  CHECK(out.af_logits[3]->cols() == 5);
  for (const auto& l : out.af_logits) CHECK(l->rows() == 7);
  CHECK(cache.fused.rows() == 7);
  CHECK(cache.fused.cols() == 256);
}

TEST_CASE("initialization") {
  const NetConfig net;
  const ModelParams a = ModelParams::init(net, 9), b = ModelParams::init(net, 9);
  const ModelParams c = ModelParams::init(net, 10);
  CHECK(bitwise_equal(a.proj.weight, b.proj.weight));
  CHECK_FALSE(bitwise_equal(a.proj.weight, c.proj.weight));
  a.visit([&](const std::string& name, const Matrix& m) {
    if (name.ends_with("bias")) {
      CHECK(m.isZero(0.0));
    } else {
      // conv fan-in is the window, fan-out the window times the channel count.
      const double fan = name == "conv.weight"
                             ? static_cast<double>(m.cols() * (1 + m.rows()))
                             : static_cast<double>(m.rows() + m.cols());
      const double limit = std::sqrt(6.0 / fan);
      CHECK(m.cwiseAbs().maxCoeff() <= limit + 1e-15);
      CHECK(m.cwiseAbs().maxCoeff() > 0.5 * limit);
    }
  });
  std::set<std::string> names;
  a.visit([&](const std::string& name, const Matrix&) { CHECK(names.insert(name).second); });
  CHECK(names.size() == 22);
  CHECK(a.all_finite());
}

TEST_CASE("zero weights") {
  const NetConfig net;
  ModelParams p = ModelParams::zeros(net);
  std::mt19937_64 rng(5);
  p.proj.bias = random_matrix(1, net.emb_dim, rng);
  p.af_head[0].out.bias = random_matrix(1, 8, rng);
  ForwardCache cache;
  const HeadOutputs out = forward_random(net, p, 4, 8, cache);
  for (int t = 0; t < 4; ++t) {
    CHECK(bitwise_equal(cache.fused.row(t), p.proj.bias));
    CHECK(bitwise_equal(out.af_logits[0]->row(t), p.af_head[0].out.bias));
  }
}

TEST_CASE("determinism") {
  const NetConfig net;
  const ModelParams p = ModelParams::init(net, 4);
  ForwardCache c1, c2;
  const HeadOutputs a = forward_random(net, p, 6, 1, c1);
  const HeadOutputs b = forward_random(net, p, 6, 1, c2);
  CHECK(bitwise_equal(a.pr_logits, b.pr_logits));
  for (int s = 0; s < 4; ++s) CHECK(bitwise_equal(*a.af_logits[s], *b.af_logits[s]));
}

TEST_CASE("backward reachability") {
  const NetConfig net;
  const ModelParams p = ModelParams::init(net, 6);
  ForwardCache cache;
  const HeadOutputs out = forward_random(net, p, 5, 2, cache);

  HeadGrads zero;
  zero.pr = Matrix::Zero(5, 40);
  for (int s = 0; s < 4; ++s) zero.af[s] = Matrix::Zero(5, net.af_vocab(kAfStreams[s]));
  backward(zero, cache).visit([](const std::string&, const Matrix& g) { CHECK(g.isZero(0.0)); });

  std::mt19937_64 rng(3);
  HeadGrads single;
  single.pr = Matrix::Zero(5, 40);
  single.af[1] = random_matrix(5, 7, rng);
  const Gradients g = backward(single, cache);
  CHECK_FALSE(g.af_head[1].out.weight.isZero(0.0));
  CHECK_FALSE(g.proj.weight.isZero(0.0));
  for (int s : {0, 2, 3}) {
    CHECK(g.af_head[s].hidden.weight.isZero(0.0));
    CHECK(g.af_head[s].out.weight.isZero(0.0));
    CHECK(g.af_head[s].out.bias.isZero(0.0));
  }
  CHECK(g.pr_out.weight.isZero(0.0));
}

TEST_CASE("backward rejects stale or missing caches") {
  const NetConfig net;
  ModelParams p = ModelParams::init(net, 6);
  HeadGrads up;
  up.pr = Matrix::Zero(3, 40);
  CHECK_THROWS_AS(backward(up, ForwardCache{}), ValidationError);
  ForwardCache cache;
  forward_random(net, p, 3, 2, cache);
  CHECK_NOTHROW(backward(up, cache));
  up.pr = Matrix::Zero(4, 40);
  CHECK_THROWS_AS(backward(up, cache), ValidationError);
  up.pr = Matrix::Zero(3, 40);
  ++p.revision;
  CHECK_THROWS_AS(backward(up, cache), ValidationError);
}

TEST_CASE("whole-model gradient against central differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = testing::check_model_gradient(seed);
    INFO("seed " << seed << " worst " << r.worst << " skipped " << r.skipped);
    CHECK(r.checked > 500);
    CHECK(r.max_rel_error <= 1e-4);
  }
}

TEST_CASE("shape validation") {
  NetConfig bad;
  bad.kernel_size = 301;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  NetConfig zero;
  zero.channels = 0;
  CHECK_THROWS_AS(zero.validate(), ValidationError);
  const ModelParams p = ModelParams::init(NetConfig{}, 1);
  CHECK_THROWS_AS(p.check_shapes(testing::tiny_net()), ValidationError);
  ForwardCache cache;
  CHECK_THROWS_AS(fuse_forward(StackedViews(3, 200), p, cache), ValidationError);
}
