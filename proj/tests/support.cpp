// tests/support.cpp
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

#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mvmdd/ctc.hpp"

namespace mvmdd::testing {

namespace fs = std::filesystem;

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double lo,
                     double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Matrix random_probs(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Matrix m = random_matrix(rows, cols, rng, 0.05, 1.0);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) /= m.row(r).sum();
  return m;
}

LabelSeq random_labels(int length, int max_label, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(1, max_label);
  LabelSeq s(static_cast<std::size_t>(length));
  for (auto& l : s) l = u(rng);
  return s;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  for (;;) {
    path_ = fs::temp_directory_path() /
            (tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    if (fs::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

NetConfig tiny_net() {
  NetConfig n;
  n.pool_dim = 24;
  n.kernel_size = 4;
  n.stride = 2;
  n.channels = 2;
  n.emb_dim = 16;
  n.af_hidden = 8;
  n.num_phones = 5;
  n.af_classes = {3, 2, 2, 2};
  return n;
}

namespace {

constexpr HeadMask kMannerOnly = {true, false, false, false};

struct Activity {
  std::vector<bool> conv;
  std::vector<bool> hidden;
  bool operator==(const Activity&) const = default;
};

Activity activity_of(const ForwardCache& cache) {
  Activity a;
  for (Eigen::Index i = 0; i < cache.conv_act.size(); ++i)
    a.conv.push_back(cache.conv_act.data()[i] > 0.0);
  const Matrix& h = *cache.af_hidden[0];
  for (Eigen::Index i = 0; i < h.size(); ++i) a.hidden.push_back(h.data()[i] > 0.0);
  return a;
}

}  // namespace

GradCheck check_model_gradient(std::uint64_t seed, double h, double floor) {
  std::mt19937_64 rng(seed);
  const NetConfig net = tiny_net();
  ModelParams params = ModelParams::init(net, seed);
  // Nonzero biases so the check also covers bias paths away from zero.
  params.for_each([&](const std::string& name, Matrix& m) {
    if (name.ends_with("bias")) m = random_matrix(m.rows(), m.cols(), rng, -0.2, 0.2);
  });

  const int frames = 12;
  StackedViews input(frames, net.pool_dim);
  const Matrix raw = random_matrix(frames, 2 * net.pool_dim, rng);
  for (int t = 0; t < frames; ++t)
    for (int f = 0; f < net.pool_dim; ++f)
      for (int d = 0; d < 2; ++d) input.at(t, f, d) = raw(t, 2 * f + d);

  std::uniform_int_distribution<int> len(2, 4);
  const LabelSeq pr_target = random_labels(len(rng), net.num_phones, rng);
  const LabelSeq af_target = random_labels(len(rng), net.af_classes[0], rng);

  auto loss_of = [&](const ModelParams& p, Activity* act) {
    ForwardCache cache;
    const HeadOutputs out = model_forward(input, p, cache, kMannerOnly);
    if (act) *act = activity_of(cache);
    return ctc::ctc_loss(out.pr_logits, pr_target).loss +
           ctc::ctc_loss(*out.af_logits[0], af_target).loss;
  };

  ForwardCache cache;
  const HeadOutputs out = model_forward(input, params, cache, kMannerOnly);
  HeadGrads upstream;
  upstream.pr = ctc::ctc_loss(out.pr_logits, pr_target).grad_logits;
  upstream.af[0] = ctc::ctc_loss(*out.af_logits[0], af_target).grad_logits;
  const Gradients analytic = backward(upstream, cache);
  const Activity base = activity_of(cache);

  std::vector<const Matrix*> grad_tensors;
  analytic.visit([&](const std::string&, const Matrix& g) { grad_tensors.push_back(&g); });

  GradCheck result;
  ModelParams probe = params;
  std::size_t k = 0;
  probe.for_each([&](const std::string& name, Matrix& m) {
    const Matrix& g = *grad_tensors[k++];
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      Activity up_act, down_act;
      m.data()[i] = saved + h;
      const double up = loss_of(probe, &up_act);
      m.data()[i] = saved - h;
      const double down = loss_of(probe, &down_act);
      m.data()[i] = saved;
      if (!(up_act == base) || !(down_act == base)) {
        ++result.skipped;
        continue;
      }
      const double numeric = (up - down) / (2.0 * h);
      const double a = g.data()[i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++result.checked;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = name + "[" + std::to_string(i) + "]";
      }
    }
  });
  return result;
}

}  // namespace mvmdd::testing
