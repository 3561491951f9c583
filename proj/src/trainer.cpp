// src/trainer.cpp
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

#include "mvmdd/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "mvmdd/ctc.hpp"
#include "mvmdd/error.hpp"

namespace mvmdd::train {

namespace {

void default_warn(const std::string& msg) { std::cerr << "WARNING: " << msg << '\n'; }

int task_index(TaskId t) { return static_cast<int>(t); }

}  // namespace

// ---------------------------------------------------------------------------
// Tasks

std::string_view task_name(TaskId t) {
  switch (t) {
    case TaskId::PR: return "PR";
    case TaskId::AF_M: return "AF_M";
    case TaskId::AF_P: return "AF_P";
    case TaskId::AF_HL: return "AF_HL";
    case TaskId::AF_FB: return "AF_FB";
  }
  return "?";
}

std::optional<TaskId> parse_task(std::string_view name) {
  for (TaskId t : kAllTasks)
    if (task_name(t) == name) return t;
  return std::nullopt;
}

std::optional<AfStream> af_stream_of(TaskId t) {
  if (t == TaskId::PR) return std::nullopt;
  return static_cast<AfStream>(task_index(t) - 1);
}

TaskId task_of(AfStream s) { return static_cast<TaskId>(static_cast<int>(s) + 1); }

int TaskSet::size() const { return std::popcount(bits_); }

std::vector<TaskId> TaskSet::tasks() const {
  std::vector<TaskId> out;
  for (TaskId t : kAllTasks)
    if (contains(t)) out.push_back(t);
  return out;
}

std::string TaskSet::to_string() const {
  std::string out;
  for (TaskId t : tasks()) {
    if (!out.empty()) out += '+';
    out += task_name(t);
  }
  return out;
}

void validate(const Strategy& strategy) {
  if (const auto* seq = std::get_if<Sequential>(&strategy)) {
    if (seq->warmup < 1 || seq->interval < 1)
      throw ConfigError("sequential strategy needs warmup >= 1 and interval >= 1");
    std::vector<TaskId> sorted = seq->order;
    std::sort(sorted.begin(), sorted.end());
    const std::vector<TaskId> expected(kAllTasks.begin() + 1, kAllTasks.end());
    if (sorted != expected)
      throw ConfigError("sequential order must be a permutation of AF_M, AF_P, AF_HL, AF_FB");
  }
}

TaskSet active_tasks(std::int64_t step, const Strategy& strategy) {
  if (std::holds_alternative<AllAtOnce>(strategy))
    return {TaskId::PR, TaskId::AF_M, TaskId::AF_P, TaskId::AF_HL, TaskId::AF_FB};
  const auto& seq = std::get<Sequential>(strategy);
  if (step < seq.warmup || seq.order.empty()) return {TaskId::PR};
  const std::int64_t phase = (step - seq.warmup) / seq.interval;
  const auto last = static_cast<std::int64_t>(seq.order.size()) - 1;
  return {TaskId::PR, seq.order[static_cast<std::size_t>(std::min(phase, last))]};
}

std::vector<SchedulePhase> schedule_timeline(const Strategy& strategy, std::int64_t steps) {
  std::vector<SchedulePhase> phases;
  for (std::int64_t s = 0; s < steps; ++s) {
    const TaskSet tasks = active_tasks(s, strategy);
    if (phases.empty() || !(phases.back().tasks == tasks))
      phases.push_back({s, s, tasks});
    else
      phases.back().last_step = s;
  }
  return phases;
}

void TrainConfig::validate() const {
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw ConfigError("Adam betas must lie in (0, 1)");
  if (!(eps > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (patience < 0) throw ConfigError("patience must be >= 0");
  mvmdd::train::validate(strategy);
}

// ---------------------------------------------------------------------------
// Adam

AdamState AdamState::zeros_like(const ModelParams& params) {
  AdamState s;
  s.m = params;
  s.m.for_each([](const std::string&, Matrix& x) { x.setZero(); });
  s.m.revision = 0;
  s.v = s.m;
  return s;
}

void adam_update(ModelParams& params, const Gradients& grads, AdamState& state,
                 const TrainConfig& config) {
  state.t += 1;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));

  std::vector<const Matrix*> g;
  std::vector<Matrix*> m, v;
  grads.visit([&g](const std::string&, const Matrix& x) { g.push_back(&x); });
  state.m.for_each([&m](const std::string&, Matrix& x) { m.push_back(&x); });
  state.v.for_each([&v](const std::string&, Matrix& x) { v.push_back(&x); });
  std::size_t i = 0;
  params.for_each([&](const std::string& name, Matrix& p) {
    Matrix& mi = *m[i];
    Matrix& vi = *v[i];
    const Matrix& gi = *g[i];
    if (gi.rows() != p.rows() || gi.cols() != p.cols())
      throw ValidationError("gradient for " + name + " does not match its parameter");
    mi = config.beta1 * mi + (1.0 - config.beta1) * gi;
    vi = config.beta2 * vi + (1.0 - config.beta2) * gi.cwiseAbs2();
    p.array() -= config.lr * (mi.array() / c1) / ((vi.array() / c2).sqrt() + config.eps);
    ++i;
  });
  params.revision += 1;
}

// ---------------------------------------------------------------------------
// Data

const LabelSeq& Example::target(TaskId task) const {
  if (auto s = af_stream_of(task)) return af_targets[static_cast<int>(*s)];
  return perceived;
}

Example make_example(const corpus::UtteranceRecord& record, const corpus::Manifest& manifest,
                     const NetConfig& net, const AfTable& table) {
  FeatureStreams streams = align_streams(corpus::read_features(manifest.resolve(record.mono)),
                                         corpus::read_features(manifest.resolve(record.multi)));
  Example ex;
  ex.id = record.id;
  ex.input = prepare_input(streams, net.pool_dim);
  ex.canonical = record.canonical;
  ex.perceived = record.perceived;
  for (AfStream s : kAfStreams)
    ex.af_targets[static_cast<int>(s)] = map_sequence(record.perceived, s, table);
  if (ctc::min_frames(ex.perceived) > ex.frames())
    throw InfeasibleError("utterance '" + record.id + "' has " + std::to_string(ex.frames()) +
                          " feature frames, too few for its perceived phones");
  return ex;
}

std::vector<Example> load_examples(const corpus::Manifest& manifest, const NetConfig& net,
                                   const AfTable& table) {
  std::vector<Example> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records) out.push_back(make_example(r, manifest, net, table));
  return out;
}

// ---------------------------------------------------------------------------
// Steps

BatchGradient batch_gradient(const ModelParams& params, std::span<const Example* const> batch,
                             const TaskSet& active, LossCombination combination,
                             const WarnFn& warn_fn) {
  const WarnFn& warn = warn_fn ? warn_fn : WarnFn(default_warn);
  const std::vector<TaskId> tasks = active.tasks();

  // Feasibility is a function of lengths only, so per-task divisors are known
  // before any forward pass.
  std::array<int, kNumTasks> contributing{};
  BatchGradient out;
  out.report.active = active;
  for (const Example* ex : batch)
    for (TaskId t : tasks) {
      if (ctc::min_frames(ex->target(t)) <= ex->frames()) {
        ++contributing[task_index(t)];
      } else {
        ++out.report.skipped;
        warn("utterance '" + ex->id + "': " + std::string(task_name(t)) +
             " target is CTC-infeasible in " + std::to_string(ex->frames()) +
             " frames; skipped");
      }
    }
  int present = 0;
  for (TaskId t : tasks)
    if (contributing[task_index(t)] > 0) ++present;
  const double task_scale =
      combination == LossCombination::Mean && present > 0 ? 1.0 / present : 1.0;

  HeadMask heads{};
  for (TaskId t : tasks)
    if (auto s = af_stream_of(t)) heads[static_cast<int>(*s)] = true;

  out.grads = params;
  out.grads.for_each([](const std::string&, Matrix& m) { m.setZero(); });
  out.grads.revision = 0;
  std::array<double, kNumTasks> loss_sum{};

  ForwardCache cache;
  for (const Example* ex : batch) {
    const HeadOutputs logits = model_forward(ex->input, params, cache, heads);
    HeadGrads upstream;
    bool any = false;
    for (TaskId t : tasks) {
      const int n = contributing[task_index(t)];
      if (n == 0 || ctc::min_frames(ex->target(t)) > ex->frames()) continue;
      const auto stream = af_stream_of(t);
      const Matrix& z = stream ? *logits.af_logits[static_cast<int>(*stream)] : logits.pr_logits;
      ctc::CtcResult r = ctc::ctc_loss(z, ex->target(t));
      loss_sum[task_index(t)] += r.loss;
      r.grad_logits *= task_scale / n;
      if (stream)
        upstream.af[static_cast<int>(*stream)] = std::move(r.grad_logits);
      else
        upstream.pr = std::move(r.grad_logits);
      any = true;
    }
    if (any) accumulate(out.grads, backward(upstream, cache));
  }

  double total = 0.0;
  for (TaskId t : tasks) {
    const int n = contributing[task_index(t)];
    if (n == 0) continue;
    out.report.task_loss[task_index(t)] = loss_sum[task_index(t)] / n;
    total += loss_sum[task_index(t)] / n;
  }
  out.report.combined = total * task_scale;
  return out;
}

LossReport train_step(ModelParams& params, std::span<const Example* const> batch,
                      std::int64_t step, const TrainConfig& config, AdamState& adam,
                      const WarnFn& warn) {
  const TaskSet active = active_tasks(step, config.strategy);
  BatchGradient bg;
  try {
    bg = batch_gradient(params, batch, active, config.combination, warn);
  } catch (const NumericalError& e) {
    throw NumericalError("step " + std::to_string(step) + " (active " + active.to_string() +
                         "): " + e.what());
  }
  if (!std::isfinite(bg.report.combined) || !bg.grads.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite loss at step " << step << " (active " << active.to_string() << ":";
    for (TaskId t : active.tasks()) {
      const auto& l = bg.report.task_loss[task_index(t)];
      msg << ' ' << task_name(t) << '=' << (l ? std::to_string(*l) : "skipped");
    }
    msg << ")";
    throw NumericalError(msg.str());
  }
  adam_update(params, bg.grads, adam, config);
  return bg.report;
}

// ---------------------------------------------------------------------------
// Evaluation

LabelSeq predict(const ModelParams& params, const Example& example) {
  ForwardCache cache;
  const HeadOutputs out = model_forward(example.input, params, cache, HeadMask{});
  return ctc::greedy_decode(out.pr_logits);
}

EvalResult evaluate(const ModelParams& params, std::span<const Example> examples,
                    const eval::MddOptions& options) {
  eval::Scorer scorer(options);
  for (const Example& ex : examples) {
    const LabelSeq predicted = predict(params, ex);
    scorer.add(ex.canonical, ex.perceived, predicted);
  }
  EvalResult r;
  r.counts = scorer.counts();
  r.metrics = scorer.result();
  r.per = r.metrics.per;
  return r;
}

std::string to_json_line(const LogRecord& record) {
  nlohmann::ordered_json j;
  if (const auto* s = std::get_if<StepRecord>(&record)) {
    j["step"] = s->step;
    j["active_tasks"] = nlohmann::json::array();
    for (TaskId t : s->report.active.tasks()) j["active_tasks"].push_back(task_name(t));
    const char* keys[kNumTasks] = {"loss_pr", "loss_af_m", "loss_af_p", "loss_af_hl",
                                   "loss_af_fb"};
    for (TaskId t : kAllTasks) {
      const auto& l = s->report.task_loss[task_index(t)];
      j[keys[task_index(t)]] = l ? nlohmann::json(*l) : nlohmann::json(nullptr);
    }
    j["combined"] = s->report.combined;
  } else {
    const auto& e = std::get<EvalRecord>(record);
    j["step"] = e.step;
    j["dev_per"] = e.dev_per;
    j["dev_f1"] = e.dev_f1;
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// Training loop

BatchSampler::BatchSampler(std::span<const Example> examples, int batch_size, std::uint64_t seed)
    : examples_(examples), batch_size_(batch_size), seed_(seed) {
  if (examples.empty()) throw ValidationError("cannot sample batches from an empty dataset");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

void BatchSampler::refill() {
  std::mt19937_64 rng(seed_ + 0x632be59bd9b4e019ULL * (epoch_ + 1));
  ++epoch_;
  std::vector<const Example*> order;
  order.reserve(examples_.size());
  for (const Example& ex : examples_) order.push_back(&ex);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t window = static_cast<std::size_t>(batch_size_) * 4;
  for (std::size_t lo = 0; lo < order.size(); lo += window) {
    const std::size_t hi = std::min(order.size(), lo + window);
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(lo),
                     order.begin() + static_cast<std::ptrdiff_t>(hi),
                     [](const Example* a, const Example* b) { return a->frames() < b->frames(); });
  }
  for (std::size_t lo = 0; lo < order.size(); lo += batch_size_) {
    const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(batch_size_));
    pending_.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(lo),
                          order.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  std::shuffle(pending_.begin(), pending_.end(), rng);
}

std::vector<const Example*> BatchSampler::next() {
  if (pending_.empty()) refill();
  std::vector<const Example*> batch = std::move(pending_.back());
  pending_.pop_back();
  return batch;
}

FitResult fit(const Dataset& data, const NetConfig& net, const TrainConfig& config,
              const FitHooks& hooks) {
  config.validate();
  net.validate();
  if (data.train.empty()) throw ValidationError("training split is empty");
  if (data.dev.empty()) throw ValidationError("dev split is empty");

  FitResult result;
  ModelParams params = ModelParams::init(net, config.seed);
  result.best = params;
  result.best_dev_per = std::numeric_limits<double>::infinity();
  if (config.steps == 0) return result;

  auto emit = [&](LogRecord rec) {
    if (hooks.on_record) hooks.on_record(rec);
    result.log.push_back(std::move(rec));
  };

  AdamState adam = AdamState::zeros_like(params);
  BatchSampler sampler(data.train, config.batch_size, config.seed ^ 0x5bd1e995ULL);
  int evals_since_best = 0;
  for (std::int64_t step = 0; step < config.steps; ++step) {
    const std::vector<const Example*> batch = sampler.next();
    LossReport report = train_step(params, batch, step, config, adam, hooks.warn);
    emit(StepRecord{step, std::move(report)});
    result.steps_run = step + 1;

    const bool last = step + 1 == config.steps;
    if ((step + 1) % config.eval_every != 0 && !last) continue;
    const EvalResult ev = evaluate(params, data.dev);
    emit(EvalRecord{step, ev.per, ev.metrics.f1});
    if (ev.per < result.best_dev_per) {
      result.best_dev_per = ev.per;
      result.best_step = step;
      result.best = params;
      evals_since_best = 0;
    } else if (config.patience > 0 && ++evals_since_best >= config.patience && !last) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace mvmdd::train
