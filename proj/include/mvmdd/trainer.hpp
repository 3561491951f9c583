// include/mvmdd/trainer.hpp
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

#ifndef MVMDD_TRAINER_HPP_
#define MVMDD_TRAINER_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mvmdd/af_inventory.hpp"
#include "mvmdd/corpusio.hpp"
#include "mvmdd/evalmetrics.hpp"
#include "mvmdd/netops.hpp"

namespace mvmdd::train {

// ---------------------------------------------------------------------------
// Tasks and the auxiliary-task schedule

enum class TaskId { PR = 0, AF_M = 1, AF_P = 2, AF_HL = 3, AF_FB = 4 };
inline constexpr int kNumTasks = 5;
inline constexpr std::array<TaskId, kNumTasks> kAllTasks = {TaskId::PR, TaskId::AF_M, TaskId::AF_P,
                                                            TaskId::AF_HL, TaskId::AF_FB};

std::string_view task_name(TaskId t);
std::optional<TaskId> parse_task(std::string_view name);
// nullopt for PR.
std::optional<AfStream> af_stream_of(TaskId t);
TaskId task_of(AfStream s);

class TaskSet {
 public:
  TaskSet() = default;
  TaskSet(std::initializer_list<TaskId> tasks) {
    for (TaskId t : tasks) insert(t);
  }

  void insert(TaskId t) { bits_ |= bit(t); }
  bool contains(TaskId t) const { return (bits_ & bit(t)) != 0; }
  int size() const;
  std::vector<TaskId> tasks() const;  // in TaskId order
  std::string to_string() const;      // "PR+AF_M"
  bool operator==(const TaskSet&) const = default;

 private:
  static unsigned bit(TaskId t) { return 1u << static_cast<unsigned>(t); }
  unsigned bits_ = 0;
};

struct AllAtOnce {
  bool operator==(const AllAtOnce&) const = default;
};

// PR alone for `warmup` steps, then PR plus one auxiliary task, switching to
// the next task in `order` every `interval` steps and staying on the last
// one once the order is exhausted.
struct Sequential {
  std::int64_t warmup = 2000;
  std::int64_t interval = 2000;
  std::vector<TaskId> order = {TaskId::AF_M, TaskId::AF_P, TaskId::AF_HL, TaskId::AF_FB};
  bool operator==(const Sequential&) const = default;
};

using Strategy = std::variant<AllAtOnce, Sequential>;

// Throws ConfigError.
void validate(const Strategy& strategy);

TaskSet active_tasks(std::int64_t step, const Strategy& strategy);

struct SchedulePhase {
  std::int64_t first_step;
  std::int64_t last_step;  // inclusive
  TaskSet tasks;
};

// Maximal runs of steps in [0, steps) with the same active set.
std::vector<SchedulePhase> schedule_timeline(const Strategy& strategy, std::int64_t steps);

// ---------------------------------------------------------------------------
// Configuration

enum class LossCombination { Mean, Sum };

struct TrainConfig {
  std::int64_t steps = 10000;
  double lr = 4e-5;
  int batch_size = 32;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 7;
  Strategy strategy = Sequential{};
  LossCombination combination = LossCombination::Mean;
  int eval_every = 200;
  int patience = 10;  // evaluations without a new best dev PER; 0 disables early stopping

  // Throws ConfigError.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Optimizer

struct AdamState {
  Gradients m;
  Gradients v;
  std::int64_t t = 0;

  static AdamState zeros_like(const ModelParams& params);
};

// One bias-corrected Adam step; bumps params.revision.
void adam_update(ModelParams& params, const Gradients& grads, AdamState& state,
                 const TrainConfig& config);

// ---------------------------------------------------------------------------
// Data

struct Example {
  std::string id;
  StackedViews input;
  LabelSeq canonical;
  LabelSeq perceived;
  std::array<LabelSeq, kNumAfStreams> af_targets;  // derived from `perceived`

  int frames() const { return static_cast<int>(input.frames()); }
  const LabelSeq& target(TaskId task) const;
};

Example make_example(const corpus::UtteranceRecord& record, const corpus::Manifest& manifest,
                     const NetConfig& net, const AfTable& table);
std::vector<Example> load_examples(const corpus::Manifest& manifest, const NetConfig& net,
                                   const AfTable& table);

struct Dataset {
  std::vector<Example> train;
  std::vector<Example> dev;
};

using WarnFn = std::function<void(const std::string&)>;

// ---------------------------------------------------------------------------
// Steps

struct LossReport {
  TaskSet active;
  // Batch-mean CTC loss per active task; empty when every utterance in the
  // batch was infeasible for that task.
  std::array<std::optional<double>, kNumTasks> task_loss;
  double combined = 0.0;  // mean (or sum) of the present task losses
  int skipped = 0;        // (utterance, task) pairs dropped as CTC-infeasible
};

struct BatchGradient {
  LossReport report;
  Gradients grads;  // d combined / d params
};

// Loss and gradient of the combined objective without touching the
// parameters. Infeasible (utterance, task) pairs are skipped with a warning.
BatchGradient batch_gradient(const ModelParams& params, std::span<const Example* const> batch,
                             const TaskSet& active, LossCombination combination,
                             const WarnFn& warn = {});

// Forward, loss, backward and one Adam update. Throws NumericalError if the
// combined loss is not finite.
LossReport train_step(ModelParams& params, std::span<const Example* const> batch,
                      std::int64_t step, const TrainConfig& config, AdamState& adam,
                      const WarnFn& warn = {});

// ---------------------------------------------------------------------------
// Evaluation and the training loop

struct EvalResult {
  double per = 0.0;
  eval::MddCounts counts;
  eval::MddMetrics metrics;
};

// Greedy-decodes the PR head for each example and scores it against the
// canonical and perceived sequences.
EvalResult evaluate(const ModelParams& params, std::span<const Example> examples,
                    const eval::MddOptions& options = {});

LabelSeq predict(const ModelParams& params, const Example& example);

struct StepRecord {
  std::int64_t step;
  LossReport report;
};

struct EvalRecord {
  std::int64_t step;
  double dev_per;
  double dev_f1;
};

using LogRecord = std::variant<StepRecord, EvalRecord>;

// One JSON object per record, no trailing newline.
std::string to_json_line(const LogRecord& record);

struct FitResult {
  ModelParams best;           // lowest dev PER seen (initial params if never evaluated)
  std::int64_t best_step = -1;
  double best_dev_per = 0.0;
  std::int64_t steps_run = 0;
  bool early_stopped = false;
  std::vector<LogRecord> log;
};

struct FitHooks {
  WarnFn warn;
  std::function<void(const LogRecord&)> on_record;  // streamed as the log grows
};

// Epoch-wise batches: a fixed-seed shuffle, then length bucketing inside
// windows of a few batches, then a shuffle of batch order.
class BatchSampler {
 public:
  BatchSampler(std::span<const Example> examples, int batch_size, std::uint64_t seed);
  std::vector<const Example*> next();

 private:
  void refill();

  std::span<const Example> examples_;
  int batch_size_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
  std::vector<std::vector<const Example*>> pending_;
};

FitResult fit(const Dataset& data, const NetConfig& net, const TrainConfig& config,
              const FitHooks& hooks = {});

}  // namespace mvmdd::train

#endif  // MVMDD_TRAINER_HPP_
