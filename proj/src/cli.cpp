// src/cli.cpp
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

#include "mvmdd/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvmdd/af_inventory.hpp"
#include "mvmdd/checkpoint.hpp"
#include "mvmdd/corpusio.hpp"
#include "mvmdd/error.hpp"
#include "mvmdd/evalmetrics.hpp"
#include "mvmdd/netops.hpp"
#include "mvmdd/trainer.hpp"
#include "text_util.hpp"

namespace mvmdd::cli {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// The resolved settings of one command as an INI section. It loads back
// through --config, so a run can be repeated from its echo alone.
class Echo {
 public:
  explicit Echo(std::string section) : section_(std::move(section)) {}

  Echo& add(const std::string& key, const std::string& value) {
    items_.emplace_back(key, value);
    return *this;
  }
  Echo& add(const std::string& key, double value) { return add(key, fmt(value)); }
  template <typename Int>
    requires std::is_integral_v<Int>
  Echo& add(const std::string& key, Int value) {
    if constexpr (std::is_same_v<Int, bool>) return add(key, std::string(value ? "true" : "false"));
    else return add(key, std::to_string(value));
  }

  std::string str() const {
    std::string s = "[" + section_ + "]\n";
    for (const auto& [k, v] : items_) {
      const bool quote = v.empty() || v.find_first_of(" \t#;\"'") != std::string::npos;
      s += k + "=" + (quote ? "\"" + v + "\"" : v) + "\n";
    }
    return s;
  }

 private:
  std::string section_;
  std::vector<std::pair<std::string, std::string>> items_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot create " + path.string());
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

std::vector<train::TaskId> parse_order(const std::vector<std::string>& names) {
  std::vector<train::TaskId> order;
  for (const std::string& name : names) {
    const auto t = train::parse_task(text::trim(name));
    if (!t || *t == train::TaskId::PR)
      throw ConfigError("--order expects AF task names, got '" + name + "'");
    order.push_back(*t);
  }
  return order;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string s;
  for (const auto& item : items) {
    if (!s.empty()) s += sep;
    s += item;
  }
  return s;
}

std::string phone_string(const LabelSeq& seq, const PhoneInventory& inv) {
  std::string s;
  for (Label l : seq) {
    if (!s.empty()) s += ' ';
    s += inv.symbol(l);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Option bundles shared by several commands

struct ScheduleOpts {
  std::string strategy = "seq";
  std::int64_t warmup = 2000;
  std::int64_t interval = 2000;
  std::vector<std::string> order = {"AF_M", "AF_P", "AF_HL", "AF_FB"};

  void bind(CLI::App* cmd) {
    cmd->add_option("--strategy", strategy, "seq: one auxiliary task at a time; all: every task")
        ->check(CLI::IsMember({"seq", "all"}))
        ->capture_default_str();
    cmd->add_option("--warmup", warmup, "PR-only steps before the first auxiliary task")
        ->capture_default_str();
    cmd->add_option("--interval", interval, "steps between auxiliary task switches")
        ->capture_default_str();
    cmd->add_option("--order", order, "auxiliary task order, comma separated")
        ->delimiter(',')
        ->capture_default_str();
  }

  train::Strategy resolve() const {
    if (strategy == "all") return train::AllAtOnce{};
    train::Sequential s;
    s.warmup = warmup;
    s.interval = interval;
    s.order = parse_order(order);
    train::validate(s);
    return s;
  }

  void echo(Echo& e) const {
    e.add("strategy", strategy).add("warmup", warmup).add("interval", interval).add("order", join(order, ','));
  }
};

// ---------------------------------------------------------------------------
// gen-data

struct GenOpts {
  std::string out;
  corpus::SynthConfig synth;
};

void bind_gen(CLI::App* cmd, GenOpts& o) {
  auto& s = o.synth;
  cmd->add_option("--out", o.out, "output directory")->required()->configurable(false);
  cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  cmd->add_option("--n-train", s.n_train, "training utterances")->capture_default_str();
  cmd->add_option("--n-dev", s.n_dev, "dev utterances")->capture_default_str();
  cmd->add_option("--n-test", s.n_test, "test utterances")->capture_default_str();
  cmd->add_option("--min-phones", s.min_phones)->capture_default_str();
  cmd->add_option("--max-phones", s.max_phones)->capture_default_str();
  cmd->add_option("--min-frames-per-phone", s.min_frames_per_phone)->capture_default_str();
  cmd->add_option("--max-frames-per-phone", s.max_frames_per_phone)->capture_default_str();
  cmd->add_option("--rho", s.rho, "per-phone mispronunciation probability")->capture_default_str();
  cmd->add_option("--confusion-bias", s.confusion_bias,
                  "share of substitutions drawn from confusable phones")
      ->capture_default_str();
  cmd->add_option("--sigma", s.sigma, "feature noise standard deviation")->capture_default_str();
  cmd->add_option("--code-dim", s.code_dim, "size of the shared phone code")->capture_default_str();
}

std::string gen_echo(const GenOpts& o) {
  const auto& s = o.synth;
  Echo e("gen-data");
  e.add("seed", s.seed)
      .add("n-train", s.n_train)
      .add("n-dev", s.n_dev)
      .add("n-test", s.n_test)
      .add("min-phones", s.min_phones)
      .add("max-phones", s.max_phones)
      .add("min-frames-per-phone", s.min_frames_per_phone)
      .add("max-frames-per-phone", s.max_frames_per_phone)
      .add("rho", s.rho)
      .add("confusion-bias", s.confusion_bias)
      .add("sigma", s.sigma)
      .add("code-dim", s.code_dim);
  return e.str();
}

void cmd_gen_data(const GenOpts& o, std::ostream& out) {
  o.synth.validate();
  const fs::path dir(o.out);
  ensure_dir(dir);
  const corpus::GeneratedCorpus corpus = corpus::generate(o.synth, dir);
  write_text(dir / "config.ini", gen_echo(o));
  for (const auto& s : corpus.splits)
    out << s.name << "\t" << s.utterances << " utterances\t" << s.phones << " phones\t"
        << s.mispronounced << " mispronounced\t" << s.frames << " frames\n";
  out << "mispronounced fraction " << fmt(corpus.mispronounced_fraction()) << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string data;
  std::string train_manifest;
  std::string dev_manifest;
  std::string out;
  std::string af_table;
  std::string phone_map;
  std::string on_infeasible = "skip";
  std::string combine = "mean";
  train::TrainConfig config;
  ScheduleOpts schedule;
  NetConfig net;
};

void bind_train(CLI::App* cmd, TrainOpts& o) {
  auto& c = o.config;
  auto& n = o.net;
  cmd->add_option("--data", o.data, "dataset directory holding train.jsonl and dev.jsonl");
  cmd->add_option("--train", o.train_manifest, "training manifest (overrides --data)");
  cmd->add_option("--dev", o.dev_manifest, "dev manifest (overrides --data)");
  cmd->add_option("--out", o.out, "output directory")->required()->configurable(false);
  cmd->add_option("--af-table", o.af_table, "AF mapping TSV (default: built-in table)");
  cmd->add_option("--phone-map", o.phone_map, "phone folding TSV (default: built-in map)");
  cmd->add_option("--on-infeasible", o.on_infeasible,
                  "records too short for their targets: skip or error")
      ->check(CLI::IsMember({"skip", "error"}))
      ->capture_default_str();
  cmd->add_option("--steps", c.steps, "optimizer steps")->capture_default_str();
  cmd->add_option("--lr", c.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--batch", c.batch_size, "utterances per batch")->capture_default_str();
  cmd->add_option("--beta1", c.beta1)->capture_default_str();
  cmd->add_option("--beta2", c.beta2)->capture_default_str();
  cmd->add_option("--eps", c.eps)->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed for initialization and batching")->capture_default_str();
  cmd->add_option("--combine", o.combine, "combine task losses by mean or sum")
      ->check(CLI::IsMember({"mean", "sum"}))
      ->capture_default_str();
  cmd->add_option("--eval-every", c.eval_every, "steps between dev evaluations")
      ->capture_default_str();
  cmd->add_option("--patience", c.patience, "evaluations without improvement before stopping")
      ->capture_default_str();
  o.schedule.bind(cmd);
  cmd->add_option("--pool-dim", n.pool_dim)->capture_default_str();
  cmd->add_option("--kernel", n.kernel_size)->capture_default_str();
  cmd->add_option("--stride", n.stride)->capture_default_str();
  cmd->add_option("--channels", n.channels)->capture_default_str();
  cmd->add_option("--emb-dim", n.emb_dim)->capture_default_str();
  cmd->add_option("--af-hidden", n.af_hidden)->capture_default_str();
}

std::string train_echo(const TrainOpts& o) {
  const auto& c = o.config;
  const auto& n = o.net;
  Echo e("train");
  e.add("data", o.data)
      .add("train", o.train_manifest)
      .add("dev", o.dev_manifest)
      .add("af-table", o.af_table)
      .add("phone-map", o.phone_map)
      .add("on-infeasible", o.on_infeasible)
      .add("steps", c.steps)
      .add("lr", c.lr)
      .add("batch", c.batch_size)
      .add("beta1", c.beta1)
      .add("beta2", c.beta2)
      .add("eps", c.eps)
      .add("seed", c.seed)
      .add("combine", o.combine)
      .add("eval-every", c.eval_every)
      .add("patience", c.patience);
  o.schedule.echo(e);
  e.add("pool-dim", n.pool_dim)
      .add("kernel", n.kernel_size)
      .add("stride", n.stride)
      .add("channels", n.channels)
      .add("emb-dim", n.emb_dim)
      .add("af-hidden", n.af_hidden);
  return e.str();
}

corpus::PhoneMap load_phone_map(const std::string& path) {
  return path.empty() ? corpus::PhoneMap::builtin() : corpus::PhoneMap::load(path);
}

void cmd_train(TrainOpts o, std::ostream& out, std::ostream& err) {
  auto warn = [&err](const std::string& msg) { err << "warning: " << msg << "\n"; };

  fs::path train_path = o.train_manifest, dev_path = o.dev_manifest;
  if (train_path.empty() && !o.data.empty()) train_path = fs::path(o.data) / "train.jsonl";
  if (dev_path.empty() && !o.data.empty()) dev_path = fs::path(o.data) / "dev.jsonl";
  if (train_path.empty() || dev_path.empty())
    throw ConfigError("train needs --data or both --train and --dev");

  o.config.strategy = o.schedule.resolve();
  o.config.combination =
      o.combine == "sum" ? train::LossCombination::Sum : train::LossCombination::Mean;
  o.config.validate();

  const AfTable table = AfTable::load_or_builtin(o.af_table);
  o.net.num_phones = table.inventory().size();
  for (AfStream s : kAfStreams) o.net.af_classes[static_cast<int>(s)] = table.num_classes(s);
  o.net.validate();

  const corpus::PhoneMap phone_map = load_phone_map(o.phone_map);
  corpus::ManifestOptions mopts;
  mopts.on_infeasible =
      o.on_infeasible == "error" ? corpus::OnInfeasible::Error : corpus::OnInfeasible::Skip;
  mopts.phone_map = &phone_map;
  mopts.warn = warn;

  train::Dataset data;
  data.train = train::load_examples(corpus::load_manifest(train_path, mopts), o.net, table);
  data.dev = train::load_examples(corpus::load_manifest(dev_path, mopts), o.net, table);

  const fs::path dir(o.out);
  ensure_dir(dir);
  const std::string echo = train_echo(o);
  write_text(dir / "config.ini", echo);

  const fs::path log_path = dir / "train_log.jsonl";
  std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
  if (!log) throw IoError("cannot create " + log_path.string());
  {
    nlohmann::ordered_json head;
    head["config"] = echo;
    head["config_hash"] = hex64(fnv1a64(echo));
    log << head.dump() << "\n";
  }

  train::FitHooks hooks;
  hooks.warn = warn;
  hooks.on_record = [&](const train::LogRecord& rec) {
    log << train::to_json_line(rec) << "\n";
    if (const auto* ev = std::get_if<train::EvalRecord>(&rec))
      out << "step " << ev->step << "\tdev_per " << fmt(ev->dev_per) << "\tdev_f1 "
          << fmt(ev->dev_f1) << "\n";
  };

  const train::FitResult fit = train::fit(data, o.net, o.config, hooks);
  log.flush();
  if (!log) throw IoError("failed writing " + log_path.string());

  Checkpoint ckpt;
  ckpt.net = o.net;
  ckpt.params = fit.best;
  ckpt.config_echo = echo;
  ckpt.step = fit.best_step;
  if (fit.best_step >= 0) ckpt.dev_per = fit.best_dev_per;
  write_checkpoint(ckpt, dir / "checkpoint.mvck");

  out << "trained " << fit.steps_run << " steps" << (fit.early_stopped ? " (early stop)" : "");
  if (fit.best_step >= 0)
    out << "; best dev PER " << fmt(fit.best_dev_per) << " at step " << fit.best_step;
  out << "\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvalOpts {
  std::string checkpoint;
  std::string manifest;
  std::string out;
  std::string oracle = "none";
  std::string averaging = "micro";
  std::string phone_map;
  bool score_insertions = false;
  bool per_utt = false;
};

void bind_eval(CLI::App* cmd, EvalOpts& o) {
  cmd->add_option("--checkpoint", o.checkpoint, "model checkpoint (not needed with --oracle)");
  cmd->add_option("--manifest", o.manifest, "manifest to score")->required();
  cmd->add_option("--out", o.out, "output directory")->required()->configurable(false);
  cmd->add_option("--oracle", o.oracle,
                  "replace model predictions: none, canonical or perceived")
      ->check(CLI::IsMember({"none", "canonical", "perceived"}))
      ->capture_default_str();
  cmd->add_option("--averaging", o.averaging, "corpus averaging: micro or macro")
      ->check(CLI::IsMember({"micro", "macro"}))
      ->capture_default_str();
  cmd->add_option("--phone-map", o.phone_map, "phone folding TSV (default: built-in map)");
  cmd->add_flag("--score-insertions", o.score_insertions,
                "also score insertion slots as TR/FA/FR");
  cmd->add_flag("--per-utt", o.per_utt, "write per_utt.tsv with one row per utterance");
}

std::string eval_echo(const EvalOpts& o) {
  Echo e("evaluate");
  e.add("checkpoint", o.checkpoint)
      .add("manifest", o.manifest)
      .add("oracle", o.oracle)
      .add("averaging", o.averaging)
      .add("phone-map", o.phone_map)
      .add("score-insertions", o.score_insertions)
      .add("per-utt", o.per_utt);
  return e.str();
}

void cmd_evaluate(const EvalOpts& o, std::ostream& out, std::ostream& err) {
  const bool use_model = o.oracle == "none";
  if (use_model && o.checkpoint.empty())
    throw ConfigError("evaluate needs --checkpoint unless --oracle is set");

  std::optional<Checkpoint> ckpt;
  if (!o.checkpoint.empty()) ckpt = read_checkpoint(fs::path(o.checkpoint));

  const corpus::PhoneMap phone_map = load_phone_map(o.phone_map);
  corpus::ManifestOptions mopts;
  mopts.phone_map = &phone_map;
  mopts.check_files = use_model;
  mopts.warn = [&err](const std::string& msg) { err << "warning: " << msg << "\n"; };
  const corpus::Manifest manifest = corpus::load_manifest(o.manifest, mopts);
  if (manifest.records.empty()) throw ValidationError("manifest " + o.manifest + " has no usable records");

  const PhoneInventory& inv = PhoneInventory::standard();
  eval::MddOptions mdd;
  mdd.score_insertions = o.score_insertions;
  eval::Scorer scorer(mdd, inv);

  std::string rows = "id\tper\tta\tfr\tfa\ttr\tcanonical\tperceived\tpredicted\n";
  for (const auto& rec : manifest.records) {
    LabelSeq predicted;
    if (o.oracle == "canonical") predicted = rec.canonical;
    else if (o.oracle == "perceived") predicted = rec.perceived;
    else predicted = train::predict(ckpt->params, train::make_example(rec, manifest, ckpt->net,
                                                                       AfTable::builtin()));
    const eval::MddCounts c = scorer.add(rec.canonical, rec.perceived, predicted);
    if (o.per_utt)
      rows += rec.id + "\t" + fmt(eval::per(rec.perceived, predicted)) + "\t" +
              std::to_string(c.ta) + "\t" + std::to_string(c.fr) + "\t" + std::to_string(c.fa) +
              "\t" + std::to_string(c.tr) + "\t" + phone_string(rec.canonical, inv) + "\t" +
              phone_string(rec.perceived, inv) + "\t" + phone_string(predicted, inv) + "\n";
  }

  const auto averaging = o.averaging == "macro" ? eval::Averaging::Macro : eval::Averaging::Micro;
  const eval::MddMetrics m = scorer.result(averaging);
  const eval::MddCounts& c = scorer.counts();

  const std::string echo = eval_echo(o);
  const std::string train_config = ckpt ? ckpt->config_echo : std::string();
  nlohmann::ordered_json report;
  report["ta"] = c.ta;
  report["fr"] = c.fr;
  report["fa"] = c.fa;
  report["tr"] = c.tr;
  report["tr_correct_diag"] = c.tr_correct_diag;
  report["insertions"] = c.insertions;
  report["recall"] = m.recall;
  report["precision"] = m.precision;
  report["f1"] = m.f1;
  report["per"] = m.per;
  report["degenerate"] = m.degenerate;
  report["utterances"] = scorer.utterances();
  report["averaging"] = o.averaging;
  report["checkpoint_step"] = ckpt ? nlohmann::ordered_json(ckpt->step) : nullptr;
  report["config_hash"] = hex64(fnv1a64(echo + train_config));
  report["config"] = echo;
  report["train_config"] = train_config;

  const fs::path dir(o.out);
  ensure_dir(dir);
  write_text(dir / "report.json", report.dump(2) + "\n");
  if (o.per_utt) write_text(dir / "per_utt.tsv", rows);

  out << "utterances " << scorer.utterances() << "\tPER " << fmt(m.per) << "\tF1 " << fmt(m.f1)
      << "\tprecision " << fmt(m.precision) << "\trecall " << fmt(m.recall) << "\n";
  if (m.degenerate) err << "warning: a metric denominator was zero; its ratio is reported as 0\n";
}

// ---------------------------------------------------------------------------
// inspect-schedule

struct ScheduleCmdOpts {
  std::int64_t steps = 10000;
  ScheduleOpts schedule;
};

void cmd_inspect_schedule(const ScheduleCmdOpts& o, std::ostream& out) {
  if (o.steps < 0) throw ConfigError("--steps must be non-negative");
  const train::Strategy strategy = o.schedule.resolve();
  for (const auto& phase : train::schedule_timeline(strategy, o.steps))
    out << phase.first_step << "-" << phase.last_step << "\t" << phase.tasks.to_string() << "\n";
}

// ---------------------------------------------------------------------------
// map-af

struct MapAfOpts {
  std::vector<std::string> phones;
  std::string af_table;
};

void cmd_map_af(const MapAfOpts& o, std::ostream& out) {
  const AfTable table = AfTable::load_or_builtin(o.af_table);
  const LabelSeq phones = table.inventory().encode(o.phones);
  for (AfStream s : kAfStreams) {
    out << code_name(s) << "\t";
    const LabelSeq classes = map_sequence(phones, s, table);
    for (std::size_t i = 0; i < classes.size(); ++i)
      out << (i ? " " : "") << table.class_name(s, classes[i]);
    out << "\n";
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e))
    return kExitIo;
  if (dynamic_cast<const Error*>(&e)) return kExitUsage;
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Multi-view mispronunciation detection toolkit", "mvmdd");
  app.set_config("--config", "", "INI file with one [command] section; flags override it");
  app.require_subcommand(1);
  app.fallthrough(false);

  GenOpts gen;
  TrainOpts tr;
  EvalOpts ev;
  ScheduleCmdOpts sched;
  MapAfOpts mapaf;

  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic two-view corpus");
  bind_gen(gen_cmd, gen);
  auto* train_cmd = app.add_subcommand("train", "train a model and write its best checkpoint");
  bind_train(train_cmd, tr);
  auto* eval_cmd = app.add_subcommand("evaluate", "score a checkpoint on a manifest");
  bind_eval(eval_cmd, ev);
  auto* sched_cmd = app.add_subcommand("inspect-schedule", "list the auxiliary task timeline");
  sched_cmd->add_option("--steps", sched.steps, "training steps")->capture_default_str();
  sched.schedule.bind(sched_cmd);
  auto* map_cmd = app.add_subcommand("map-af", "print the AF class sequences of a phone sequence");
  map_cmd->add_option("phones", mapaf.phones, "phone symbols")->required();
  map_cmd->add_option("--af-table", mapaf.af_table, "AF mapping TSV (default: built-in table)");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("mvmdd");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) cmd_gen_data(gen, out);
    else if (train_cmd->parsed()) cmd_train(tr, out, err);
    else if (eval_cmd->parsed()) cmd_evaluate(ev, out, err);
    else if (sched_cmd->parsed()) cmd_inspect_schedule(sched, out);
    else if (map_cmd->parsed()) cmd_map_af(mapaf, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace mvmdd::cli
