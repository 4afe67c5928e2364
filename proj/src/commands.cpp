// Copyright 2026 The liftsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "liftsim/error.hpp"
#include "liftsim/harness.hpp"

namespace liftsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string require(const Config& c, const std::string& key, const std::string& command) {
  const auto v = c.find(key);
  if (!v || v->empty()) throw ConfigError(command + ": missing required key '" + key + "'");
  return *v;
}

// The configuration a command actually ran with: its name and the resolved
// seed are pinned so the sidecar alone reproduces the run.
struct Run {
  std::string command;
  Config config;
  std::optional<std::uint64_t> seed;
  std::string hash;
};

Run prepare(const std::string& command, const Config& in, bool seed_required) {
  Run run{command, in, std::nullopt, {}};
  if (const auto pinned = in.find("command"); pinned && *pinned != command) {
    throw ConfigError("config was written for '" + *pinned + "', not '" + command + "'");
  }
  run.config.set("command", command);
  if (seed_required || in.has("seed") || std::getenv("LIFTSIM_SEED")) {
    run.seed = resolve_seed(in);
    run.config.set("seed", std::to_string(*run.seed));
  }
  run.hash = run.config.hash();
  return run;
}

std::string sidecar(const Run& run) {
  std::string out = "# liftsim " + run.command + "\n# config_hash = " + run.hash + "\n";
  return out + run.config.canonical();
}

json stamp(const Run& run) {
  json j;
  j["command"] = run.command;
  j["config_hash"] = run.hash;
  j["seed"] = run.seed ? json(*run.seed) : json(nullptr);
  return j;
}

std::string out_dir(const Run& run) {
  const std::string dir = require(run.config, "out_dir", run.command);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  return dir;
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

std::string trace_text(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  write_trace_csv(rows, out);
  return out.str();
}

CommandResult cmd_generate(const Config& in) {
  const Run run = prepare("generate", in, true);
  const std::string out = require(run.config, "out", run.command);
  const TrafficTable table = generate_day(traffic_profile_from(run.config, *run.seed));
  write_file_atomic(out, to_csv(table));
  write_file_atomic(out + ".config", sidecar(run));
  json summary = stamp(run);
  summary["records"] = table.size();
  return {0, summary.dump(), {out, out + ".config"}};
}

CommandResult cmd_run_naive(const Config& in) {
  const Run run = prepare("run-naive", in, true);
  const BuildingConfig building = building_from(run.config);
  const TrafficTable tape =
      read_csv_file(require(run.config, "tape", run.command), building.floor_count);
  const std::string dir = out_dir(run);
  NaiveRunOptions options;
  options.record_trace = true;
  options.waiting_mode = hyperparams_from(run.config).waiting_mode;
  const NaiveRun result = run_naive(tape, building, *run.seed, options);

  json report = stamp(run);
  report["metrics"] = json::parse(metrics_to_json(result.metrics));
  report["steps"] = result.steps;
  const std::string report_path = join(dir, "report.json");
  const std::string trace_path = join(dir, "trace.csv");
  const std::string config_path = join(dir, "run.config");
  write_file_atomic(report_path, report.dump(2) + "\n");
  write_file_atomic(trace_path, trace_text(result.trace));
  write_file_atomic(config_path, sidecar(run));
  return {result.metrics.truncated ? static_cast<int>(ErrorCode::kTruncated) : 0,
          report.dump(), {report_path, trace_path, config_path}};
}

// Wall-clock time would break byte-identical reruns, so the timestamp comes
// from SOURCE_DATE_EPOCH when set and is the Unix epoch otherwise.
std::string created_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  }
  std::tm parts{};
  gmtime_r(&t, &parts);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buf;
}

CommandResult cmd_train_dqn(const Config& in) {
  const Run run = prepare("train-dqn", in, true);
  const BuildingConfig building = building_from(run.config);
  const dqn::DqnHyperparams hyper = hyperparams_from(run.config);
  const bool resample = run.config.get_bool("resample", false);
  const std::string dir = out_dir(run);

  std::vector<TrafficTable> tapes;
  if (resample) {
    if (run.config.has("tape")) throw ConfigError("train-dqn: 'resample' needs a profile, not a tape");
    for (int epoch = 0; epoch < std::max(hyper.epochs, 1); ++epoch) {
      tapes.push_back(generate_day(traffic_profile_from(run.config, *run.seed + epoch)));
    }
  } else if (run.config.has("tape")) {
    tapes.push_back(read_csv_file(run.config.get("tape", ""), building.floor_count));
  } else {
    tapes.push_back(generate_day(traffic_profile_from(run.config, *run.seed)));
  }
  auto factory = [&](int epoch) {
    return Simulation(tapes[resample ? static_cast<std::size_t>(epoch) : 0], building);
  };

  const auto hidden = hidden_sizes_from(run.config);
  const dqn::QModel initial =
      dqn::make_model(building.floor_count, building.capacity_kg, hidden, *run.seed);
  dqn::TrainResult trained;
  try {
    trained = dqn::train(factory, hyper, initial, *run.seed);
  } catch (const NumericError& e) {
    json dump = stamp(run);
    dump["error"] = e.what();
    dump["detail"] = e.payload().empty() ? json(nullptr) : json::parse(e.payload());
    write_file_atomic(join(dir, "failed_minibatch.json"), dump.dump() + "\n");
    throw;
  }

  nn::Checkpoint checkpoint;
  checkpoint.net = trained.model.net;
  checkpoint.config_hash = run.hash;
  checkpoint.encoder = {{"floor_count", building.floor_count},
                        {"capacity_kg", building.capacity_kg}};
  checkpoint.created = created_timestamp();
  std::ostringstream log;
  dqn::write_epoch_log(trained.log, log);

  const std::string checkpoint_path = join(dir, "checkpoint.json");
  const std::string log_path = join(dir, "epochs.tsv");
  const std::string config_path = join(dir, "run.config");
  write_file_atomic(checkpoint_path, nn::checkpoint_to_string(checkpoint));
  write_file_atomic(log_path, log.str());
  write_file_atomic(config_path, sidecar(run));

  json summary = stamp(run);
  summary["epochs"] = trained.log.size();
  summary["target_syncs"] = trained.target_syncs;
  int truncated = 0;
  for (const auto& e : trained.log) truncated += e.metrics.truncated;
  summary["truncated_epochs"] = truncated;
  if (!trained.log.empty()) {
    summary["last_epoch"] = json::parse(metrics_to_json(trained.log.back().metrics));
  }
  return {0, summary.dump(), {checkpoint_path, log_path, config_path}};
}

dqn::QModel model_from_checkpoint(const nn::Checkpoint& ck, const BuildingConfig& b) {
  dqn::QModel model;
  model.net = ck.net;
  model.floor_count = b.floor_count;
  model.capacity_kg = b.capacity_kg;
  if (const auto it = ck.encoder.find("floor_count"); it != ck.encoder.end()) {
    if (static_cast<int>(it->second) != b.floor_count) {
      throw ConfigError("checkpoint was trained for " +
                        std::to_string(static_cast<int>(it->second)) + " floors, building has " +
                        std::to_string(b.floor_count));
    }
  }
  if (const auto it = ck.encoder.find("capacity_kg"); it != ck.encoder.end()) {
    model.capacity_kg = it->second;
  }
  return model;
}

CommandResult cmd_infer_dqn(const Config& in) {
  const Run run = prepare("infer-dqn", in, false);
  const BuildingConfig building = building_from(run.config);
  const TrafficTable tape =
      read_csv_file(require(run.config, "tape", run.command), building.floor_count);
  const nn::Checkpoint ck =
      nn::load_checkpoint_file(require(run.config, "checkpoint", run.command));
  const dqn::QModel model = model_from_checkpoint(ck, building);
  const dqn::DqnHyperparams hyper = hyperparams_from(run.config);
  const std::string dir = out_dir(run);

  const dqn::InferResult result =
      dqn::infer(Simulation(tape, building), model, dqn::step_cap(hyper, tape.size()));

  // Replays the greedy action stream to produce the diagnostic trace.
  Simulation replay(tape, building);
  std::vector<TraceRow> rows;
  rows.push_back(make_trace_row(0, replay, -1, 0.0, StepOutcome{},
                                dqn::waiting_count(replay, hyper.waiting_mode)));
  for (std::size_t i = 0; i < result.actions.size(); ++i) {
    const StepOutcome outcome = replay.apply(result.actions[i]);
    const int waiting = dqn::waiting_count(replay, hyper.waiting_mode);
    rows.push_back(make_trace_row(i + 1, replay, static_cast<int>(result.actions[i]),
                                  dqn::reward(outcome, waiting), outcome, waiting));
  }

  json report = stamp(run);
  report["metrics"] = json::parse(metrics_to_json(result.metrics));
  report["steps"] = result.actions.size();
  report["checkpoint_config_hash"] = ck.config_hash;
  const std::string report_path = join(dir, "report.json");
  const std::string trace_path = join(dir, "trace.csv");
  const std::string config_path = join(dir, "run.config");
  write_file_atomic(report_path, report.dump(2) + "\n");
  write_file_atomic(trace_path, trace_text(rows));
  write_file_atomic(config_path, sidecar(run));
  return {result.metrics.truncated ? static_cast<int>(ErrorCode::kTruncated) : 0,
          report.dump(), {report_path, trace_path, config_path}};
}

CommandResult cmd_probe_markov(const Config& in) {
  const Run run = prepare("probe-markov", in, false);
  const std::string trace_path = require(run.config, "trace", run.command);
  const std::string out = require(run.config, "out", run.command);
  std::istringstream text(read_file(trace_path));
  std::vector<TraceRow> rows;
  try {
    rows = read_trace_csv(text);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), e.column(), trace_path);
  }
  const auto steps = trace_steps(rows);
  const MarkovReport probe = markov_probe(steps);

  json report = stamp(run);
  report["triples"] = probe.triples;
  report["groups"] = probe.groups;
  report["violation_groups"] = probe.violations.size();
  json violations = json::array();
  for (const MarkovViolation& v : probe.violations) {
    json successors = json::array();
    for (const Observation& o : v.successors) successors.push_back(o.key());
    violations.push_back({{"observation", v.observation.key()},
                          {"action", action_name(v.action)},
                          {"steps", v.steps},
                          {"successors", successors},
                          {"arrivals", v.arrivals}});
  }
  report["violations"] = std::move(violations);
  write_file_atomic(out, report.dump(2) + "\n");
  json summary = stamp(run);
  summary["triples"] = probe.triples;
  summary["violation_groups"] = probe.violations.size();
  return {0, summary.dump(), {out}};
}

// The series label is the training run's config hash when its sidecar sits
// next to the log, otherwise a hash of the log bytes.
std::string series_label(const std::string& log_path, const std::string& log_bytes) {
  const fs::path sidecar_path = fs::path(log_path).parent_path() / "run.config";
  std::error_code ec;
  if (fs::exists(sidecar_path, ec)) {
    std::istringstream in(read_file(sidecar_path.string()));
    const std::string marker = "# config_hash = ";
    for (std::string line; std::getline(in, line);) {
      if (line.rfind(marker, 0) == 0) return line.substr(marker.size());
    }
  }
  return hex64(fnv1a64(log_bytes));
}

CommandResult cmd_report(const Config& in) {
  const Run run = prepare("report", in, false);
  const std::string log_path = require(run.config, "log", run.command);
  const std::string out = require(run.config, "out", run.command);
  const std::string bytes = read_file(log_path);
  std::istringstream text(bytes);
  std::vector<dqn::EpochLog> log;
  try {
    log = dqn::read_epoch_log(text);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), e.column(), log_path);
  }
  const std::string label = series_label(log_path, bytes);
  std::ostringstream csv;
  csv << "series,epoch,num_events,people_moved,mean_total_time_s,median_total_time_s,"
         "max_total_time_s,sum_total_time_s,epsilon,loss_mean\n";
  for (const dqn::EpochLog& e : log) {
    const MetricsReport& m = e.metrics;
    csv << label << ',' << e.epoch << ',' << m.num_events << ',' << m.people_moved << ','
        << format_double(m.mean_total_time_s) << ',' << format_double(m.median_total_time_s)
        << ',' << format_double(m.max_total_time_s) << ','
        << format_double(m.sum_total_time_s) << ',' << format_double(e.epsilon) << ','
        << format_double(e.loss_mean) << '\n';
  }
  write_file_atomic(out, csv.str());
  write_file_atomic(out + ".config", sidecar(run));
  json summary = stamp(run);
  summary["series"] = label;
  summary["rows"] = log.size();
  return {0, summary.dump(), {out, out + ".config"}};
}

CommandResult cmd_clone_naive(const Config& in) {
  const Run run = prepare("clone-naive", in, true);
  const BuildingConfig building = building_from(run.config);
  const TrafficTable tape =
      read_csv_file(require(run.config, "tape", run.command), building.floor_count);
  const std::string dir = out_dir(run);
  CloneConfig clone;
  clone.epochs = run.config.get_int("clone_epochs", clone.epochs);
  clone.learning_rate = run.config.get_double("clone_learning_rate", clone.learning_rate);
  clone.holdout_fraction = run.config.get_double("holdout_fraction", clone.holdout_fraction);
  clone.hidden = hidden_sizes_from(run.config);
  clone.seed = *run.seed;
  const CloneResult result = clone_naive(tape, building, clone);

  nn::Checkpoint checkpoint;
  checkpoint.net = result.model.net;
  checkpoint.config_hash = run.hash;
  checkpoint.created = created_timestamp();
  checkpoint.encoder = {{"floor_count", building.floor_count},
                        {"capacity_kg", building.capacity_kg}};
  json report = stamp(run);
  report["train_size"] = result.train_size;
  report["heldout_size"] = result.heldout_size;
  report["train_accuracy"] = result.train_accuracy;
  report["heldout_accuracy"] = result.heldout_accuracy;
  report["heldout_masked_accuracy"] = result.heldout_masked_accuracy;
  report["majority_rate"] = result.majority_rate;
  report["majority_action"] = action_name(result.majority_action);
  const std::string checkpoint_path = join(dir, "checkpoint.json");
  const std::string report_path = join(dir, "clone.json");
  const std::string config_path = join(dir, "run.config");
  write_file_atomic(checkpoint_path, nn::checkpoint_to_string(checkpoint));
  write_file_atomic(report_path, report.dump(2) + "\n");
  write_file_atomic(config_path, sidecar(run));
  return {0, report.dump(), {checkpoint_path, report_path, config_path}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"generate",    "run-naive",
                                                 "train-dqn",   "infer-dqn",
                                                 "probe-markov", "report",
                                                 "clone-naive"};
  return names;
}

CommandResult run_command(const std::string& command, const Config& config) {
  if (command == "generate") return cmd_generate(config);
  if (command == "run-naive") return cmd_run_naive(config);
  if (command == "train-dqn") return cmd_train_dqn(config);
  if (command == "infer-dqn") return cmd_infer_dqn(config);
  if (command == "probe-markov") return cmd_probe_markov(config);
  if (command == "report") return cmd_report(config);
  if (command == "clone-naive") return cmd_clone_naive(config);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace liftsim
