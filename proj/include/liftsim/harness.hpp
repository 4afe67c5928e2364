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

#ifndef LIFTSIM_HARNESS_HPP_
#define LIFTSIM_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liftsim/dqn.hpp"
#include "liftsim/metrics.hpp"
#include "liftsim/simcore.hpp"
#include "liftsim/traffic.hpp"

namespace liftsim {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Flat `key = value` configuration. Later sets override earlier ones, so a
// file loaded first and flags applied after gives "flags win".
class Config {
 public:
  // Throws ConfigError for keys outside known_keys().
  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
  void parse(std::istream& in, const std::string& source);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> find(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Sorted `key = value` lines; the input to hash().
  std::string canonical() const;
  std::string hash() const;

  const std::map<std::string, std::string>& values() const { return values_; }

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

// Seed from the `seed` key, else LIFTSIM_SEED; ConfigError when neither.
std::uint64_t resolve_seed(const Config& config);

TrafficProfile traffic_profile_from(const Config& config, std::uint64_t seed);
BuildingConfig building_from(const Config& config);
dqn::DqnHyperparams hyperparams_from(const Config& config);
std::vector<int> hidden_sizes_from(const Config& config);

struct RecordedDecision {
  dqn::EncodedState state;
  ActionSet legal;
  Action action = Action::kIdle;
};

struct NaiveRun {
  MetricsReport metrics;
  std::size_t steps = 0;
  std::vector<TraceRow> trace;
  std::vector<RecordedDecision> decisions;
};

struct NaiveRunOptions {
  bool record_trace = false;
  bool record_decisions = false;
  dqn::WaitingMode waiting_mode = dqn::WaitingMode::kHallAndRiders;
  // 0 means 10 * events * floor_count.
  std::size_t step_cap = 0;
};

NaiveRun run_naive(const TrafficTable& tape, const BuildingConfig& building,
                   std::uint64_t seed, const NaiveRunOptions& options = {});

struct CloneConfig {
  int epochs = 50;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t minibatch = 32;
  double holdout_fraction = 0.2;
  std::vector<int> hidden = {64, 64};
  std::uint64_t seed = 0;
};

struct CloneResult {
  dqn::QModel model;
  std::size_t train_size = 0;
  std::size_t heldout_size = 0;
  // Unmasked argmax over the five outputs against the recorded action.
  double train_accuracy = 0.0;
  double heldout_accuracy = 0.0;
  // Same, restricted to legal actions.
  double heldout_masked_accuracy = 0.0;
  // Held-out share of the most frequent training label.
  double majority_rate = 0.0;
  Action majority_action = Action::kIdle;
};

// Supervised softmax fit of the DQN architecture to naive decisions recorded
// on `tape`. The output layer starts at zero weights with log-prior biases,
// so zero epochs predicts the majority class everywhere.
CloneResult clone_naive(const TrafficTable& tape, const BuildingConfig& building,
                        const CloneConfig& config);

// Writes to a sibling temp file then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct CommandResult {
  int exit_code = 0;
  std::string summary;  // JSON object
  std::vector<std::string> outputs;
};

const std::vector<std::string>& command_names();

// Runs one CLI subcommand. Errors surface as liftsim::Error.
CommandResult run_command(const std::string& command, const Config& config);

std::string metrics_to_json(const MetricsReport& report, int indent = -1);

}  // namespace liftsim

#endif  // LIFTSIM_HARNESS_HPP_
