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

#ifndef LIFTSIM_DQN_HPP_
#define LIFTSIM_DQN_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "liftsim/metrics.hpp"
#include "liftsim/nnfa.hpp"
#include "liftsim/rng.hpp"
#include "liftsim/simcore.hpp"

namespace liftsim::dqn {

// [capacity, weight, floor, car x F, up x F, down x F]
using EncodedState = std::vector<double>;

inline std::size_t encoded_size(int floor_count) {
  return 3 + 3 * static_cast<std::size_t>(floor_count);
}

EncodedState encode_state(const BuildingState& state);

// 0 Idle, 1 OpenCloseUp, 2 OpenCloseDown, 3 MoveUp, 4 MoveDown.
Action decode_action(int code);

enum class WaitingMode {
  kHallAndRiders,
  kHallOnly,
};

int waiting_count(const Simulation& sim, WaitingMode mode);

// -(waiting after the step) * (elapsed seconds of the step).
double reward(const StepOutcome& outcome, int waiting_after);

struct Transition {
  EncodedState state;
  int action = 0;
  double reward = 0.0;
  EncodedState next_state;
  bool terminal = false;
  ActionSet next_legal;
};

// Bounded FIFO of transitions. Every stored transition gets a sequence
// number; after n pushes the buffer holds sequences [n - size, n).
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushed() const { return pushed_; }
  std::uint64_t oldest_sequence() const { return pushed_ - size_; }

  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

  // `count` indices drawn uniformly with replacement (indices into at()).
  std::vector<std::size_t> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> buffer_;
  std::size_t head_ = 0;  // slot of the oldest entry once full
  std::size_t size_ = 0;
  std::uint64_t pushed_ = 0;
};

// Network plus the fixed input scaling derived from the building: load
// scalars divided by capacity, floor divided by floor count. Buttons pass
// through.
struct QModel {
  nn::NetworkParams net;
  int floor_count = 8;
  double capacity_kg = 1000.0;

  std::vector<double> scale_input(std::span<const double> encoded) const;
  std::vector<double> q_values(std::span<const double> encoded) const;
};

// Fresh model for the building; hidden sizes default to {64, 64}.
QModel make_model(int floor_count, double capacity_kg,
                  std::span<const int> hidden, std::uint64_t seed);

// Lowest-index maximizer among legal actions.
int greedy_action(std::span<const double> q_values, ActionSet legal);

// With probability epsilon a uniform legal action, else greedy_action.
int select_action(const QModel& model, std::span<const double> state,
                  ActionSet legal, double epsilon, Rng& rng);

enum class TdMode {
  kStandard,      // r + discount * max
  kPaperLiteral,  // r - discount * max
};

double td_target(const Transition& t, const QModel& target, double discount,
                 TdMode mode);

enum class UpdateLoop {
  kAveraged,      // one step per minibatch on the mean squared error
  kPaperLiteral,  // one step per minibatch element, sync counted per element
};

struct DqnHyperparams {
  double epsilon = 0.1;
  double discount = 0.99;
  double learning_rate = 1e-3;
  double momentum = 0.0;
  std::size_t minibatch = 32;
  std::size_t replay_capacity = 100000;
  std::size_t target_sync = 1000;
  int epochs = 10;
  double step_cap_factor = 50.0;
  double reward_scale = 1e-3;
  // Global gradient-norm clip per update, 0 disables.
  double grad_clip = 10.0;
  TdMode td_mode = TdMode::kStandard;
  WaitingMode waiting_mode = WaitingMode::kHallAndRiders;
  UpdateLoop update_loop = UpdateLoop::kAveraged;
  // Skip gradient steps; actions still come from the (fixed) online net.
  bool freeze = false;
};

// Throws ConfigError on out-of-range values.
void validate(const DqnHyperparams& hyper);

struct EpochLog {
  int epoch = 0;
  MetricsReport metrics;
  double epsilon = 0.0;
  double loss_mean = 0.0;
  std::size_t steps = 0;
  std::size_t updates = 0;
};

inline constexpr const char* kEpochLogHeader =
    "epoch\tnum_events\tpeople_moved\tmean_total_time_s\tmedian_total_time_s\t"
    "max_total_time_s\tsum_total_time_s\tepsilon\tloss_mean";

void write_epoch_log(std::span<const EpochLog> log, std::ostream& out);
std::vector<EpochLog> read_epoch_log(std::istream& in);

// Optional observation points for diagnostics and tests.
struct TrainHooks {
  std::function<void(const ReplayMemory&)> on_store;
  std::function<void(int epoch, Action action)> on_action;
  std::function<void(std::size_t update, const QModel& target)> on_update;
};

struct TrainResult {
  QModel model;
  std::vector<EpochLog> log;
  std::size_t target_syncs = 0;
};

// Builds the environment for a given epoch (0-based).
using EnvFactory = std::function<Simulation(int epoch)>;

std::size_t step_cap(const DqnHyperparams& hyper, std::size_t event_count);

// Throws NumericError (payload = offending minibatch as JSON) on a
// non-finite loss.
TrainResult train(const EnvFactory& make_env, const DqnHyperparams& hyper,
                  const QModel& initial, std::uint64_t seed,
                  const TrainHooks& hooks = {});

struct InferResult {
  MetricsReport metrics;
  std::vector<Action> actions;
};

// Greedy legal-masked rollout to terminal or `cap` steps.
InferResult infer(Simulation env, const QModel& model, std::size_t cap);

}  // namespace liftsim::dqn

#endif  // LIFTSIM_DQN_HPP_
