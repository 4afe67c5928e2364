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

#ifndef LIFTSIM_SIMCORE_HPP_
#define LIFTSIM_SIMCORE_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "liftsim/traffic.hpp"

namespace liftsim {

// Codes are stable: they are the network's output indices.
enum class Action : int {
  kIdle = 0,
  kOpenCloseUp = 1,
  kOpenCloseDown = 2,
  kMoveUp = 3,
  kMoveDown = 4,
};

inline constexpr int kActionCount = 5;

const char* action_name(Action action);

enum class Direction : int { kUp = 0, kDown = 1 };

inline Direction opposite(Direction d) {
  return d == Direction::kUp ? Direction::kDown : Direction::kUp;
}
inline Action open_close(Direction d) {
  return d == Direction::kUp ? Action::kOpenCloseUp : Action::kOpenCloseDown;
}
inline Action move(Direction d) {
  return d == Direction::kUp ? Action::kMoveUp : Action::kMoveDown;
}

// Small bitset over the five actions.
class ActionSet {
 public:
  constexpr ActionSet() = default;
  constexpr explicit ActionSet(unsigned mask) : mask_(mask & 0x1Fu) {}

  static constexpr ActionSet all() { return ActionSet(0x1Fu); }

  constexpr bool contains(Action a) const {
    return (mask_ >> static_cast<int>(a)) & 1u;
  }
  constexpr void insert(Action a) { mask_ |= 1u << static_cast<int>(a); }
  constexpr void erase(Action a) { mask_ &= ~(1u << static_cast<int>(a)); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr unsigned mask() const { return mask_; }
  int size() const;
  std::vector<Action> to_vector() const;

  constexpr bool operator==(const ActionSet&) const = default;

 private:
  unsigned mask_ = 0;
};

struct HallCallArrival {
  int start_floor = 1;
  int dest_floor = 2;
  double weight_kg = 0.0;
  int passenger_id = 0;
};

struct Event {
  double time_s = 0.0;
  std::uint64_t sequence = 0;
  HallCallArrival call;
};

// Future exogenous events, popped in (time, insertion sequence) order.
class TimeList {
 public:
  void push(double time_s, const HallCallArrival& call);
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& peek() const;
  Event pop();

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time_s != b.time_s) return a.time_s > b.time_s;
      return a.sequence > b.sequence;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
};

enum class Location { kHall, kCar, kDelivered };

struct Passenger {
  int id = 0;
  double call_time_s = 0.0;
  std::optional<double> board_time_s;
  std::optional<double> delivery_time_s;
  int start_floor = 1;
  int dest_floor = 2;
  double weight_kg = 0.0;
  Location location = Location::kHall;

  Direction direction() const {
    return dest_floor > start_floor ? Direction::kUp : Direction::kDown;
  }
};

struct BuildingConfig {
  int floor_count = 8;
  double capacity_kg = 1000.0;
  double door_cycle_s = 15.0;
  double floor_travel_s = 5.0;
  double start_clock_s = 27000.0;
  // Lets OpenClose run at floors where nobody boards or leaves, and lets the
  // car move while no passenger is in the hall or the car.
  bool allow_idle_doors = false;
  // Idle with no future events but passengers still waiting advances the
  // clock by this much.
  double idle_fallback_s = 5.0;
};

void validate(const BuildingConfig& config);

// Per-floor vectors are indexed by floor - 1.
struct BuildingState {
  double clock_s = 0.0;
  int current_floor = 1;
  double capacity_kg = 0.0;
  double current_weight_kg = 0.0;
  std::vector<bool> up_buttons;
  std::vector<bool> down_buttons;
  std::vector<bool> car_buttons;
  // hall_queues[floor - 1][direction] holds passenger ids in call order.
  std::vector<std::array<std::deque<int>, 2>> hall_queues;
  std::vector<int> riders;
  double door_cycle_s = 15.0;
  double floor_travel_s = 5.0;

  int floor_count() const { return static_cast<int>(up_buttons.size()); }
};

// What a controller sees. `extended` adds the two load scalars.
struct Observation {
  std::vector<bool> up_buttons;
  std::vector<bool> down_buttons;
  std::vector<bool> car_buttons;
  int current_floor = 1;
  bool extended = false;
  double capacity_kg = 0.0;
  double current_weight_kg = 0.0;

  bool operator==(const Observation&) const = default;
  auto operator<=>(const Observation&) const = default;

  int floor_count() const { return static_cast<int>(up_buttons.size()); }
  bool any_hall_call() const;
  // "FxUyDzCw" with button bitstrings; stable across runs.
  std::string key() const;
};

struct StepOutcome {
  double elapsed_s = 0.0;
  int boarded = 0;
  int delivered = 0;
  // Passenger ids whose hall calls were drained during the step.
  std::vector<int> arrivals;
  bool terminal = false;
};

// One episode: state, time list and the passenger ledger.
class Simulation {
 public:
  // Queues one HallCallArrival per record. Passenger ids are record indices.
  Simulation(const TrafficTable& table, const BuildingConfig& config);

  const BuildingConfig& config() const { return config_; }
  const BuildingState& state() const { return state_; }
  const TimeList& time_list() const { return time_list_; }
  const std::vector<Passenger>& passengers() const { return passengers_; }

  ActionSet legal_actions() const;
  bool is_terminal() const;

  // Throws IllegalAction for actions outside legal_actions().
  StepOutcome apply(Action action);

  Observation observe(bool extended = false) const;

  int drained_count() const { return drained_; }
  int hall_count() const;
  int rider_count() const { return static_cast<int>(state_.riders.size()); }
  int delivered_count() const { return delivered_; }

 private:
  void drain_until(double clock_s, std::vector<int>& arrivals);
  void refresh_buttons(int floor);
  void refresh_load();

  BuildingConfig config_;
  BuildingState state_;
  TimeList time_list_;
  std::vector<Passenger> passengers_;
  int drained_ = 0;
  int delivered_ = 0;
};

// One trace row. Row 0 is the initial state with action -1; row k > 0
// describes the state after step k.
struct TraceRow {
  std::size_t step = 0;
  double clock_s = 0.0;
  int floor = 1;
  int action = -1;
  double reward = 0.0;
  int boarded = 0;
  int delivered = 0;
  int waiting = 0;
  std::vector<bool> up_buttons;
  std::vector<bool> down_buttons;
  std::vector<bool> car_buttons;
  std::vector<int> arrivals;
};

inline constexpr const char* kTraceCsvHeader =
    "step,clock_s,floor,action,reward,boarded,delivered,waiting,"
    "up_buttons,down_buttons,car_buttons,arrivals";

TraceRow make_trace_row(std::size_t step, const Simulation& sim, int action,
                        double reward, const StepOutcome& outcome, int waiting);
void write_trace_csv(std::span<const TraceRow> rows, std::ostream& out);
std::vector<TraceRow> read_trace_csv(std::istream& in);

struct TraceStep {
  Observation before;
  Action action = Action::kIdle;
  Observation after;
  std::size_t step = 0;
  std::vector<int> arrivals;
};

// Pairs consecutive rows into (before, action, after) triples.
std::vector<TraceStep> trace_steps(std::span<const TraceRow> rows);

struct MarkovViolation {
  Observation observation;
  Action action = Action::kIdle;
  std::vector<Observation> successors;  // distinct, in first-seen order
  std::vector<std::size_t> steps;       // every step in the group
  std::vector<int> arrivals;            // exogenous calls inside those steps
};

struct MarkovReport {
  std::size_t triples = 0;
  std::size_t groups = 0;
  std::vector<MarkovViolation> violations;
};

// Groups triples by (observation, action) and reports every group whose
// successors differ.
MarkovReport markov_probe(std::span<const TraceStep> trace);

}  // namespace liftsim

#endif  // LIFTSIM_SIMCORE_HPP_
