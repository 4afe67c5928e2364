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

#include "liftsim/simcore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "liftsim/error.hpp"

namespace liftsim {

const char* action_name(Action action) {
  switch (action) {
    case Action::kIdle: return "Idle";
    case Action::kOpenCloseUp: return "OpenCloseUp";
    case Action::kOpenCloseDown: return "OpenCloseDown";
    case Action::kMoveUp: return "MoveUp";
    case Action::kMoveDown: return "MoveDown";
  }
  return "?";
}

int ActionSet::size() const {
  int n = 0;
  for (unsigned m = mask_; m != 0; m &= m - 1) ++n;
  return n;
}

std::vector<Action> ActionSet::to_vector() const {
  std::vector<Action> out;
  for (int a = 0; a < kActionCount; ++a) {
    if (contains(static_cast<Action>(a))) out.push_back(static_cast<Action>(a));
  }
  return out;
}

void TimeList::push(double time_s, const HallCallArrival& call) {
  heap_.push(Event{time_s, next_sequence_++, call});
}

const Event& TimeList::peek() const {
  if (heap_.empty()) throw InvalidArgument("TimeList::peek on empty list");
  return heap_.top();
}

Event TimeList::pop() {
  Event e = peek();
  heap_.pop();
  return e;
}

void validate(const BuildingConfig& c) {
  if (c.floor_count < 2) throw ConfigError("floor_count must be >= 2");
  if (!(c.capacity_kg > 0.0)) throw ConfigError("capacity_kg must be > 0");
  if (!(c.door_cycle_s > 0.0)) throw ConfigError("door_cycle_s must be > 0");
  if (!(c.floor_travel_s > 0.0)) throw ConfigError("floor_travel_s must be > 0");
  if (!(c.idle_fallback_s > 0.0)) throw ConfigError("idle_fallback_s must be > 0");
  if (!(c.start_clock_s >= 0.0)) throw ConfigError("start_clock_s must be >= 0");
}

bool Observation::any_hall_call() const {
  return std::find(up_buttons.begin(), up_buttons.end(), true) != up_buttons.end() ||
         std::find(down_buttons.begin(), down_buttons.end(), true) !=
             down_buttons.end();
}

namespace {

std::string bits(const std::vector<bool>& v) {
  std::string s;
  s.reserve(v.size());
  for (bool b : v) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace

std::string Observation::key() const {
  std::string k = "F" + std::to_string(current_floor) + "U" + bits(up_buttons) +
                  "D" + bits(down_buttons) + "C" + bits(car_buttons);
  if (extended) {
    k += "K" + std::to_string(capacity_kg) + "W" + std::to_string(current_weight_kg);
  }
  return k;
}

Simulation::Simulation(const TrafficTable& table, const BuildingConfig& config)
    : config_(config) {
  validate(config_);
  const auto floors = static_cast<std::size_t>(config_.floor_count);
  state_.clock_s = config_.start_clock_s;
  state_.current_floor = 1;
  state_.capacity_kg = config_.capacity_kg;
  state_.up_buttons.assign(floors, false);
  state_.down_buttons.assign(floors, false);
  state_.car_buttons.assign(floors, false);
  state_.hall_queues.resize(floors);
  state_.door_cycle_s = config_.door_cycle_s;
  state_.floor_travel_s = config_.floor_travel_s;

  passengers_.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const TrafficRecord& r = table[i];
    const auto where = "record " + std::to_string(i) + ": ";
    if (r.start_floor < 1 || r.start_floor > config_.floor_count ||
        r.dest_floor < 1 || r.dest_floor > config_.floor_count) {
      throw ConfigError(where + "floor outside [1, " +
                        std::to_string(config_.floor_count) + "]");
    }
    if (r.start_floor == r.dest_floor) {
      throw ConfigError(where + "start floor equals destination");
    }
    if (!(r.weight_kg > 0.0) || r.weight_kg > config_.capacity_kg) {
      throw ConfigError(where + "weight must lie in (0, capacity_kg]");
    }
    if (!(r.time_s >= 0.0) || !std::isfinite(r.time_s)) {
      throw ConfigError(where + "time must be finite and >= 0");
    }
    Passenger p;
    p.id = static_cast<int>(i);
    p.call_time_s = r.time_s;
    p.start_floor = r.start_floor;
    p.dest_floor = r.dest_floor;
    p.weight_kg = r.weight_kg;
    passengers_.push_back(p);
    time_list_.push(r.time_s, {r.start_floor, r.dest_floor, r.weight_kg, p.id});
  }
}

int Simulation::hall_count() const {
  int n = 0;
  for (const auto& queues : state_.hall_queues) {
    n += static_cast<int>(queues[0].size() + queues[1].size());
  }
  return n;
}

bool Simulation::is_terminal() const {
  return time_list_.empty() && state_.riders.empty() && hall_count() == 0;
}

ActionSet Simulation::legal_actions() const {
  ActionSet legal;
  legal.insert(Action::kIdle);
  const int f = state_.current_floor;
  // With nobody in the hall or the car there is nowhere to go.
  const bool has_work = !state_.riders.empty() || hall_count() > 0;
  if (has_work || config_.allow_idle_doors) {
    if (f < config_.floor_count) legal.insert(Action::kMoveUp);
    if (f > 1) legal.insert(Action::kMoveDown);
  }
  const bool disembark = state_.car_buttons[f - 1];
  const auto& queues = state_.hall_queues[f - 1];
  const int up = static_cast<int>(Direction::kUp);
  const int down = static_cast<int>(Direction::kDown);
  if (config_.allow_idle_doors || disembark || !queues[up].empty()) {
    legal.insert(Action::kOpenCloseUp);
  }
  if (config_.allow_idle_doors || disembark || !queues[down].empty()) {
    legal.insert(Action::kOpenCloseDown);
  }
  return legal;
}

void Simulation::refresh_buttons(int floor) {
  const auto& queues = state_.hall_queues[floor - 1];
  state_.up_buttons[floor - 1] = !queues[static_cast<int>(Direction::kUp)].empty();
  state_.down_buttons[floor - 1] =
      !queues[static_cast<int>(Direction::kDown)].empty();
}

void Simulation::refresh_load() {
  // Recomputed from scratch so the weight never drifts from the rider list.
  double weight = 0.0;
  std::fill(state_.car_buttons.begin(), state_.car_buttons.end(), false);
  for (int id : state_.riders) {
    weight += passengers_[id].weight_kg;
    state_.car_buttons[passengers_[id].dest_floor - 1] = true;
  }
  state_.current_weight_kg = weight;
}

void Simulation::drain_until(double clock_s, std::vector<int>& arrivals) {
  while (!time_list_.empty() && time_list_.peek().time_s <= clock_s) {
    const Event e = time_list_.pop();
    const Passenger& p = passengers_[e.call.passenger_id];
    state_.hall_queues[p.start_floor - 1][static_cast<int>(p.direction())]
        .push_back(p.id);
    refresh_buttons(p.start_floor);
    arrivals.push_back(p.id);
    ++drained_;
  }
}

StepOutcome Simulation::apply(Action action) {
  if (!legal_actions().contains(action)) {
    throw IllegalAction(std::string(action_name(action)) + " is not legal at floor " +
                        std::to_string(state_.current_floor));
  }
  StepOutcome out;
  const double start = state_.clock_s;
  const int f = state_.current_floor;

  switch (action) {
    case Action::kIdle:
      if (!time_list_.empty()) {
        state_.clock_s = std::max(state_.clock_s, time_list_.peek().time_s);
      } else if (!is_terminal()) {
        state_.clock_s += config_.idle_fallback_s;
      } else {
        out.terminal = true;
        return out;
      }
      break;
    case Action::kMoveUp:
      state_.current_floor = f + 1;
      state_.clock_s += config_.floor_travel_s;
      break;
    case Action::kMoveDown:
      state_.current_floor = f - 1;
      state_.clock_s += config_.floor_travel_s;
      break;
    case Action::kOpenCloseUp:
    case Action::kOpenCloseDown: {
      state_.clock_s += config_.door_cycle_s;
      const double now = state_.clock_s;
      auto& riders = state_.riders;
      auto leaving = std::stable_partition(riders.begin(), riders.end(), [&](int id) {
        return passengers_[id].dest_floor != f;
      });
      for (auto it = leaving; it != riders.end(); ++it) {
        Passenger& p = passengers_[*it];
        p.location = Location::kDelivered;
        p.delivery_time_s = now;
        ++out.delivered;
        ++delivered_;
      }
      riders.erase(leaving, riders.end());
      refresh_load();

      const Direction dir = action == Action::kOpenCloseUp ? Direction::kUp
                                                           : Direction::kDown;
      auto& queue = state_.hall_queues[f - 1][static_cast<int>(dir)];
      // Strict FIFO: the first waiter who does not fit blocks the rest.
      while (!queue.empty()) {
        Passenger& p = passengers_[queue.front()];
        if (state_.current_weight_kg + p.weight_kg > state_.capacity_kg) break;
        queue.pop_front();
        p.location = Location::kCar;
        p.board_time_s = now;
        riders.push_back(p.id);
        state_.current_weight_kg += p.weight_kg;
        ++out.boarded;
      }
      refresh_load();
      refresh_buttons(f);
      break;
    }
  }

  drain_until(state_.clock_s, out.arrivals);
  out.elapsed_s = state_.clock_s - start;
  out.terminal = is_terminal();
  return out;
}

Observation Simulation::observe(bool extended) const {
  Observation obs;
  obs.up_buttons = state_.up_buttons;
  obs.down_buttons = state_.down_buttons;
  obs.car_buttons = state_.car_buttons;
  obs.current_floor = state_.current_floor;
  obs.extended = extended;
  if (extended) {
    obs.capacity_kg = state_.capacity_kg;
    obs.current_weight_kg = state_.current_weight_kg;
  }
  return obs;
}

// ---------------------------------------------------------------------------
// Trace CSV

TraceRow make_trace_row(std::size_t step, const Simulation& sim, int action,
                        double reward, const StepOutcome& outcome, int waiting) {
  TraceRow row;
  row.step = step;
  row.clock_s = sim.state().clock_s;
  row.floor = sim.state().current_floor;
  row.action = action;
  row.reward = reward;
  row.boarded = outcome.boarded;
  row.delivered = outcome.delivered;
  row.waiting = waiting;
  row.up_buttons = sim.state().up_buttons;
  row.down_buttons = sim.state().down_buttons;
  row.car_buttons = sim.state().car_buttons;
  row.arrivals = outcome.arrivals;
  return row;
}

void write_trace_csv(std::span<const TraceRow> rows, std::ostream& out) {
  out << kTraceCsvHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.step << ',' << format_double(r.clock_s) << ',' << r.floor << ','
        << r.action << ',' << format_double(r.reward) << ',' << r.boarded << ','
        << r.delivered << ',' << r.waiting << ',' << bits(r.up_buttons) << ','
        << bits(r.down_buttons) << ',' << bits(r.car_buttons) << ',';
    for (std::size_t i = 0; i < r.arrivals.size(); ++i) {
      if (i) out << ';';
      out << r.arrivals[i];
    }
    out << '\n';
  }
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::size_t column) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("malformed number '" + std::string(text) + "'", line, column);
  }
  return value;
}

std::vector<bool> parse_bits(std::string_view text, std::size_t line,
                             std::size_t column) {
  std::vector<bool> v;
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ParseError("malformed button string '" + std::string(text) + "'", line,
                       column);
    }
    v.push_back(c == '1');
  }
  return v;
}

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::vector<TraceRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kTraceCsvHeader) {
        throw ParseError("expected trace header", line_no, 1);
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 12) {
      throw ParseError("expected 12 fields, found " + std::to_string(f.size()),
                       line_no, f.size() + 1);
    }
    TraceRow r;
    r.step = parse_number<std::size_t>(f[0], line_no, 1);
    r.clock_s = parse_number<double>(f[1], line_no, 2);
    r.floor = parse_number<int>(f[2], line_no, 3);
    r.action = parse_number<int>(f[3], line_no, 4);
    if (r.action < -1 || r.action >= kActionCount) {
      throw ParseError("action code out of range", line_no, 4);
    }
    r.reward = parse_number<double>(f[4], line_no, 5);
    r.boarded = parse_number<int>(f[5], line_no, 6);
    r.delivered = parse_number<int>(f[6], line_no, 7);
    r.waiting = parse_number<int>(f[7], line_no, 8);
    r.up_buttons = parse_bits(f[8], line_no, 9);
    r.down_buttons = parse_bits(f[9], line_no, 10);
    r.car_buttons = parse_bits(f[10], line_no, 11);
    std::string_view ids = f[11];
    while (!ids.empty()) {
      const auto semi = ids.find(';');
      r.arrivals.push_back(parse_number<int>(ids.substr(0, semi), line_no, 12));
      if (semi == std::string_view::npos) break;
      ids.remove_prefix(semi + 1);
    }
    if (r.up_buttons.size() != r.down_buttons.size() ||
        r.up_buttons.size() != r.car_buttons.size()) {
      throw ParseError("button strings differ in length", line_no, 9);
    }
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw ParseError("missing trace header", 1, 1);
  return rows;
}

namespace {

Observation observation_of(const TraceRow& r) {
  Observation obs;
  obs.up_buttons = r.up_buttons;
  obs.down_buttons = r.down_buttons;
  obs.car_buttons = r.car_buttons;
  obs.current_floor = r.floor;
  return obs;
}

}  // namespace

std::vector<TraceStep> trace_steps(std::span<const TraceRow> rows) {
  std::vector<TraceStep> steps;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].action < 0) continue;  // a new episode starts here
    TraceStep s;
    s.before = observation_of(rows[i - 1]);
    s.action = static_cast<Action>(rows[i].action);
    s.after = observation_of(rows[i]);
    s.step = rows[i].step;
    s.arrivals = rows[i].arrivals;
    steps.push_back(std::move(s));
  }
  return steps;
}

MarkovReport markov_probe(std::span<const TraceStep> trace) {
  struct Group {
    const TraceStep* first = nullptr;
    std::vector<const TraceStep*> members;
  };
  std::map<std::pair<std::string, int>, std::size_t> index;
  std::vector<Group> groups;
  for (const TraceStep& s : trace) {
    auto key = std::make_pair(s.before.key(), static_cast<int>(s.action));
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({&s, {}});
    groups[it->second].members.push_back(&s);
  }

  MarkovReport report;
  report.triples = trace.size();
  report.groups = groups.size();
  for (const Group& g : groups) {
    std::vector<Observation> successors;
    for (const TraceStep* s : g.members) {
      if (std::find(successors.begin(), successors.end(), s->after) ==
          successors.end()) {
        successors.push_back(s->after);
      }
    }
    if (successors.size() < 2) continue;
    MarkovViolation v;
    v.observation = g.first->before;
    v.action = g.first->action;
    v.successors = std::move(successors);
    for (const TraceStep* s : g.members) {
      v.steps.push_back(s->step);
      v.arrivals.insert(v.arrivals.end(), s->arrivals.begin(), s->arrivals.end());
    }
    report.violations.push_back(std::move(v));
  }
  return report;
}

}  // namespace liftsim
