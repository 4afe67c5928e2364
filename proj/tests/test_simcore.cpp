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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "liftsim/error.hpp"
#include "liftsim/naive.hpp"
#include "liftsim/simcore.hpp"
#include "test_util.hpp"

namespace liftsim {
namespace {

using A = Action;

// Checks every BuildingState invariant plus passenger conservation.
void check_invariants(const Simulation& sim) {
  const BuildingState& s = sim.state();
  const int floors = s.floor_count();
  double weight = 0.0;
  std::vector<bool> car(floors, false);
  for (int id : s.riders) {
    const Passenger& p = sim.passengers()[id];
    REQUIRE(p.location == Location::kCar);
    weight += p.weight_kg;
    car[p.dest_floor - 1] = true;
  }
  REQUIRE(std::abs(s.current_weight_kg - weight) <= 1e-9);
  REQUIRE(s.current_weight_kg <= s.capacity_kg + 1e-9);
  REQUIRE(s.car_buttons == car);
  for (int f = 1; f <= floors; ++f) {
    REQUIRE(s.up_buttons[f - 1] == !s.hall_queues[f - 1][0].empty());
    REQUIRE(s.down_buttons[f - 1] == !s.hall_queues[f - 1][1].empty());
    for (int d = 0; d < 2; ++d) {
      for (int id : s.hall_queues[f - 1][d]) {
        const Passenger& p = sim.passengers()[id];
        REQUIRE(p.location == Location::kHall);
        REQUIRE(p.start_floor == f);
        REQUIRE(static_cast<int>(p.direction()) == d);
        REQUIRE(p.call_time_s <= s.clock_s);
      }
    }
  }
  REQUIRE_FALSE(s.up_buttons[floors - 1]);
  REQUIRE_FALSE(s.down_buttons[0]);
  REQUIRE(s.current_floor >= 1);
  REQUIRE(s.current_floor <= floors);
  REQUIRE(sim.hall_count() + sim.rider_count() + sim.delivered_count() ==
          sim.drained_count());
  for (const Passenger& p : sim.passengers()) {
    if (p.board_time_s) REQUIRE(p.call_time_s <= *p.board_time_s);
    if (p.delivery_time_s) {
      REQUIRE(p.board_time_s.has_value());
      REQUIRE(*p.board_time_s <= *p.delivery_time_s);
      REQUIRE(p.location == Location::kDelivered);
    }
  }
}

TEST_CASE("time list pops by time then insertion order") {
  TimeList tl;
  tl.push(5.0, {1, 2, 70, 0});
  tl.push(3.0, {1, 2, 70, 1});
  tl.push(5.0, {1, 2, 70, 2});
  tl.push(3.0, {1, 2, 70, 3});
  std::vector<int> order;
  while (!tl.empty()) order.push_back(tl.pop().call.passenger_id);
  CHECK(order == std::vector<int>{1, 3, 0, 2});
}

TEST_CASE("action codes and names are stable") {
  CHECK(static_cast<int>(A::kIdle) == 0);
  CHECK(static_cast<int>(A::kOpenCloseUp) == 1);
  CHECK(static_cast<int>(A::kOpenCloseDown) == 2);
  CHECK(static_cast<int>(A::kMoveUp) == 3);
  CHECK(static_cast<int>(A::kMoveDown) == 4);
  CHECK(std::string(action_name(A::kMoveDown)) == "MoveDown");
  ActionSet s;
  s.insert(A::kIdle);
  s.insert(A::kMoveDown);
  CHECK(s.mask() == 0b10001u);
  CHECK(s.size() == 2);
  CHECK(s.to_vector() == std::vector<A>{A::kIdle, A::kMoveDown});
}

TEST_CASE("legal actions with nothing to do are just Idle") {
  Simulation sim({{30000, 4, 1, 70}}, BuildingConfig{});
  CHECK(sim.legal_actions() == ActionSet(1u));
  sim.apply(A::kIdle);
  CHECK(sim.legal_actions().contains(A::kMoveUp));
}

TEST_CASE("init: empty table is immediately terminal") {
  Simulation sim({}, BuildingConfig{});
  CHECK(sim.state().clock_s == 27000.0);
  CHECK(sim.state().current_floor == 1);
  CHECK(sim.time_list().empty());
  CHECK(sim.is_terminal());
  CHECK(sim.legal_actions() == ActionSet(1u));
  const auto before = sim.state().clock_s;
  const StepOutcome out = sim.apply(A::kIdle);
  CHECK(out.terminal);
  CHECK(out.elapsed_s == 0.0);
  CHECK(sim.state().clock_s == before);
}

TEST_CASE("init: sample rows are queued in time order") {
  const TrafficTable t = {{27000, 1, 2, 77.9}, {27042.9, 1, 7, 78.3}, {60754.1, 8, 1, 101.6}};
  Simulation sim(t, BuildingConfig{});
  CHECK(sim.time_list().size() == 3);
  CHECK(sim.state().current_floor == 1);
  CHECK(sim.state().clock_s == 27000.0);
  CHECK_FALSE(sim.is_terminal());
  TimeList copy = sim.time_list();
  CHECK(copy.pop().time_s == 27000.0);
  CHECK(copy.pop().time_s == 27042.9);
  CHECK(copy.pop().time_s == 60754.1);
}

TEST_CASE("init rejects bad records and configs") {
  CHECK_THROWS_AS(Simulation({{27000, 1, 9, 70}}, BuildingConfig{}), ConfigError);
  CHECK_THROWS_AS(Simulation({{27000, 0, 2, 70}}, BuildingConfig{}), ConfigError);
  CHECK_THROWS_AS(Simulation({{27000, 2, 2, 70}}, BuildingConfig{}), ConfigError);
  CHECK_THROWS_AS(Simulation({{27000, 1, 2, 1001}}, BuildingConfig{}), ConfigError);
  CHECK_THROWS_AS(Simulation({{-1, 1, 2, 70}}, BuildingConfig{}), ConfigError);
  BuildingConfig bad;
  bad.floor_count = 1;
  CHECK_THROWS_AS(Simulation({}, bad), ConfigError);
}

TEST_CASE("moves take five seconds per floor") {
  Simulation sim({{27000, 8, 1, 70}}, BuildingConfig{});
  sim.apply(A::kIdle);  // zero-length step that drains the call
  for (int i = 0; i < 3; ++i) sim.apply(A::kMoveUp);
  CHECK(sim.state().current_floor == 4);
  CHECK(sim.state().clock_s == 27015.0);
  CHECK(sim.state().floor_travel_s == 5.0);
  const StepOutcome out = sim.apply(A::kMoveDown);
  CHECK(out.elapsed_s == 5.0);
  CHECK(sim.state().current_floor == 3);
}

TEST_CASE("door cycle boards a waiting passenger") {
  Simulation sim({{27000, 1, 5, 80}}, BuildingConfig{});
  sim.apply(A::kIdle);  // drains the call at 27000
  CHECK(sim.state().up_buttons[0]);
  CHECK(sim.legal_actions().contains(A::kOpenCloseUp));
  CHECK_FALSE(sim.legal_actions().contains(A::kOpenCloseDown));
  const StepOutcome out = sim.apply(A::kOpenCloseUp);
  CHECK(out.elapsed_s == 15.0);
  CHECK(out.boarded == 1);
  CHECK(sim.rider_count() == 1);
  CHECK(sim.state().current_weight_kg == 80.0);
  CHECK(sim.state().car_buttons[4]);
  CHECK_FALSE(sim.state().up_buttons[0]);
  for (int i = 0; i < 4; ++i) sim.apply(A::kMoveUp);
  const StepOutcome off = sim.apply(A::kOpenCloseDown);
  CHECK(off.delivered == 1);
  CHECK(sim.is_terminal());
  CHECK(off.terminal);
  const Passenger& p = sim.passengers()[0];
  CHECK(*p.board_time_s == 27015.0);
  CHECK(*p.delivery_time_s == 27015.0 + 20.0 + 15.0);
}

TEST_CASE("legal actions at the boundaries") {
  Simulation sim({{27000, 2, 1, 70}}, BuildingConfig{});
  CHECK(sim.legal_actions() == ActionSet(1u));
  sim.apply(A::kIdle);
  CHECK(sim.legal_actions() == ActionSet((1u << 0) | (1u << 3)));
  for (int i = 0; i < 7; ++i) sim.apply(A::kMoveUp);
  CHECK_FALSE(sim.legal_actions().contains(A::kMoveUp));
  CHECK(sim.legal_actions().contains(A::kMoveDown));
  CHECK_THROWS_AS(sim.apply(A::kMoveUp), IllegalAction);
  CHECK_THROWS_AS(sim.apply(A::kOpenCloseUp), IllegalAction);
}

TEST_CASE("allow_idle_doors re-admits empty door cycles") {
  BuildingConfig cfg;
  cfg.allow_idle_doors = true;
  Simulation sim({{99999, 2, 1, 70}}, cfg);
  CHECK(sim.legal_actions() == ActionSet((1u << 0) | (1u << 1) | (1u << 2) | (1u << 3)));
  const auto out = sim.apply(A::kOpenCloseDown);
  CHECK(out.elapsed_s == 15.0);
  CHECK(out.boarded == 0);
}

TEST_CASE("idle fast-forwards to the next call") {
  Simulation sim({{28000, 3, 1, 70}, {28000, 4, 1, 70}, {29000, 2, 1, 70}},
                 BuildingConfig{});
  const auto out = sim.apply(A::kIdle);
  CHECK(out.elapsed_s == 1000.0);
  CHECK(out.arrivals == std::vector<int>{0, 1});
  CHECK(sim.state().down_buttons[2]);
  CHECK(sim.state().down_buttons[3]);
  CHECK_FALSE(sim.state().down_buttons[1]);
}

TEST_CASE("idle with no future calls but riders aboard is not terminal") {
  Simulation sim({{27000, 1, 3, 70}}, BuildingConfig{});
  sim.apply(A::kIdle);
  sim.apply(A::kOpenCloseUp);
  CHECK(sim.time_list().empty());
  CHECK_FALSE(sim.is_terminal());
  const auto out = sim.apply(A::kIdle);
  CHECK_FALSE(out.terminal);
  CHECK(out.elapsed_s == BuildingConfig{}.idle_fallback_s);
}

TEST_CASE("boarding is directional, FIFO and capacity bound") {
  BuildingConfig cfg;
  cfg.capacity_kg = 200;
  // Floor 3: up callers 0 (90 kg), 2 (120 kg), 3 (60 kg); down caller 1.
  const TrafficTable t = {{27000, 3, 8, 90}, {27001, 3, 1, 70}, {27002, 3, 6, 120},
                          {27003, 3, 5, 60}};
  Simulation sim(t, cfg);
  sim.apply(A::kIdle);
  sim.apply(A::kMoveUp);
  sim.apply(A::kMoveUp);
  CHECK(sim.state().clock_s == 27010.0);
  const auto out = sim.apply(A::kOpenCloseUp);
  // 90 fits, 120 would exceed 200 and blocks the 60 kg caller behind it.
  CHECK(out.boarded == 1);
  CHECK(sim.state().riders == std::vector<int>{0});
  CHECK(sim.state().up_buttons[2]);    // re-lit: two still waiting
  CHECK(sim.state().down_buttons[2]);  // the down caller never boards on Up
  const auto& queue = sim.state().hall_queues[2][0];
  CHECK(std::vector<int>(queue.begin(), queue.end()) == std::vector<int>{2, 3});
  check_invariants(sim);
}

TEST_CASE("riders alight on either door direction") {
  Simulation sim({{27000, 1, 2, 70}}, BuildingConfig{});
  sim.apply(A::kIdle);
  sim.apply(A::kOpenCloseUp);
  sim.apply(A::kMoveUp);
  CHECK(sim.legal_actions().contains(A::kOpenCloseUp));
  CHECK(sim.legal_actions().contains(A::kOpenCloseDown));
  CHECK(sim.apply(A::kOpenCloseDown).delivered == 1);
}

TEST_CASE("arrivals during a door cycle are drained before returning") {
  Simulation sim({{27000, 1, 2, 70}, {27010, 1, 3, 70}}, BuildingConfig{});
  sim.apply(A::kIdle);
  const auto out = sim.apply(A::kOpenCloseUp);
  CHECK(out.boarded == 1);
  CHECK(out.arrivals == std::vector<int>{1});
  CHECK(sim.state().up_buttons[0]);
}

TEST_CASE("observation carries buttons, floor and optional load") {
  Simulation sim({{27000, 1, 4, 70}}, BuildingConfig{});
  sim.apply(A::kIdle);
  const Observation basic = sim.observe();
  CHECK_FALSE(basic.extended);
  CHECK(basic.capacity_kg == 0.0);
  CHECK(basic.any_hall_call());
  CHECK(basic.key() == "F1U10000000D00000000C00000000");
  sim.apply(A::kOpenCloseUp);
  const Observation ext = sim.observe(true);
  CHECK(ext.capacity_kg == 1000.0);
  CHECK(ext.current_weight_kg == 70.0);
  CHECK_FALSE(ext.any_hall_call());
}

// Random legal walks over random buildings: every invariant after every step.
TEST_CASE("property: invariants hold along random legal walks") {
  Rng gen(20260101);
  for (int trial = 0; trial < 60; ++trial) {
    BuildingConfig cfg;
    cfg.floor_count = 2 + static_cast<int>(gen.uniform_index(10));
    cfg.capacity_kg = 150.0 + 400.0 * gen.uniform01();
    cfg.allow_idle_doors = gen.uniform_index(4) == 0;
    const TrafficTable tape = testing::random_tape(
        gen, 1 + static_cast<int>(gen.uniform_index(40)), cfg.floor_count);
    Simulation sim(tape, cfg);
    check_invariants(sim);
    for (int step = 0; step < 400 && !sim.is_terminal(); ++step) {
      const auto legal = sim.legal_actions().to_vector();
      const A a = legal[gen.uniform_index(legal.size())];
      const double before = sim.state().clock_s;
      const int delivered_before = sim.delivered_count();
      const StepOutcome out = sim.apply(a);
      REQUIRE(sim.state().clock_s >= before);
      REQUIRE(out.elapsed_s == sim.state().clock_s - before);
      REQUIRE(out.delivered == sim.delivered_count() - delivered_before);
      if (a == A::kMoveUp || a == A::kMoveDown) REQUIRE(out.elapsed_s == cfg.floor_travel_s);
      if (a == A::kOpenCloseUp || a == A::kOpenCloseDown) {
        REQUIRE(out.elapsed_s == cfg.door_cycle_s);
      }
      REQUIRE(out.terminal == sim.is_terminal());
      check_invariants(sim);
    }
  }
}

TEST_CASE("property: identical action sequences give identical trajectories") {
  Rng gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const TrafficTable tape = testing::random_tape(gen, 30, 8);
    Simulation a(tape, BuildingConfig{});
    Simulation b(tape, BuildingConfig{});
    for (int step = 0; step < 300 && !a.is_terminal(); ++step) {
      const auto legal = a.legal_actions().to_vector();
      const A act = legal[gen.uniform_index(legal.size())];
      REQUIRE(a.legal_actions() == b.legal_actions());
      const auto oa = a.apply(act);
      const auto ob = b.apply(act);
      REQUIRE(oa.elapsed_s == ob.elapsed_s);
      REQUIRE(oa.arrivals == ob.arrivals);
      REQUIRE(a.state().clock_s == b.state().clock_s);
      REQUIRE(a.observe(true) == b.observe(true));
      REQUIRE(a.state().riders == b.state().riders);
    }
  }
}

TEST_CASE("trace csv round trips") {
  Simulation sim({{27000, 1, 4, 70}, {27100, 6, 2, 80}}, BuildingConfig{});
  std::vector<TraceRow> rows;
  rows.push_back(make_trace_row(0, sim, -1, 0.0, {}, 0));
  NaiveController naive(1);
  for (std::size_t k = 1; !sim.is_terminal(); ++k) {
    const A a = naive.decide(sim.observe());
    const auto out = sim.apply(a);
    rows.push_back(make_trace_row(k, sim, static_cast<int>(a), -0.5 * k, out, 1));
  }
  std::ostringstream out;
  write_trace_csv(rows, out);
  CHECK(out.str().rfind(std::string(kTraceCsvHeader) + "\n0,27000,1,-1,0,0,0,0,", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_trace_csv(in);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].clock_s == rows[i].clock_s);
    CHECK(back[i].reward == rows[i].reward);
    CHECK(back[i].action == rows[i].action);
    CHECK(back[i].up_buttons == rows[i].up_buttons);
    CHECK(back[i].car_buttons == rows[i].car_buttons);
    CHECK(back[i].arrivals == rows[i].arrivals);
  }
  std::istringstream bad(std::string(kTraceCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_trace_csv(bad), ParseError);
}

// Runs the naive controller and returns its trace triples.
std::vector<TraceStep> naive_trace(const TrafficTable& tape) {
  Simulation sim(tape, BuildingConfig{});
  std::vector<TraceRow> rows{make_trace_row(0, sim, -1, 0.0, {}, 0)};
  NaiveController naive(3);
  for (std::size_t k = 1; !sim.is_terminal() && k < 10000; ++k) {
    const A a = naive.decide(sim.observe());
    rows.push_back(make_trace_row(k, sim, static_cast<int>(a), 0.0, sim.apply(a), 0));
  }
  return trace_steps(rows);
}

TEST_CASE("markov probe: two idles from the same observation diverge") {
  // Both idles start at floor 1 with no buttons lit. The first call arrives
  // at floor 2 during the first idle, the second at floor 3 during the
  // second, so the same (observation, Idle) pair has two successors.
  const auto steps = naive_trace({{27100, 2, 1, 70}, {27500, 3, 1, 70}});
  const MarkovReport report = markov_probe(steps);
  REQUIRE(report.violations.size() >= 1);
  const MarkovViolation& v = report.violations.front();
  CHECK(v.action == A::kIdle);
  CHECK(v.observation.current_floor == 1);
  CHECK_FALSE(v.observation.any_hall_call());
  CHECK(v.successors.size() == 2);
  CHECK(v.arrivals == std::vector<int>{0, 1});
}

TEST_CASE("markov probe: no repeats or no mid-step arrivals give an empty report") {
  CHECK(markov_probe(std::vector<TraceStep>{}).violations.empty());
  // One passenger: every (observation, action) pair appears once.
  const auto single = naive_trace({{27000, 1, 5, 70}});
  CHECK(markov_probe(single).violations.empty());
  // Up trip then a return trip, each step deterministic given the state.
  const auto two = naive_trace({{27000, 1, 3, 70}, {27000, 1, 3, 80}});
  CHECK(markov_probe(two).violations.empty());
}

}  // namespace
}  // namespace liftsim
