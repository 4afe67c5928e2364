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

#include "liftsim/naive.hpp"

#include <algorithm>

namespace liftsim {
namespace {

bool lit(const std::vector<bool>& buttons, int floor) { return buttons[floor - 1]; }

bool any_lit(const std::vector<bool>& buttons) {
  return std::find(buttons.begin(), buttons.end(), true) != buttons.end();
}

// Closest floor with a lit hall button; the lower floor wins ties.
int closest_call(const Observation& obs) {
  const int floors = obs.floor_count();
  const int f = obs.current_floor;
  auto called = [&](int g) {
    return g >= 1 && g <= floors && (lit(obs.up_buttons, g) || lit(obs.down_buttons, g));
  };
  for (int dist = 0; dist < floors; ++dist) {
    if (called(f - dist)) return f - dist;
    if (called(f + dist)) return f + dist;
  }
  return 0;
}

NaiveDecision seek(const Observation& obs, Rng& rng) {
  const int target = closest_call(obs);
  if (target == 0) return {Action::kIdle, NaivePhase::seeking()};
  const int f = obs.current_floor;
  if (target != f) {
    return {target > f ? Action::kMoveUp : Action::kMoveDown, NaivePhase::seeking()};
  }
  const bool up = lit(obs.up_buttons, f);
  const bool down = lit(obs.down_buttons, f);
  Direction d = up ? Direction::kUp : Direction::kDown;
  if (up && down) d = rng.uniform01() < 0.5 ? Direction::kUp : Direction::kDown;
  return {open_close(d), NaivePhase::committed(d, f)};
}

}  // namespace

NaiveDecision naive_decide(const Observation& obs, const NaivePhase& phase, Rng& rng) {
  if (phase.mode == NaivePhase::Mode::kCommitted) {
    const Direction d = phase.direction;
    const int f = obs.current_floor;
    const bool disembark = lit(obs.car_buttons, f);
    const bool call_here =
        lit(d == Direction::kUp ? obs.up_buttons : obs.down_buttons, f);
    if (disembark || (call_here && phase.served_floor != f)) {
      return {open_close(d), NaivePhase::committed(d, f)};
    }
    if (any_lit(obs.car_buttons)) return {move(d), phase};
  }
  return seek(obs, rng);
}

}  // namespace liftsim
