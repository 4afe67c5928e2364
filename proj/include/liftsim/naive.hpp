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

#ifndef LIFTSIM_NAIVE_HPP_
#define LIFTSIM_NAIVE_HPP_

#include "liftsim/rng.hpp"
#include "liftsim/simcore.hpp"

namespace liftsim {

// Two-phase baseline. While seeking, the car heads for the closest floor with
// a lit hall button; once it opens there it commits to a direction and keeps
// going until it is empty.
struct NaivePhase {
  enum class Mode { kSeeking, kCommitted };

  Mode mode = Mode::kSeeking;
  Direction direction = Direction::kUp;
  // Floor where the doors last cycled under this commitment, 0 if none. A
  // hall call still lit there means the remaining waiters did not fit, so the
  // car moves on instead of reopening.
  int served_floor = 0;

  static NaivePhase seeking() { return {}; }
  static NaivePhase committed(Direction d, int served_floor = 0) {
    return {Mode::kCommitted, d, served_floor};
  }

  bool operator==(const NaivePhase&) const = default;
};

struct NaiveDecision {
  Action action = Action::kIdle;
  NaivePhase phase;
};

// Total over valid basic observations. `rng` is only consumed when both hall
// buttons are lit at the floor where a commitment starts.
NaiveDecision naive_decide(const Observation& obs, const NaivePhase& phase,
                           Rng& rng);

class NaiveController {
 public:
  explicit NaiveController(std::uint64_t seed) : rng_(seed) {}

  Action decide(const Observation& obs) {
    NaiveDecision d = naive_decide(obs, phase_, rng_);
    phase_ = d.phase;
    return d.action;
  }

  const NaivePhase& phase() const { return phase_; }

 private:
  NaivePhase phase_;
  Rng rng_;
};

}  // namespace liftsim

#endif  // LIFTSIM_NAIVE_HPP_
