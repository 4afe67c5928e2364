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

#ifndef LIFTSIM_METRICS_HPP_
#define LIFTSIM_METRICS_HPP_

#include <span>
#include <stdexcept>

#include "liftsim/simcore.hpp"

namespace liftsim {

// Episode summary. Times are per-passenger delivery minus call time, over
// delivered passengers only.
struct MetricsReport {
  int num_events = 0;
  int people_moved = 0;
  double mean_total_time_s = 0.0;
  double median_total_time_s = 0.0;
  double max_total_time_s = 0.0;
  double sum_total_time_s = 0.0;
  bool truncated = false;

  bool operator==(const MetricsReport&) const = default;
};

// `truncated` is set when any passenger is undelivered.
MetricsReport compute_metrics(std::span<const Passenger> ledger);

// Target for an n-car building: the single-car baseline split evenly.
inline double baseline_threshold(double baseline_sum_s, int n_elevators) {
  if (n_elevators < 1) {
    throw std::invalid_argument("baseline_threshold: n_elevators must be >= 1");
  }
  return baseline_sum_s / n_elevators;
}

}  // namespace liftsim

#endif  // LIFTSIM_METRICS_HPP_
