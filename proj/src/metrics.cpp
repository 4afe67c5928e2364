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

#include "liftsim/metrics.hpp"

#include <algorithm>
#include <vector>

namespace liftsim {

MetricsReport compute_metrics(std::span<const Passenger> ledger) {
  MetricsReport report;
  report.num_events = static_cast<int>(ledger.size());
  std::vector<double> totals;
  totals.reserve(ledger.size());
  for (const Passenger& p : ledger) {
    if (p.location == Location::kDelivered && p.delivery_time_s) {
      totals.push_back(*p.delivery_time_s - p.call_time_s);
    }
  }
  report.people_moved = static_cast<int>(totals.size());
  report.truncated = report.people_moved < report.num_events;
  if (totals.empty()) return report;

  // Sorted first so every aggregate is independent of ledger order.
  std::sort(totals.begin(), totals.end());
  double sum = 0.0;
  for (double t : totals) sum += t;
  const std::size_t n = totals.size();
  report.sum_total_time_s = sum;
  report.mean_total_time_s = sum / static_cast<double>(n);
  report.median_total_time_s =
      n % 2 == 1 ? totals[n / 2] : 0.5 * (totals[n / 2 - 1] + totals[n / 2]);
  report.max_total_time_s = totals.back();
  return report;
}

}  // namespace liftsim
