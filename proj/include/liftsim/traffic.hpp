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

#ifndef LIFTSIM_TRAFFIC_HPP_
#define LIFTSIM_TRAFFIC_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftsim/rng.hpp"

namespace liftsim {

inline constexpr double kSecondsPerDay = 86400.0;

// One hall call: someone appears at `start_floor` at `time_s` wanting to go to
// `dest_floor`. Floors are 1-based; floor 1 is the lobby.
struct TrafficRecord {
  double time_s = 0.0;
  int start_floor = 1;
  int dest_floor = 2;
  double weight_kg = 0.0;

  bool operator==(const TrafficRecord&) const = default;
};

using TrafficTable = std::vector<TrafficRecord>;

struct PersonSpec {
  int id = 0;
  double weight_kg = 0.0;
  double arrival_s = 0.0;
  double departure_s = 0.0;
  int work_floor = 2;
  // (down_s, return_s)
  std::optional<std::pair<double, double>> lunch;
};

enum class PeakDistribution {
  kTruncatedNormal,
  // Scaled Poisson count matched to the same mean and standard deviation.
  kTruncatedPoisson,
};

struct WeightModel {
  double mean_a_kg = 70.0;
  double std_a_kg = 10.0;
  double mean_b_kg = 85.0;
  double std_b_kg = 12.0;
  double mix_a = 0.5;
  double low_kg = 40.0;
  double high_kg = 150.0;
};

struct TrafficProfile {
  int floor_count = 8;
  int workers = 200;
  double arrival_mean_s = 32400.0;
  double departure_mean_s = 61200.0;
  double peak_std_s = 1800.0;
  double lunch_mean_s = 43200.0;
  double lunch_duration_s = 1800.0;
  bool lunch = true;
  PeakDistribution distribution = PeakDistribution::kTruncatedNormal;
  WeightModel weight;
  std::uint64_t seed = 0;
};

// Throws ConfigError when the profile cannot produce a valid day.
void validate(const TrafficProfile& profile);

// Rejection sampler for normal(mean, std) conditioned on [low, high]. Throws
// NumericError when `max_tries` draws all fall outside the interval.
double sample_truncated_normal(double mean, double std, double low, double high,
                               Rng& rng, int max_tries = 1'000'000);

// Poisson analogue: unit * Poisson(mean / unit) with unit = std^2 / mean, so
// the first two moments match the normal variant. Conditioned on [low, high].
double sample_truncated_poisson(double mean, double std, double low, double high,
                                Rng& rng, int max_tries = 1'000'000);

std::vector<PersonSpec> generate_people(const TrafficProfile& profile);

// Four records per worker (morning up trip, lunch down and back, evening down
// trip), sorted by time with ties kept in generation order.
TrafficTable generate_day(const TrafficProfile& profile);

// Flattens people into records; exposed so tests can inspect the mapping.
TrafficTable records_for(const std::vector<PersonSpec>& people);

inline constexpr const char* kTrafficCsvHeader =
    "time,start_floor,destination_floor,weight";

void write_csv(const TrafficTable& table, std::ostream& out);
std::string to_csv(const TrafficTable& table);

// `floor_count` bounds the accepted floor numbers; 0 accepts any floor >= 1.
TrafficTable read_csv(std::istream& in, int floor_count = 0);
TrafficTable read_csv_file(const std::string& path, int floor_count = 0);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace liftsim

#endif  // LIFTSIM_TRAFFIC_HPP_
