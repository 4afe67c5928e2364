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

#include "liftsim/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "liftsim/error.hpp"

namespace liftsim {
namespace {

// Largest double strictly below midnight; keeps every time in [0, 86400).
const double kLastInstant = std::nextafter(kSecondsPerDay, 0.0);

double sample_peak(const TrafficProfile& p, double mean, double low, double high,
                   Rng& rng) {
  if (p.distribution == PeakDistribution::kTruncatedPoisson) {
    return sample_truncated_poisson(mean, p.peak_std_s, low, high, rng);
  }
  return sample_truncated_normal(mean, p.peak_std_s, low, high, rng);
}

double sample_weight(const WeightModel& w, Rng& rng) {
  const bool group_a = rng.uniform01() < w.mix_a;
  const double mean = group_a ? w.mean_a_kg : w.mean_b_kg;
  const double std = group_a ? w.std_a_kg : w.std_b_kg;
  return sample_truncated_normal(mean, std, w.low_kg, w.high_kg, rng);
}

void check_interval(double std, double low, double high) {
  if (!(std > 0.0) || !std::isfinite(std)) {
    throw InvalidArgument("truncated sampler: std must be positive and finite");
  }
  if (!(low < high)) {
    throw InvalidArgument("truncated sampler: low must be below high");
  }
}

}  // namespace

void validate(const TrafficProfile& p) {
  if (p.floor_count < 2) {
    throw ConfigError("floor_count must be >= 2 (got " +
                      std::to_string(p.floor_count) + ")");
  }
  if (p.workers < 0) throw ConfigError("workers must be >= 0");
  if (!(p.peak_std_s > 0.0)) throw ConfigError("peak_std_s must be > 0");
  if (p.lunch && !(p.lunch_duration_s > 0.0)) {
    throw ConfigError("lunch_duration_s must be > 0");
  }
  for (double t : {p.arrival_mean_s, p.departure_mean_s, p.lunch_mean_s}) {
    if (!(t >= 0.0 && t < kSecondsPerDay)) {
      throw ConfigError("peak means must lie in [0, 86400)");
    }
  }
  const WeightModel& w = p.weight;
  if (!(w.std_a_kg > 0.0 && w.std_b_kg > 0.0)) {
    throw ConfigError("weight standard deviations must be > 0");
  }
  if (!(w.low_kg > 0.0 && w.low_kg < w.high_kg)) {
    throw ConfigError("weight bounds must satisfy 0 < low < high");
  }
  if (!(w.mix_a >= 0.0 && w.mix_a <= 1.0)) {
    throw ConfigError("weight mixture share must lie in [0, 1]");
  }
}

double sample_truncated_normal(double mean, double std, double low, double high,
                               Rng& rng, int max_tries) {
  check_interval(std, low, high);
  for (int i = 0; i < max_tries; ++i) {
    const double x = mean + std * rng.normal();
    if (x >= low && x <= high) return x;
  }
  throw NumericError("truncated normal: no sample in [" + format_double(low) +
                     ", " + format_double(high) + "] after " +
                     std::to_string(max_tries) + " draws");
}

double sample_truncated_poisson(double mean, double std, double low, double high,
                                Rng& rng, int max_tries) {
  check_interval(std, low, high);
  if (!(mean > 0.0)) throw InvalidArgument("truncated poisson: mean must be > 0");
  const double unit = std * std / mean;
  const double rate = mean / unit;
  for (int i = 0; i < max_tries; ++i) {
    const double x = unit * static_cast<double>(rng.poisson(rate));
    if (x >= low && x <= high) return x;
  }
  throw NumericError("truncated poisson: no sample in [" + format_double(low) +
                     ", " + format_double(high) + "] after " +
                     std::to_string(max_tries) + " draws");
}

std::vector<PersonSpec> generate_people(const TrafficProfile& p) {
  validate(p);
  Rng rng(p.seed);
  std::vector<PersonSpec> people;
  people.reserve(static_cast<std::size_t>(p.workers));
  const double latest_lunch = kLastInstant - p.lunch_duration_s;
  for (int i = 0; i < p.workers; ++i) {
    PersonSpec person;
    person.id = i;
    person.work_floor =
        2 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(p.floor_count - 1)));
    person.weight_kg = sample_weight(p.weight, rng);

    // Redraw the whole schedule until it is ordered; this conditions the
    // independent peaks on arrival < lunch < return < departure.
    bool ordered = false;
    for (int attempt = 0; attempt < 10000 && !ordered; ++attempt) {
      person.arrival_s = sample_peak(p, p.arrival_mean_s, 0.0, kLastInstant, rng);
      if (p.lunch) {
        const double down = sample_peak(p, p.lunch_mean_s, 0.0, latest_lunch, rng);
        person.lunch = std::make_pair(down, down + p.lunch_duration_s);
      }
      person.departure_s =
          sample_peak(p, p.departure_mean_s, 0.0, kLastInstant, rng);
      if (person.lunch) {
        ordered = person.arrival_s < person.lunch->first &&
                  person.lunch->second < person.departure_s;
      } else {
        ordered = person.arrival_s < person.departure_s;
      }
    }
    if (!ordered) {
      throw NumericError("could not draw an ordered schedule for worker " +
                         std::to_string(i));
    }
    people.push_back(person);
  }
  return people;
}

TrafficTable records_for(const std::vector<PersonSpec>& people) {
  TrafficTable table;
  table.reserve(people.size() * 4);
  for (const PersonSpec& person : people) {
    const int f = person.work_floor;
    table.push_back({person.arrival_s, 1, f, person.weight_kg});
    if (person.lunch) {
      table.push_back({person.lunch->first, f, 1, person.weight_kg});
      table.push_back({person.lunch->second, 1, f, person.weight_kg});
    }
    table.push_back({person.departure_s, f, 1, person.weight_kg});
  }
  std::stable_sort(table.begin(), table.end(),
                   [](const TrafficRecord& a, const TrafficRecord& b) {
                     return a.time_s < b.time_s;
                   });
  return table;
}

TrafficTable generate_day(const TrafficProfile& profile) {
  return records_for(generate_people(profile));
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void write_csv(const TrafficTable& table, std::ostream& out) {
  out << kTrafficCsvHeader << '\n';
  for (const TrafficRecord& r : table) {
    out << format_double(r.time_s) << ',' << r.start_floor << ',' << r.dest_floor
        << ',' << format_double(r.weight_kg) << '\n';
  }
}

std::string to_csv(const TrafficTable& table) {
  std::ostringstream out;
  write_csv(table, out);
  return out.str();
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_real(std::string_view text, std::size_t line, std::size_t column,
                  const char* name) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw ParseError("malformed " + std::string(name) + " '" + std::string(text) + "'",
                     line, column);
  }
  return value;
}

int parse_floor(std::string_view text, std::size_t line, std::size_t column,
                int floor_count) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("malformed floor '" + std::string(text) + "'", line, column);
  }
  if (value < 1 || (floor_count > 0 && value > floor_count)) {
    throw ParseError("floor " + std::to_string(value) + " out of range", line,
                     column);
  }
  return value;
}

}  // namespace

TrafficTable read_csv(std::istream& in, int floor_count) {
  TrafficTable table;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      if (line != kTrafficCsvHeader) {
        throw ParseError("expected header '" + std::string(kTrafficCsvHeader) + "'",
                         line_no, 1);
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, found " + std::to_string(fields.size()),
                       line_no, std::min<std::size_t>(fields.size(), 4) + 1);
    }
    TrafficRecord r;
    r.time_s = parse_real(fields[0], line_no, 1, "time");
    if (r.time_s < 0.0) throw ParseError("negative time", line_no, 1);
    r.start_floor = parse_floor(fields[1], line_no, 2, floor_count);
    r.dest_floor = parse_floor(fields[2], line_no, 3, floor_count);
    if (r.start_floor == r.dest_floor) {
      throw ParseError("start_floor equals destination_floor", line_no, 3);
    }
    r.weight_kg = parse_real(fields[3], line_no, 4, "weight");
    if (!(r.weight_kg > 0.0)) throw ParseError("weight must be > 0", line_no, 4);
    table.push_back(r);
  }
  if (!saw_header) throw ParseError("missing header", 1, 1);
  return table;
}

TrafficTable read_csv_file(const std::string& path, int floor_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open traffic file '" + path + "'");
  try {
    return read_csv(in, floor_count);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), e.column(), path);
  }
}

}  // namespace liftsim
