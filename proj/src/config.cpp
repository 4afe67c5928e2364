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
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "liftsim/error.hpp"
#include "liftsim/harness.hpp"

namespace liftsim {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return s;
}

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      // run plumbing
      "command", "seed", "out", "out_dir", "tape", "checkpoint", "trace", "log",
      // traffic profile
      "workers", "arrival_mean_s", "departure_mean_s", "peak_std_s", "lunch_mean_s",
      "lunch_duration_s", "lunch", "distribution", "weight_mean_a_kg",
      "weight_std_a_kg", "weight_mean_b_kg", "weight_std_b_kg", "weight_mix_a",
      "weight_low_kg", "weight_high_kg",
      // building
      "floor_count", "capacity_kg", "door_cycle_s", "floor_travel_s", "start_clock_s",
      "allow_idle_doors", "idle_fallback_s",
      // dqn
      "epsilon", "discount", "learning_rate", "momentum", "minibatch",
      "replay_capacity", "target_sync", "epochs", "step_cap_factor", "reward_scale",
      "grad_clip", "td_mode", "waiting_mode", "update_loop", "resample", "hidden",
      "freeze",
      // behaviour cloning
      "clone_epochs", "clone_learning_rate", "holdout_fraction"};
  return keys;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Keys that only say where artifacts go; they do not change artifact bytes.
bool is_location_key(const std::string& key) { return key == "out" || key == "out_dir"; }

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw ConfigError(key + ": expected " + expected + ", got '" + value + "'");
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  values_[key] = value;
}

void Config::parse(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    std::string value = trim(std::string_view(text).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    try {
      set(trim(std::string_view(text).substr(0, eq)), value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  parse(in, path);
}

std::optional<std::string> Config::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  int out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (v->empty() || ec != std::errc() || ptr != v->data() + v->size()) {
    bad_value(key, *v, "an integer");
  }
  return out;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (v->empty() || ec != std::errc() || ptr != v->data() + v->size()) {
    bad_value(key, *v, "a number");
  }
  return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (v->empty() || ec != std::errc() || ptr != v->data() + v->size()) {
    bad_value(key, *v, "an unsigned integer");
  }
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  bad_value(key, *v, "a boolean");
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

std::string Config::hash() const {
  std::string text;
  for (const auto& [key, value] : values_) {
    if (!is_location_key(key)) text += key + " = " + value + "\n";
  }
  return hex64(fnv1a64(text));
}

std::uint64_t resolve_seed(const Config& config) {
  if (config.has("seed")) return config.get_u64("seed", 0);
  if (const char* env = std::getenv("LIFTSIM_SEED"); env != nullptr && *env != '\0') {
    Config from_env;
    from_env.set("seed", env);
    try {
      return from_env.get_u64("seed", 0);
    } catch (const ConfigError&) {
      throw ConfigError(std::string("LIFTSIM_SEED: expected an unsigned integer, got '") +
                        env + "'");
    }
  }
  throw ConfigError("no seed given: pass --seed or set LIFTSIM_SEED");
}

TrafficProfile traffic_profile_from(const Config& c, std::uint64_t seed) {
  TrafficProfile p;
  p.floor_count = c.get_int("floor_count", p.floor_count);
  p.workers = c.get_int("workers", p.workers);
  p.arrival_mean_s = c.get_double("arrival_mean_s", p.arrival_mean_s);
  p.departure_mean_s = c.get_double("departure_mean_s", p.departure_mean_s);
  p.peak_std_s = c.get_double("peak_std_s", p.peak_std_s);
  p.lunch_mean_s = c.get_double("lunch_mean_s", p.lunch_mean_s);
  p.lunch_duration_s = c.get_double("lunch_duration_s", p.lunch_duration_s);
  p.lunch = c.get_bool("lunch", p.lunch);
  const std::string dist = c.get("distribution", "normal");
  if (dist == "normal") {
    p.distribution = PeakDistribution::kTruncatedNormal;
  } else if (dist == "poisson") {
    p.distribution = PeakDistribution::kTruncatedPoisson;
  } else {
    bad_value("distribution", dist, "'normal' or 'poisson'");
  }
  WeightModel& w = p.weight;
  w.mean_a_kg = c.get_double("weight_mean_a_kg", w.mean_a_kg);
  w.std_a_kg = c.get_double("weight_std_a_kg", w.std_a_kg);
  w.mean_b_kg = c.get_double("weight_mean_b_kg", w.mean_b_kg);
  w.std_b_kg = c.get_double("weight_std_b_kg", w.std_b_kg);
  w.mix_a = c.get_double("weight_mix_a", w.mix_a);
  w.low_kg = c.get_double("weight_low_kg", w.low_kg);
  w.high_kg = c.get_double("weight_high_kg", w.high_kg);
  p.seed = seed;
  validate(p);
  return p;
}

BuildingConfig building_from(const Config& c) {
  BuildingConfig b;
  b.floor_count = c.get_int("floor_count", b.floor_count);
  b.capacity_kg = c.get_double("capacity_kg", b.capacity_kg);
  b.door_cycle_s = c.get_double("door_cycle_s", b.door_cycle_s);
  b.floor_travel_s = c.get_double("floor_travel_s", b.floor_travel_s);
  b.start_clock_s = c.get_double("start_clock_s", b.start_clock_s);
  b.allow_idle_doors = c.get_bool("allow_idle_doors", b.allow_idle_doors);
  b.idle_fallback_s = c.get_double("idle_fallback_s", b.idle_fallback_s);
  validate(b);
  return b;
}

dqn::DqnHyperparams hyperparams_from(const Config& c) {
  dqn::DqnHyperparams h;
  h.epsilon = c.get_double("epsilon", h.epsilon);
  h.discount = c.get_double("discount", h.discount);
  h.learning_rate = c.get_double("learning_rate", h.learning_rate);
  h.momentum = c.get_double("momentum", h.momentum);
  h.minibatch = c.get_u64("minibatch", h.minibatch);
  h.replay_capacity = c.get_u64("replay_capacity", h.replay_capacity);
  h.target_sync = c.get_u64("target_sync", h.target_sync);
  h.epochs = c.get_int("epochs", h.epochs);
  h.step_cap_factor = c.get_double("step_cap_factor", h.step_cap_factor);
  h.reward_scale = c.get_double("reward_scale", h.reward_scale);
  h.grad_clip = c.get_double("grad_clip", h.grad_clip);
  h.freeze = c.get_bool("freeze", h.freeze);

  const std::string td = c.get("td_mode", "standard");
  if (td == "standard") {
    h.td_mode = dqn::TdMode::kStandard;
  } else if (td == "paper-literal") {
    h.td_mode = dqn::TdMode::kPaperLiteral;
  } else {
    bad_value("td_mode", td, "'standard' or 'paper-literal'");
  }
  const std::string waiting = c.get("waiting_mode", "hall+riders");
  if (waiting == "hall+riders") {
    h.waiting_mode = dqn::WaitingMode::kHallAndRiders;
  } else if (waiting == "hall-only") {
    h.waiting_mode = dqn::WaitingMode::kHallOnly;
  } else {
    bad_value("waiting_mode", waiting, "'hall+riders' or 'hall-only'");
  }
  const std::string loop = c.get("update_loop", "averaged");
  if (loop == "averaged") {
    h.update_loop = dqn::UpdateLoop::kAveraged;
  } else if (loop == "paper-literal-loop") {
    h.update_loop = dqn::UpdateLoop::kPaperLiteral;
  } else {
    bad_value("update_loop", loop, "'averaged' or 'paper-literal-loop'");
  }
  dqn::validate(h);
  return h;
}

std::vector<int> hidden_sizes_from(const Config& c) {
  const std::string text = c.get("hidden", "64,64");
  std::vector<int> sizes;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const std::string t = trim(item);
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || v < 1) {
      bad_value("hidden", text, "comma-separated positive integers");
    }
    sizes.push_back(v);
  }
  return sizes;
}

}  // namespace liftsim
