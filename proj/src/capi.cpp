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

#include "liftsim/liftsim.h"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "liftsim/dqn.hpp"
#include "liftsim/error.hpp"
#include "liftsim/harness.hpp"
#include "liftsim/naive.hpp"
#include "liftsim/simcore.hpp"
#include "liftsim/traffic.hpp"

struct liftsim_config {
  liftsim::Config config;
};

struct liftsim_table {
  liftsim::TrafficTable table;
};

struct liftsim_env {
  liftsim::Simulation sim;
  liftsim::NaiveController naive;
  liftsim::dqn::WaitingMode waiting_mode;
};

struct liftsim_result {
  liftsim::CommandResult result;
};

namespace {

thread_local std::string last_error;

liftsim_status fail(liftsim_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps exceptions to status codes; every entry point funnels through here.
template <typename Fn>
liftsim_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const liftsim::Error& e) {
    return fail(static_cast<liftsim_status>(e.code()), e.what());
  } catch (const std::invalid_argument& e) {
    return fail(LIFTSIM_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LIFTSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LIFTSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LIFTSIM_ERR_INTERNAL, "unknown error");
  }
}

#define LIFTSIM_REQUIRE(ptr)                                            \
  do {                                                                  \
    if ((ptr) == nullptr) return fail(LIFTSIM_ERR_ARGUMENT, #ptr " is NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* liftsim_version(void) { return "0.1.0"; }

const char* liftsim_last_error(void) { return last_error.c_str(); }

liftsim_status liftsim_config_create(liftsim_config** out) {
  LIFTSIM_REQUIRE(out);
  return guarded([&] {
    *out = new liftsim_config();
    return LIFTSIM_OK;
  });
}

void liftsim_config_destroy(liftsim_config* config) { delete config; }

liftsim_status liftsim_config_set(liftsim_config* config, const char* key,
                                  const char* value) {
  LIFTSIM_REQUIRE(config);
  LIFTSIM_REQUIRE(key);
  LIFTSIM_REQUIRE(value);
  return guarded([&] {
    config->config.set(key, value);
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_config_load(liftsim_config* config, const char* path) {
  LIFTSIM_REQUIRE(config);
  LIFTSIM_REQUIRE(path);
  return guarded([&] {
    config->config.load_file(path);
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_config_hash(const liftsim_config* config, char* buf, size_t len) {
  LIFTSIM_REQUIRE(config);
  LIFTSIM_REQUIRE(buf);
  return guarded([&] {
    const std::string h = config->config.hash();
    if (len < h.size() + 1) return fail(LIFTSIM_ERR_ARGUMENT, "hash buffer too small");
    h.copy(buf, h.size());
    buf[h.size()] = '\0';
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_run(const liftsim_config* config, const char* command,
                           liftsim_result** out) {
  LIFTSIM_REQUIRE(config);
  LIFTSIM_REQUIRE(command);
  LIFTSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto result = std::make_unique<liftsim_result>();
    result->result = liftsim::run_command(command, config->config);
    const auto status = static_cast<liftsim_status>(result->result.exit_code);
    if (status == LIFTSIM_ERR_TRUNCATED) last_error = "episode truncated at the step cap";
    *out = result.release();
    return status;
  });
}

const char* liftsim_result_summary(const liftsim_result* result) {
  return result ? result->result.summary.c_str() : "";
}

size_t liftsim_result_output_count(const liftsim_result* result) {
  return result ? result->result.outputs.size() : 0;
}

const char* liftsim_result_output(const liftsim_result* result, size_t index) {
  if (!result || index >= result->result.outputs.size()) return nullptr;
  return result->result.outputs[index].c_str();
}

void liftsim_result_destroy(liftsim_result* result) { delete result; }

liftsim_status liftsim_table_generate(const liftsim_config* config, liftsim_table** out) {
  LIFTSIM_REQUIRE(config);
  LIFTSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const auto seed = liftsim::resolve_seed(config->config);
    auto table = std::make_unique<liftsim_table>();
    table->table = liftsim::generate_day(liftsim::traffic_profile_from(config->config, seed));
    *out = table.release();
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_table_read_csv(const char* path, liftsim_table** out) {
  LIFTSIM_REQUIRE(path);
  LIFTSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto table = std::make_unique<liftsim_table>();
    table->table = liftsim::read_csv_file(path);
    *out = table.release();
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_table_from_records(const liftsim_record* records, size_t count,
                                          liftsim_table** out) {
  LIFTSIM_REQUIRE(out);
  *out = nullptr;
  if (count > 0) LIFTSIM_REQUIRE(records);
  return guarded([&] {
    auto table = std::make_unique<liftsim_table>();
    for (size_t i = 0; i < count; ++i) {
      const liftsim_record& r = records[i];
      if (!(std::isfinite(r.time_s) && r.time_s >= 0.0) || r.start_floor == r.dest_floor ||
          !(std::isfinite(r.weight_kg) && r.weight_kg > 0.0)) {
        throw liftsim::InvalidArgument("record " + std::to_string(i) + " is malformed");
      }
      table->table.push_back({r.time_s, r.start_floor, r.dest_floor, r.weight_kg});
    }
    *out = table.release();
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_table_write_csv(const liftsim_table* table, const char* path) {
  LIFTSIM_REQUIRE(table);
  LIFTSIM_REQUIRE(path);
  return guarded([&] {
    liftsim::write_file_atomic(path, liftsim::to_csv(table->table));
    return LIFTSIM_OK;
  });
}

size_t liftsim_table_size(const liftsim_table* table) {
  return table ? table->table.size() : 0;
}

liftsim_status liftsim_table_record(const liftsim_table* table, size_t index,
                                    liftsim_record* out) {
  LIFTSIM_REQUIRE(table);
  LIFTSIM_REQUIRE(out);
  if (index >= table->table.size()) return fail(LIFTSIM_ERR_ARGUMENT, "record index out of range");
  const auto& r = table->table[index];
  *out = {r.time_s, r.start_floor, r.dest_floor, r.weight_kg};
  return LIFTSIM_OK;
}

void liftsim_table_destroy(liftsim_table* table) { delete table; }

liftsim_status liftsim_env_create(const liftsim_table* table, const liftsim_config* config,
                                  liftsim_env** out) {
  LIFTSIM_REQUIRE(table);
  LIFTSIM_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const liftsim::Config empty;
    const liftsim::Config& c = config ? config->config : empty;
    const auto building = liftsim::building_from(c);
    const auto hyper = liftsim::hyperparams_from(c);
    const std::uint64_t seed = c.has("seed") ? c.get_u64("seed", 0) : 0;
    *out = new liftsim_env{liftsim::Simulation(table->table, building),
                           liftsim::NaiveController(seed), hyper.waiting_mode};
    return LIFTSIM_OK;
  });
}

void liftsim_env_destroy(liftsim_env* env) { delete env; }

liftsim_status liftsim_env_step(liftsim_env* env, int action, liftsim_step* out) {
  LIFTSIM_REQUIRE(env);
  return guarded([&] {
    const auto outcome = env->sim.apply(liftsim::dqn::decode_action(action));
    const int waiting = liftsim::dqn::waiting_count(env->sim, env->waiting_mode);
    if (out) {
      out->elapsed_s = outcome.elapsed_s;
      out->reward = liftsim::dqn::reward(outcome, waiting);
      out->boarded = outcome.boarded;
      out->delivered = outcome.delivered;
      out->arrivals = static_cast<int>(outcome.arrivals.size());
      out->waiting = waiting;
      out->terminal = outcome.terminal ? 1 : 0;
    }
    return LIFTSIM_OK;
  });
}

unsigned liftsim_env_legal_mask(const liftsim_env* env) {
  return env ? env->sim.legal_actions().mask() : 0u;
}

int liftsim_env_is_terminal(const liftsim_env* env) {
  return env && env->sim.is_terminal() ? 1 : 0;
}

double liftsim_env_clock(const liftsim_env* env) {
  return env ? env->sim.state().clock_s : 0.0;
}

int liftsim_env_floor(const liftsim_env* env) {
  return env ? env->sim.state().current_floor : 0;
}

size_t liftsim_env_encoded_size(const liftsim_env* env) {
  return env ? liftsim::dqn::encoded_size(env->sim.config().floor_count) : 0;
}

liftsim_status liftsim_env_encode(const liftsim_env* env, double* buf, size_t len) {
  LIFTSIM_REQUIRE(env);
  LIFTSIM_REQUIRE(buf);
  return guarded([&] {
    const auto encoded = liftsim::dqn::encode_state(env->sim.state());
    if (len < encoded.size()) return fail(LIFTSIM_ERR_ARGUMENT, "encode buffer too small");
    std::copy(encoded.begin(), encoded.end(), buf);
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_env_naive_action(liftsim_env* env, int* action) {
  LIFTSIM_REQUIRE(env);
  LIFTSIM_REQUIRE(action);
  return guarded([&] {
    *action = static_cast<int>(env->naive.decide(env->sim.observe()));
    return LIFTSIM_OK;
  });
}

liftsim_status liftsim_env_metrics(const liftsim_env* env, liftsim_metrics* out) {
  LIFTSIM_REQUIRE(env);
  LIFTSIM_REQUIRE(out);
  return guarded([&] {
    auto m = liftsim::compute_metrics(env->sim.passengers());
    m.truncated = m.truncated || !env->sim.is_terminal();
    *out = {m.num_events,        m.people_moved,     m.mean_total_time_s,
            m.median_total_time_s, m.max_total_time_s, m.sum_total_time_s,
            m.truncated ? 1 : 0};
    return LIFTSIM_OK;
  });
}

const char* liftsim_action_name(int code) {
  if (code < 0 || code >= liftsim::kActionCount) return nullptr;
  return liftsim::action_name(static_cast<liftsim::Action>(code));
}

liftsim_status liftsim_baseline_threshold(double baseline_sum_s, int n_elevators,
                                          double* out) {
  LIFTSIM_REQUIRE(out);
  return guarded([&] {
    *out = liftsim::baseline_threshold(baseline_sum_s, n_elevators);
    return LIFTSIM_OK;
  });
}

}  // extern "C"
