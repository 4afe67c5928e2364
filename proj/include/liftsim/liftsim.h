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

/* C interface to the liftsim simulator.
 *
 * All functions return a liftsim_status. On failure a one-line message is
 * available from liftsim_last_error() on the calling thread until the next
 * call into the library. Handles are opaque and owned by the caller; destroy
 * functions accept NULL.
 */
#ifndef LIFTSIM_LIFTSIM_H_
#define LIFTSIM_LIFTSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LIFTSIM_BUILDING)
#    define LIFTSIM_API __declspec(dllexport)
#  else
#    define LIFTSIM_API __declspec(dllimport)
#  endif
#else
#  define LIFTSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum liftsim_status {
  LIFTSIM_OK = 0,
  LIFTSIM_ERR_INTERNAL = 1,
  LIFTSIM_ERR_CONFIG = 2,
  LIFTSIM_ERR_IO = 3,
  LIFTSIM_ERR_NUMERIC = 4,
  LIFTSIM_ERR_TRUNCATED = 5,
  LIFTSIM_ERR_ILLEGAL_ACTION = 6,
  LIFTSIM_ERR_ARGUMENT = 7
} liftsim_status;

/* Action codes, identical to the network output indices. */
enum {
  LIFTSIM_ACTION_IDLE = 0,
  LIFTSIM_ACTION_OPEN_CLOSE_UP = 1,
  LIFTSIM_ACTION_OPEN_CLOSE_DOWN = 2,
  LIFTSIM_ACTION_MOVE_UP = 3,
  LIFTSIM_ACTION_MOVE_DOWN = 4
};

typedef struct liftsim_config liftsim_config;
typedef struct liftsim_table liftsim_table;
typedef struct liftsim_env liftsim_env;
typedef struct liftsim_result liftsim_result;

typedef struct liftsim_record {
  double time_s;
  int start_floor;
  int dest_floor;
  double weight_kg;
} liftsim_record;

typedef struct liftsim_step {
  double elapsed_s;
  double reward;
  int boarded;
  int delivered;
  int arrivals;
  int waiting;
  int terminal;
} liftsim_step;

typedef struct liftsim_metrics {
  int num_events;
  int people_moved;
  double mean_total_time_s;
  double median_total_time_s;
  double max_total_time_s;
  double sum_total_time_s;
  int truncated;
} liftsim_metrics;

LIFTSIM_API const char* liftsim_version(void);
LIFTSIM_API const char* liftsim_last_error(void);

/* Configuration: flat key/value pairs, same keys as the CLI flags. */
LIFTSIM_API liftsim_status liftsim_config_create(liftsim_config** out);
LIFTSIM_API void liftsim_config_destroy(liftsim_config* config);
LIFTSIM_API liftsim_status liftsim_config_set(liftsim_config* config,
                                              const char* key,
                                              const char* value);
LIFTSIM_API liftsim_status liftsim_config_load(liftsim_config* config,
                                               const char* path);
/* Writes the 16-digit hex hash and a NUL into buf (len >= 17). */
LIFTSIM_API liftsim_status liftsim_config_hash(const liftsim_config* config,
                                               char* buf, size_t len);

/* Runs a CLI subcommand ("generate", "run-naive", ...). The result handle is
 * produced on success and on LIFTSIM_ERR_TRUNCATED. */
LIFTSIM_API liftsim_status liftsim_run(const liftsim_config* config,
                                       const char* command,
                                       liftsim_result** out);
LIFTSIM_API const char* liftsim_result_summary(const liftsim_result* result);
LIFTSIM_API size_t liftsim_result_output_count(const liftsim_result* result);
LIFTSIM_API const char* liftsim_result_output(const liftsim_result* result,
                                              size_t index);
LIFTSIM_API void liftsim_result_destroy(liftsim_result* result);

/* Traffic tables. */
LIFTSIM_API liftsim_status liftsim_table_generate(const liftsim_config* config,
                                                  liftsim_table** out);
LIFTSIM_API liftsim_status liftsim_table_read_csv(const char* path,
                                                  liftsim_table** out);
LIFTSIM_API liftsim_status liftsim_table_from_records(
    const liftsim_record* records, size_t count, liftsim_table** out);
LIFTSIM_API liftsim_status liftsim_table_write_csv(const liftsim_table* table,
                                                   const char* path);
LIFTSIM_API size_t liftsim_table_size(const liftsim_table* table);
LIFTSIM_API liftsim_status liftsim_table_record(const liftsim_table* table,
                                                size_t index,
                                                liftsim_record* out);
LIFTSIM_API void liftsim_table_destroy(liftsim_table* table);

/* Single-episode environment. Building keys are read from config (NULL for
 * defaults). */
LIFTSIM_API liftsim_status liftsim_env_create(const liftsim_table* table,
                                              const liftsim_config* config,
                                              liftsim_env** out);
LIFTSIM_API void liftsim_env_destroy(liftsim_env* env);
LIFTSIM_API liftsim_status liftsim_env_step(liftsim_env* env, int action,
                                            liftsim_step* out);
/* Bit k set when action code k is legal. */
LIFTSIM_API unsigned liftsim_env_legal_mask(const liftsim_env* env);
LIFTSIM_API int liftsim_env_is_terminal(const liftsim_env* env);
LIFTSIM_API double liftsim_env_clock(const liftsim_env* env);
LIFTSIM_API int liftsim_env_floor(const liftsim_env* env);
/* Length of the encoded state (3 + 3 * floor_count). */
LIFTSIM_API size_t liftsim_env_encoded_size(const liftsim_env* env);
LIFTSIM_API liftsim_status liftsim_env_encode(const liftsim_env* env,
                                              double* buf, size_t len);
/* Decision of the env's own naive controller (seeded by config "seed"). */
LIFTSIM_API liftsim_status liftsim_env_naive_action(liftsim_env* env,
                                                    int* action);
LIFTSIM_API liftsim_status liftsim_env_metrics(const liftsim_env* env,
                                               liftsim_metrics* out);

LIFTSIM_API const char* liftsim_action_name(int code);
LIFTSIM_API liftsim_status liftsim_baseline_threshold(double baseline_sum_s,
                                                      int n_elevators,
                                                      double* out);

#ifdef __cplusplus
}
#endif

#endif  /* LIFTSIM_LIFTSIM_H_ */
