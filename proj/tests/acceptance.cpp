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

// Acceptance gates. Prints one PASS/FAIL line per criterion and exits
// nonzero if any gate fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "liftsim/dqn.hpp"
#include "liftsim/error.hpp"
#include "liftsim/harness.hpp"
#include "liftsim/nnfa.hpp"
#include "liftsim/qcore.hpp"
#include "liftsim/simcore.hpp"
#include "liftsim/traffic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace liftsim {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

Config config_of(std::initializer_list<std::pair<const char*, std::string>> kv) {
  Config c;
  for (const auto& [k, v] : kv) c.set(k, v);
  return c;
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// 1. Naive liveness on 20 generated 200-worker days.
Verdict naive_liveness() {
  testing::TempDir dir("accept_naive");
  int failures = 0;
  double slowest = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    const std::string tape = dir.file("tape" + std::to_string(seed) + ".csv");
    run_command("generate",
                config_of({{"seed", std::to_string(seed)}, {"workers", "200"}, {"out", tape}}));
    const auto start = Clock::now();
    const std::string out = dir.file("naive" + std::to_string(seed));
    const CommandResult r = run_command(
        "run-naive", config_of({{"seed", std::to_string(seed)}, {"tape", tape}, {"out_dir", out}}));
    const double wall = seconds_since(start);
    slowest = std::max(slowest, wall);
    const json m = json::parse(r.summary)["metrics"];
    if (r.exit_code != 0 || m["people_moved"] != m["num_events"] || m["num_events"] != 800 ||
        wall >= 5.0) {
      ++failures;
    }
  }
  return {failures == 0, fmt("%.0f of 20 tapes fully delivered, slowest %.3f s (limit 5 s)",
                             20 - failures, slowest)};
}

// 2. Tabular Q-learning against the value-iteration oracle.
Verdict tabular_oracle() {
  struct Case {
    const char* file;
    AlphaSchedule schedule;
  };
  const Case cases[] = {{"two_state.mdp", AlphaSchedule::kConstant},
                        {"single_state.mdp", AlphaSchedule::kConstant},
                        {"slippery_chain.mdp", AlphaSchedule::kHarmonic}};
  const auto start = Clock::now();
  double worst = 0.0;
  bool ok = true;
  for (const Case& c : cases) {
    const FiniteMdp m = load_mdp_file(testing::data_path(std::string("data/mdps/") + c.file));
    TabularTrainConfig cfg;
    cfg.episodes = 10000;
    cfg.schedule = c.schedule;
    cfg.seed = 1;
    const auto r = train_tabular(m, cfg);
    const double d = max_norm_distance(r.q, value_iteration(m, 1e-10));
    worst = std::max(worst, d);
    ok = ok && d < 0.05;
  }
  const double wall = seconds_since(start);
  return {ok && wall < 10.0,
          fmt("worst max-norm distance %.3g (limit 0.05), %.3f s (limit 10 s)", worst, wall)};
}

// 3. Backward pass against central differences.
Verdict gradient_correctness() {
  const int sizes[] = {27, 64, 64, 5};
  Rng rng(2026);
  double worst = 0.0;
  double worst_tiny = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    nn::NetworkParams net = nn::init_network(sizes, seed);
    Rng bias_rng(seed ^ 0xABCDEFu);
    for (nn::Layer& l : net.layers)
      for (double& b : l.bias) b = 0.2 * (2.0 * bias_rng.uniform01() - 1.0);
    const auto x = testing::random_vector(rng, 27);
    const auto u = testing::random_vector(rng, 5);
    const auto g = testing::gradient_check(net, x, u);
    worst = std::max(worst, g.max_rel_error);
    worst_tiny = std::max(worst_tiny, g.max_abs_error_tiny);
    checked += g.checked;
  }
  return {worst < 1e-4 && worst_tiny < 1e-8 && checked > 0,
          fmt("max relative error %.3g over %.0f parameters (limit 1e-4)", worst,
              static_cast<double>(checked)) +
              fmt(", near-zero gradients within %.2g absolute", worst_tiny)};
}

// 4. Encoding length and action decoding.
Verdict encoding_contract() {
  bool ok = true;
  Rng rng(4);
  for (int floors = 2; floors <= 30; ++floors) {
    BuildingConfig b;
    b.floor_count = floors;
    Simulation sim(testing::random_tape(rng, 10, floors), b);
    for (int step = 0; step < 50 && !sim.is_terminal(); ++step) {
      ok = ok && dqn::encode_state(sim.state()).size() == 3u + 3u * floors;
      const auto legal = sim.legal_actions().to_vector();
      sim.apply(legal[rng.uniform_index(legal.size())]);
    }
  }
  const Action golden[] = {Action::kIdle, Action::kOpenCloseUp, Action::kOpenCloseDown,
                           Action::kMoveUp, Action::kMoveDown};
  for (int k = 0; k < 5; ++k) ok = ok && dqn::decode_action(k) == golden[k];
  bool rejects = false;
  try {
    dqn::decode_action(5);
  } catch (const InvalidArgument&) {
    rejects = true;
  }
  return {ok && rejects, "length 3 + 3*floors for 2..30 floors, decode table 0..4"};
}

// 5. Reward sign over random legal steps.
Verdict reward_sign() {
  Rng rng(5);
  int steps = 0;
  int violations = 0;
  int zero_rewards = 0;
  while (steps < 10000) {
    Simulation sim(testing::random_tape(rng, 30, 8, 27000.0, 90.0), BuildingConfig{});
    for (int i = 0; i < 400 && !sim.is_terminal() && steps < 10000; ++i, ++steps) {
      const auto legal = sim.legal_actions().to_vector();
      const StepOutcome out = sim.apply(legal[rng.uniform_index(legal.size())]);
      const int waiting = dqn::waiting_count(sim, dqn::WaitingMode::kHallAndRiders);
      const double r = dqn::reward(out, waiting);
      const bool zero_expected = waiting == 0 || out.elapsed_s == 0.0;
      if (r > 0.0 || (r == 0.0) != zero_expected) ++violations;
      if (r == 0.0) ++zero_rewards;
    }
  }
  return {violations == 0, fmt("%.0f steps, %.0f violations", steps, violations) +
                               fmt(", %.0f zero rewards", zero_rewards)};
}

std::vector<std::pair<std::string, std::uint64_t>> output_hashes(const CommandResult& r) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const std::string& path : r.outputs) out.emplace_back(path, fnv1a64(read_file(path)));
  return out;
}

// 6. Byte-identical reruns for every subcommand.
Verdict determinism() {
  testing::TempDir dir("accept_determinism");
  const std::string tape = dir.file("tape.csv");
  const std::string seed = "11";
  const std::vector<std::pair<std::string, Config>> runs = {
      {"generate", config_of({{"seed", seed}, {"workers", "12"}, {"out", tape}})},
      {"run-naive", config_of({{"seed", seed}, {"tape", tape}, {"out_dir", dir.file("naive")}})},
      {"probe-markov", config_of({{"trace", dir.file("naive/trace.csv")},
                                  {"out", dir.file("probe.json")}})},
      {"train-dqn", config_of({{"seed", seed}, {"tape", tape}, {"epochs", "2"},
                               {"out_dir", dir.file("dqn")}})},
      {"infer-dqn", config_of({{"seed", seed}, {"tape", tape},
                               {"checkpoint", dir.file("dqn/checkpoint.json")},
                               {"out_dir", dir.file("infer")}})},
      {"report", config_of({{"log", dir.file("dqn/epochs.tsv")}, {"out", dir.file("series.csv")}})},
      {"clone-naive", config_of({{"seed", seed}, {"tape", tape}, {"clone_epochs", "5"},
                                 {"out_dir", dir.file("clone")}})},
  };
  std::string mismatched;
  std::size_t files = 0;
  for (const auto& [command, config] : runs) {
    const auto first = output_hashes(run_command(command, config));
    const auto second = output_hashes(run_command(command, config));
    files += first.size();
    if (first != second || first.empty()) mismatched += " " + command;
  }
  return {mismatched.empty(), mismatched.empty()
                                  ? fmt("7 subcommands, %.0f output files identical", files)
                                  : "differs:" + mismatched};
}

// 7. Markov probe on a scripted two-arrival tape.
Verdict markov_gate() {
  testing::TempDir dir("accept_markov");
  {
    std::ofstream tape(dir.file("tape.csv"));
    tape << kTrafficCsvHeader << "\n27100,2,1,70\n27500,3,1,70\n";
  }
  run_command("run-naive", config_of({{"seed", "1"}, {"tape", dir.file("tape.csv")},
                                      {"out_dir", dir.file("naive")}}));
  const CommandResult r = run_command(
      "probe-markov",
      config_of({{"trace", dir.file("naive/trace.csv")}, {"out", dir.file("probe.json")}}));
  const int groups = json::parse(r.summary)["violation_groups"].get<int>();
  return {groups >= 1, fmt("%.0f violation groups (need >= 1)", groups)};
}

// 8. DQN pipeline health with replay instrumentation.
Verdict dqn_health() {
  Rng rng(8);
  const TrafficTable tape = testing::random_tape(rng, 50, 8, 27000.0, 300.0);
  dqn::DqnHyperparams h;
  h.epochs = 10;
  h.replay_capacity = 500;  // small enough that eviction is exercised
  const dqn::QModel initial = dqn::make_model(8, 1000.0, std::vector<int>{64, 64}, 8);

  std::vector<double> shadow;  // rewards in push order
  std::size_t replay_violations = 0;
  dqn::TrainHooks hooks;
  hooks.on_store = [&](const dqn::ReplayMemory& m) {
    shadow.push_back(m.at(m.size() - 1).reward);
    const std::size_t expected = std::min<std::size_t>(shadow.size(), m.capacity());
    if (m.size() != expected || m.total_pushed() != shadow.size()) ++replay_violations;
    const std::size_t base = shadow.size() - m.size();
    if (m.oldest_sequence() != base) ++replay_violations;
    for (std::size_t i = 0; i < m.size(); i += 37) {
      if (m.at(i).reward != shadow[base + i]) ++replay_violations;
    }
  };
  const auto start = Clock::now();
  std::vector<dqn::EpochLog> parsed;
  std::string failure;
  try {
    const auto r = dqn::train([&](int) { return Simulation(tape, BuildingConfig{}); }, h, initial,
                              8, hooks);
    std::ostringstream log;
    dqn::write_epoch_log(r.log, log);
    std::istringstream back(log.str());
    parsed = dqn::read_epoch_log(back);
  } catch (const Error& e) {
    failure = e.what();
  }
  bool well_formed = parsed.size() == 10;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const dqn::EpochLog& e = parsed[i];
    well_formed = well_formed && e.epoch == static_cast<int>(i) && e.metrics.num_events == 50 &&
                  std::isfinite(e.loss_mean) && std::isfinite(e.metrics.sum_total_time_s);
  }
  const bool ok = failure.empty() && well_formed && replay_violations == 0 && shadow.size() > 500;
  if (!failure.empty()) return {false, "training failed: " + failure};
  return {ok, fmt("%.0f log records, %.0f replay violations", parsed.size(), replay_violations) +
                  fmt(", %.0f stores, %.1f s", shadow.size(), seconds_since(start))};
}

// 9. Behaviour cloning of the naive controller.
Verdict representability() {
  const TrafficTable tape = generate_day(testing::small_profile(200, 9));
  CloneConfig cfg;
  cfg.seed = 9;
  const CloneResult r = clone_naive(tape, BuildingConfig{}, cfg);
  return {r.heldout_accuracy >= 0.90,
          fmt("held-out accuracy %.4f (need >= 0.90), majority rate %.4f", r.heldout_accuracy,
              r.majority_rate)};
}

// 10. Baseline threshold equals baseline / n.
Verdict baseline_rule() {
  const bool ok = baseline_threshold(1000.0, 4) == 250.0 && baseline_threshold(90.0, 3) == 30.0 &&
                  baseline_threshold(1234.5, 2) == 617.25 &&
                  baseline_threshold(10.0, 3) == 10.0 / 3.0 &&
                  baseline_threshold(0.3, 3) == 0.3 / 3.0 &&
                  baseline_threshold(7.75, 1) == 7.75;
  return {ok, "integer and fractional inputs exact"};
}

}  // namespace
}  // namespace liftsim

int main() {
  using liftsim::Verdict;
  const std::pair<const char*, std::function<Verdict()>> gates[] = {
      {"naive liveness", liftsim::naive_liveness},
      {"oracle equivalence", liftsim::tabular_oracle},
      {"gradient correctness", liftsim::gradient_correctness},
      {"encoding contract", liftsim::encoding_contract},
      {"reward sign", liftsim::reward_sign},
      {"determinism", liftsim::determinism},
      {"markov probe", liftsim::markov_gate},
      {"dqn pipeline health", liftsim::dqn_health},
      {"representability", liftsim::representability},
      {"baseline threshold", liftsim::baseline_rule},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, gate] : gates) {
    Verdict v;
    try {
      v = gate();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %2d %s  %-22s %s\n", index++, v.pass ? "PASS" : "FAIL", name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
