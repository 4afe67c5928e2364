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

#include "liftsim/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "liftsim/error.hpp"
#include "liftsim/naive.hpp"

namespace liftsim {

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for '" + path + "': " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move output into place at '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string metrics_to_json(const MetricsReport& m, int indent) {
  nlohmann::json j = {{"num_events", m.num_events},
                      {"people_moved", m.people_moved},
                      {"mean_total_time_s", m.mean_total_time_s},
                      {"median_total_time_s", m.median_total_time_s},
                      {"max_total_time_s", m.max_total_time_s},
                      {"sum_total_time_s", m.sum_total_time_s},
                      {"truncated", m.truncated}};
  return j.dump(indent);
}

NaiveRun run_naive(const TrafficTable& tape, const BuildingConfig& building,
                   std::uint64_t seed, const NaiveRunOptions& options) {
  Simulation sim(tape, building);
  NaiveController controller(seed);
  const std::size_t events = std::max<std::size_t>(tape.size(), 1);
  const std::size_t cap = options.step_cap
                              ? options.step_cap
                              : 10 * events * static_cast<std::size_t>(building.floor_count);
  NaiveRun run;
  if (options.record_trace) {
    run.trace.push_back(make_trace_row(0, sim, -1, 0.0, StepOutcome{},
                                       dqn::waiting_count(sim, options.waiting_mode)));
  }
  while (!sim.is_terminal() && run.steps < cap) {
    const Action action = controller.decide(sim.observe());
    if (options.record_decisions) {
      run.decisions.push_back({dqn::encode_state(sim.state()), sim.legal_actions(), action});
    }
    const StepOutcome outcome = sim.apply(action);
    ++run.steps;
    if (options.record_trace) {
      const int waiting = dqn::waiting_count(sim, options.waiting_mode);
      run.trace.push_back(make_trace_row(run.steps, sim, static_cast<int>(action),
                                         dqn::reward(outcome, waiting), outcome, waiting));
    }
  }
  run.metrics = compute_metrics(sim.passengers());
  run.metrics.truncated = run.metrics.truncated || !sim.is_terminal();
  return run;
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
  }
}

double accuracy(const dqn::QModel& model, const std::vector<RecordedDecision>& data,
                const std::vector<std::size_t>& idx, bool masked) {
  if (idx.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i : idx) {
    const auto q = model.q_values(data[i].state);
    const ActionSet allowed = masked ? data[i].legal : ActionSet::all();
    hits += dqn::greedy_action(q, allowed) == static_cast<int>(data[i].action);
  }
  return static_cast<double>(hits) / static_cast<double>(idx.size());
}

}  // namespace

CloneResult clone_naive(const TrafficTable& tape, const BuildingConfig& building,
                        const CloneConfig& config) {
  if (tape.empty()) throw ConfigError("clone_naive needs a nonempty tape");
  if (!(config.holdout_fraction > 0.0 && config.holdout_fraction < 1.0)) {
    throw ConfigError("holdout_fraction must lie in (0, 1)");
  }
  if (config.epochs < 0) throw ConfigError("clone epochs must be >= 0");
  if (config.minibatch < 1) throw ConfigError("clone minibatch must be >= 1");
  NaiveRunOptions options;
  options.record_decisions = true;
  const NaiveRun run = run_naive(tape, building, config.seed, options);
  const auto& data = run.decisions;

  Rng rng(config.seed ^ 0xC10E5EEDULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  const auto heldout_n = static_cast<std::size_t>(
      std::llround(config.holdout_fraction * static_cast<double>(data.size())));
  std::vector<std::size_t> heldout(order.begin(), order.begin() + heldout_n);
  std::vector<std::size_t> train(order.begin() + heldout_n, order.end());
  if (train.empty() || heldout.empty()) {
    throw ConfigError("tape too short to split into training and held-out decisions");
  }

  CloneResult result;
  result.train_size = train.size();
  result.heldout_size = heldout.size();

  std::array<std::size_t, kActionCount> counts{};
  for (std::size_t i : train) ++counts[static_cast<std::size_t>(data[i].action)];
  const auto majority = static_cast<int>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  result.majority_action = static_cast<Action>(majority);
  std::size_t majority_hits = 0;
  for (std::size_t i : heldout) majority_hits += static_cast<int>(data[i].action) == majority;
  result.majority_rate =
      static_cast<double>(majority_hits) / static_cast<double>(heldout.size());

  result.model = dqn::make_model(building.floor_count, building.capacity_kg,
                                 config.hidden, config.seed);
  nn::Layer& head = result.model.net.layers.back();
  std::fill(head.weights.begin(), head.weights.end(), 0.0);
  for (int a = 0; a < kActionCount; ++a) {
    // Laplace-smoothed log prior; monotone in the counts, so the majority
    // class (lowest index on ties) has the largest bias.
    head.bias[a] = std::log((static_cast<double>(counts[a]) + 1.0) /
                            (static_cast<double>(train.size()) + kActionCount));
  }

  nn::SgdOptimizer optimizer(config.learning_rate, config.momentum);
  nn::ForwardCache cache;
  std::vector<double> upstream(kActionCount);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(train, rng);
    for (std::size_t start = 0; start < train.size(); start += config.minibatch) {
      const std::size_t end = std::min(train.size(), start + config.minibatch);
      const double batch = static_cast<double>(end - start);
      nn::Gradients grads = nn::Gradients::zeros_like(result.model.net);
      for (std::size_t k = start; k < end; ++k) {
        const RecordedDecision& d = data[train[k]];
        nn::forward_cached(result.model.net, result.model.scale_input(d.state), cache);
        const double top = *std::max_element(cache.output.begin(), cache.output.end());
        double z = 0.0;
        for (int a = 0; a < kActionCount; ++a) {
          upstream[a] = std::exp(cache.output[a] - top);
          z += upstream[a];
        }
        for (int a = 0; a < kActionCount; ++a) {
          const double target = a == static_cast<int>(d.action) ? 1.0 : 0.0;
          upstream[a] = (upstream[a] / z - target) / batch;
        }
        grads.add(nn::backward(result.model.net, cache, upstream));
      }
      optimizer.step(result.model.net, grads);
    }
  }

  result.train_accuracy = accuracy(result.model, data, train, false);
  result.heldout_accuracy = accuracy(result.model, data, heldout, false);
  result.heldout_masked_accuracy = accuracy(result.model, data, heldout, true);
  return result;
}

}  // namespace liftsim
