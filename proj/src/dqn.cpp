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

#include "liftsim/dqn.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "liftsim/error.hpp"

namespace liftsim::dqn {

EncodedState encode_state(const BuildingState& state) {
  EncodedState out;
  out.reserve(encoded_size(state.floor_count()));
  out.push_back(state.capacity_kg);
  out.push_back(state.current_weight_kg);
  out.push_back(static_cast<double>(state.current_floor));
  for (bool b : state.car_buttons) out.push_back(b ? 1.0 : 0.0);
  for (bool b : state.up_buttons) out.push_back(b ? 1.0 : 0.0);
  for (bool b : state.down_buttons) out.push_back(b ? 1.0 : 0.0);
  return out;
}

Action decode_action(int code) {
  if (code < 0 || code >= kActionCount) {
    throw InvalidArgument("action code " + std::to_string(code) +
                          " outside [0, 4]");
  }
  return static_cast<Action>(code);
}

int waiting_count(const Simulation& sim, WaitingMode mode) {
  const int hall = sim.hall_count();
  return mode == WaitingMode::kHallOnly ? hall : hall + sim.rider_count();
}

double reward(const StepOutcome& outcome, int waiting_after) {
  if (waiting_after == 0 || outcome.elapsed_s == 0.0) return 0.0;
  return -static_cast<double>(waiting_after) * outcome.elapsed_s;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be >= 1");
}

void ReplayMemory::push(Transition t) {
  if (size_ < capacity_) {
    buffer_.push_back(std::move(t));
    ++size_;
  } else {
    buffer_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  ++pushed_;
}

const Transition& ReplayMemory::at(std::size_t i) const {
  if (i >= size_) throw InvalidArgument("ReplayMemory::at out of range");
  return buffer_[(head_ + i) % capacity_];
}

std::vector<std::size_t> ReplayMemory::sample(std::size_t count, Rng& rng) const {
  if (size_ == 0) throw InvalidArgument("ReplayMemory::sample on empty memory");
  std::vector<std::size_t> idx(count);
  for (std::size_t& i : idx) i = rng.uniform_index(size_);
  return idx;
}

std::vector<double> QModel::scale_input(std::span<const double> encoded) const {
  std::vector<double> x(encoded.begin(), encoded.end());
  if (x.size() >= 3) {
    x[0] /= capacity_kg;
    x[1] /= capacity_kg;
    x[2] /= static_cast<double>(floor_count);
  }
  return x;
}

std::vector<double> QModel::q_values(std::span<const double> encoded) const {
  return nn::forward(net, scale_input(encoded));
}

QModel make_model(int floor_count, double capacity_kg, std::span<const int> hidden,
                  std::uint64_t seed) {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(encoded_size(floor_count)));
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(kActionCount);
  return QModel{nn::init_network(sizes, seed), floor_count, capacity_kg};
}

int greedy_action(std::span<const double> q_values, ActionSet legal) {
  int best = -1;
  for (int a = 0; a < kActionCount && a < static_cast<int>(q_values.size()); ++a) {
    if (!legal.contains(static_cast<Action>(a))) continue;
    if (best < 0 || q_values[a] > q_values[best]) best = a;
  }
  if (best < 0) throw InvalidArgument("greedy_action: no legal action");
  return best;
}

int select_action(const QModel& model, std::span<const double> state, ActionSet legal,
                  double epsilon, Rng& rng) {
  if (legal.empty()) throw InvalidArgument("select_action: no legal action");
  if (rng.uniform01() < epsilon) {
    const auto options = legal.to_vector();
    return static_cast<int>(options[rng.uniform_index(options.size())]);
  }
  return greedy_action(model.q_values(state), legal);
}

double td_target(const Transition& t, const QModel& target, double discount,
                 TdMode mode) {
  if (t.terminal || t.next_legal.empty() || discount == 0.0) return t.reward;
  const auto q = target.q_values(t.next_state);
  const double bootstrap = discount * q[greedy_action(q, t.next_legal)];
  return mode == TdMode::kStandard ? t.reward + bootstrap : t.reward - bootstrap;
}

void validate(const DqnHyperparams& h) {
  if (!(h.epsilon >= 0.0 && h.epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(h.discount >= 0.0 && h.discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  if (!(h.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(h.momentum >= 0.0 && h.momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (h.minibatch < 1) throw ConfigError("minibatch must be >= 1");
  if (h.replay_capacity < 1) throw ConfigError("replay_capacity must be >= 1");
  if (h.target_sync < 1) throw ConfigError("target_sync must be >= 1");
  if (h.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(h.step_cap_factor > 0.0)) throw ConfigError("step_cap_factor must be > 0");
  if (!(h.reward_scale > 0.0)) throw ConfigError("reward_scale must be > 0");
  if (!(h.grad_clip >= 0.0)) throw ConfigError("grad_clip must be >= 0");
}

std::size_t step_cap(const DqnHyperparams& hyper, std::size_t event_count) {
  const double cap = std::ceil(hyper.step_cap_factor * static_cast<double>(event_count));
  return cap < 1.0 ? 1 : static_cast<std::size_t>(cap);
}

// ---------------------------------------------------------------------------
// Epoch log

void write_epoch_log(std::span<const EpochLog> log, std::ostream& out) {
  out << kEpochLogHeader << '\n';
  for (const EpochLog& e : log) {
    const MetricsReport& m = e.metrics;
    out << e.epoch << '\t' << m.num_events << '\t' << m.people_moved << '\t'
        << format_double(m.mean_total_time_s) << '\t'
        << format_double(m.median_total_time_s) << '\t'
        << format_double(m.max_total_time_s) << '\t'
        << format_double(m.sum_total_time_s) << '\t' << format_double(e.epsilon)
        << '\t' << format_double(e.loss_mean) << '\n';
  }
}

std::vector<EpochLog> read_epoch_log(std::istream& in) {
  std::vector<EpochLog> log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kEpochLogHeader) throw ParseError("expected epoch log header", 1, 1);
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream fields(line);
    for (std::string cell; std::getline(fields, cell, '\t');) f.push_back(cell);
    if (f.size() != 9) {
      throw ParseError("expected 9 columns, found " + std::to_string(f.size()), line_no,
                       f.size() + 1);
    }
    auto num = [&](std::size_t col) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f[col], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != f[col].size()) {
        throw ParseError("malformed value '" + f[col] + "'", line_no, col + 1);
      }
      return v;
    };
    EpochLog e;
    e.epoch = static_cast<int>(num(0));
    e.metrics.num_events = static_cast<int>(num(1));
    e.metrics.people_moved = static_cast<int>(num(2));
    e.metrics.mean_total_time_s = num(3);
    e.metrics.median_total_time_s = num(4);
    e.metrics.max_total_time_s = num(5);
    e.metrics.sum_total_time_s = num(6);
    e.metrics.truncated = e.metrics.people_moved < e.metrics.num_events;
    e.epsilon = num(7);
    e.loss_mean = num(8);
    log.push_back(e);
  }
  if (line_no == 0) throw ParseError("missing epoch log header", 1, 1);
  return log;
}

// ---------------------------------------------------------------------------
// Training

namespace {

using nlohmann::json;

std::string minibatch_payload(const ReplayMemory& memory,
                              const std::vector<std::size_t>& idx, int epoch,
                              std::size_t update) {
  json batch = json::array();
  for (std::size_t i : idx) {
    const Transition& t = memory.at(i);
    batch.push_back({{"s", t.state},
                     {"a", t.action},
                     {"r", t.reward},
                     {"s_next", t.next_state},
                     {"terminal", t.terminal},
                     {"next_legal", t.next_legal.mask()}});
  }
  return json{{"epoch", epoch}, {"update", update}, {"minibatch", std::move(batch)}}
      .dump();
}

struct Learner {
  const DqnHyperparams& hyper;
  QModel& online;
  QModel& target;
  nn::SgdOptimizer optimizer;
  const TrainHooks& hooks;
  std::size_t updates = 0;
  std::size_t syncs = 0;
  nn::ForwardCache cache{};
  std::vector<double> upstream = std::vector<double>(kActionCount, 0.0);

  // Gradient of (q(s, a) - y)^2 * weight, plus the unweighted squared error.
  double accumulate(const Transition& t, nn::Gradients& grads, double weight) {
    const double y = td_target(t, target, hyper.discount, hyper.td_mode);
    nn::forward_cached(online.net, online.scale_input(t.state), cache);
    const double err = cache.output[t.action] - y;
    std::fill(upstream.begin(), upstream.end(), 0.0);
    upstream[t.action] = 2.0 * err * weight;
    grads.add(nn::backward(online.net, cache, upstream));
    return err * err;
  }

  void apply(nn::Gradients& grads) {
    if (hyper.grad_clip > 0.0) {
      const double norm = grads.norm();
      if (norm > hyper.grad_clip) grads.scale(hyper.grad_clip / norm);
    }
    optimizer.step(online.net, grads);
  }

  void count_update() {
    ++updates;
    if (updates % hyper.target_sync == 0) {
      target.net = online.net;
      ++syncs;
    }
    if (hooks.on_update) hooks.on_update(updates, target);
  }

  // Returns the mean squared TD error over the minibatch.
  double learn(const ReplayMemory& memory, Rng& rng, int epoch) {
    const auto idx = memory.sample(hyper.minibatch, rng);
    const double batch = static_cast<double>(idx.size());
    double loss = 0.0;
    try {
      if (hyper.update_loop == UpdateLoop::kAveraged) {
        nn::Gradients grads = nn::Gradients::zeros_like(online.net);
        for (std::size_t i : idx) loss += accumulate(memory.at(i), grads, 1.0 / batch);
        loss /= batch;
        if (!std::isfinite(loss)) throw NumericError("non-finite loss");
        apply(grads);
        count_update();
      } else {
        for (std::size_t i : idx) {
          nn::Gradients grads = nn::Gradients::zeros_like(online.net);
          const double l = accumulate(memory.at(i), grads, 1.0);
          if (!std::isfinite(l)) throw NumericError("non-finite loss");
          loss += l;
          apply(grads);
          count_update();
        }
        loss /= batch;
      }
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " in epoch " + std::to_string(epoch) +
                             " at update " + std::to_string(updates + 1),
                         minibatch_payload(memory, idx, epoch, updates + 1));
    }
    return loss;
  }
};

}  // namespace

TrainResult train(const EnvFactory& make_env, const DqnHyperparams& hyper,
                  const QModel& initial, std::uint64_t seed, const TrainHooks& hooks) {
  validate(hyper);
  nn::validate(initial.net);
  if (initial.net.input_size() != static_cast<int>(encoded_size(initial.floor_count)) ||
      initial.net.output_size() != kActionCount) {
    throw ConfigError("network shape does not match the state encoder");
  }

  TrainResult result{initial, {}, 0};
  if (hyper.epochs == 0) return result;

  QModel& online = result.model;
  QModel target = initial;
  Rng rng(seed);
  ReplayMemory memory(hyper.replay_capacity);
  Learner learner{hyper, online, target, nn::SgdOptimizer(hyper.learning_rate, hyper.momentum),
                  hooks};

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Simulation env = make_env(epoch);
    if (env.config().floor_count != online.floor_count) {
      throw ConfigError("environment floor count does not match the model");
    }
    const std::size_t cap = step_cap(hyper, env.passengers().size());
    EpochLog entry;
    entry.epoch = epoch;
    entry.epsilon = hyper.epsilon;
    double loss_sum = 0.0;
    while (!env.is_terminal() && entry.steps < cap) {
      Transition t;
      t.state = encode_state(env.state());
      const ActionSet legal = env.legal_actions();
      t.action = select_action(online, t.state, legal, hyper.epsilon, rng);
      const Action action = decode_action(t.action);
      if (hooks.on_action) hooks.on_action(epoch, action);
      const StepOutcome outcome = env.apply(action);
      t.reward = reward(outcome, waiting_count(env, hyper.waiting_mode)) * hyper.reward_scale;
      t.next_state = encode_state(env.state());
      t.terminal = env.is_terminal();
      t.next_legal = env.legal_actions();
      memory.push(std::move(t));
      if (hooks.on_store) hooks.on_store(memory);
      ++entry.steps;
      if (!hyper.freeze) {
        loss_sum += learner.learn(memory, rng, epoch);
        ++entry.updates;
      }
    }
    entry.metrics = compute_metrics(env.passengers());
    entry.loss_mean = entry.updates ? loss_sum / static_cast<double>(entry.updates) : 0.0;
    result.log.push_back(entry);
  }
  result.target_syncs = learner.syncs;
  return result;
}

InferResult infer(Simulation env, const QModel& model, std::size_t cap) {
  nn::validate(model.net);
  if (model.net.input_size() != static_cast<int>(encoded_size(env.config().floor_count))) {
    throw ConfigError("network input size does not match the environment encoder");
  }
  InferResult result;
  while (!env.is_terminal() && result.actions.size() < cap) {
    const auto q = model.q_values(encode_state(env.state()));
    const Action action = decode_action(greedy_action(q, env.legal_actions()));
    env.apply(action);
    result.actions.push_back(action);
  }
  result.metrics = compute_metrics(env.passengers());
  result.metrics.truncated = result.metrics.truncated || !env.is_terminal();
  return result;
}

}  // namespace liftsim::dqn
