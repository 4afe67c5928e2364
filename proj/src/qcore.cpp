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

#include "liftsim/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "liftsim/error.hpp"
#include "liftsim/rng.hpp"

namespace liftsim {

FiniteMdp::FiniteMdp(int num_states, int num_actions, double discount)
    : num_states_(num_states), num_actions_(num_actions), discount_(discount) {
  if (num_states < 1 || num_actions < 1) {
    throw ConfigError("MDP needs at least one state and one action");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw ConfigError("MDP discount must lie in [0, 1)");
  }
  const auto pairs = static_cast<std::size_t>(num_states) * num_actions;
  legal_.assign(pairs, 0);
  prob_.assign(pairs * num_states, 0.0);
  reward_.assign(pairs * num_states, 0.0);
}

bool FiniteMdp::terminal(int s) const {
  for (int a = 0; a < num_actions_; ++a) {
    if (legal(s, a)) return false;
  }
  return true;
}

void FiniteMdp::add_transition(int s, int a, int next, double prob, double reward) {
  if (s < 0 || s >= num_states_ || next < 0 || next >= num_states_ || a < 0 ||
      a >= num_actions_) {
    throw ConfigError("MDP transition index out of range");
  }
  const std::size_t i = index(s, a) * num_states_ + next;
  if (prob_[i] != 0.0) {
    throw ConfigError("duplicate MDP transition " + std::to_string(s) + " " +
                      std::to_string(a) + " " + std::to_string(next));
  }
  legal_[index(s, a)] = 1;
  prob_[i] = prob;
  reward_[i] = reward;
}

void FiniteMdp::validate() const {
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      if (!legal(s, a)) continue;
      double total = 0.0;
      for (int n = 0; n < num_states_; ++n) {
        const double p = prob(s, a, n);
        if (!(p >= 0.0 && p <= 1.0)) {
          throw ConfigError("MDP probability outside [0, 1] at state " +
                            std::to_string(s) + " action " + std::to_string(a));
        }
        if (!std::isfinite(reward(s, a, n))) {
          throw ConfigError("non-finite MDP reward");
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw ConfigError("MDP row for state " + std::to_string(s) + " action " +
                          std::to_string(a) + " sums to " + std::to_string(total));
      }
    }
  }
}

FiniteMdp parse_mdp(std::istream& in) {
  struct Row {
    int s, a, next;
    double prob, reward;
  };
  std::vector<Row> rows;
  double discount = -1.0;
  int max_state = -1;
  int max_action = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "discount") {
      if (!(fields >> discount)) throw ParseError("malformed discount", line_no, 2);
      continue;
    }
    Row r{};
    std::istringstream head(first);
    if (!(head >> r.s) || !head.eof()) throw ParseError("malformed state", line_no, 1);
    if (!(fields >> r.a)) throw ParseError("malformed action", line_no, 2);
    if (!(fields >> r.next)) throw ParseError("malformed next state", line_no, 3);
    if (!(fields >> r.prob)) throw ParseError("malformed probability", line_no, 4);
    if (!(fields >> r.reward)) throw ParseError("malformed reward", line_no, 5);
    std::string extra;
    if (fields >> extra) throw ParseError("trailing field", line_no, 6);
    if (r.s < 0 || r.a < 0 || r.next < 0) {
      throw ParseError("negative index", line_no, 1);
    }
    max_state = std::max({max_state, r.s, r.next});
    max_action = std::max(max_action, r.a);
    rows.push_back(r);
  }
  if (discount < 0.0) throw ParseError("missing discount line", line_no, 1);
  if (rows.empty()) throw ParseError("no transitions", line_no, 1);
  FiniteMdp mdp(max_state + 1, max_action + 1, discount);
  for (const Row& r : rows) mdp.add_transition(r.s, r.a, r.next, r.prob, r.reward);
  mdp.validate();
  return mdp;
}

FiniteMdp load_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open MDP file '" + path + "'");
  try {
    return parse_mdp(in);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), e.column(), path);
  }
}

QTable::QTable(int num_states, int num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      values_(static_cast<std::size_t>(num_states) * num_actions, 0.0),
      legal_(values_.size(), 1) {}

QTable::QTable(const FiniteMdp& mdp) : QTable(mdp.num_states(), mdp.num_actions()) {
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) legal_[index(s, a)] = mdp.legal(s, a);
  }
}

double QTable::max_value(int s) const {
  const int a = argmax(s);
  return a < 0 ? 0.0 : at(s, a);
}

int QTable::argmax(int s) const {
  int best = -1;
  for (int a = 0; a < num_actions_; ++a) {
    if (!legal(s, a)) continue;
    if (best < 0 || at(s, a) > at(s, best)) best = a;
  }
  return best;
}

double max_norm_distance(const QTable& a, const QTable& b) {
  if (a.values().size() != b.values().size()) {
    throw InvalidArgument("max_norm_distance: shape mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  }
  return d;
}

QTable bellman_backup(const FiniteMdp& mdp, const QTable& q) {
  QTable next(mdp);
  const double discount = mdp.discount();
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      if (!mdp.legal(s, a)) continue;
      double v = 0.0;
      for (int n = 0; n < mdp.num_states(); ++n) {
        const double p = mdp.prob(s, a, n);
        if (p == 0.0) continue;
        v += p * (mdp.reward(s, a, n) + discount * q.max_value(n));
      }
      next.at(s, a) = v;
    }
  }
  return next;
}

double bellman_residual(const FiniteMdp& mdp, const QTable& q) {
  return max_norm_distance(bellman_backup(mdp, q), q);
}

QTable value_iteration(const FiniteMdp& mdp, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("value_iteration: tol must be > 0");
  QTable q(mdp);
  for (long iter = 0; iter < 100'000'000L; ++iter) {
    QTable next = bellman_backup(mdp, q);
    const double change = max_norm_distance(next, q);
    q = std::move(next);
    if (change <= tol) return q;
  }
  throw NumericError("value_iteration did not reach tolerance");
}

void q_learning_step(QTable& q, int s, int a, double r, int next, double alpha,
                     double discount, bool terminal) {
  const double bootstrap = terminal ? 0.0 : q.max_value(next);
  q.at(s, a) += alpha * (r + discount * bootstrap - q.at(s, a));
}

TabularTrainResult train_tabular(const FiniteMdp& mdp,
                                 const TabularTrainConfig& config) {
  if (!(config.epsilon > 0.0 && config.epsilon <= 1.0)) {
    throw ConfigError("train_tabular: epsilon must lie in (0, 1]");
  }
  if (config.episodes < 0) throw ConfigError("train_tabular: episodes must be >= 0");
  if (config.schedule == AlphaSchedule::kConstant &&
      !(config.alpha > 0.0 && config.alpha <= 1.0)) {
    throw ConfigError("train_tabular: alpha must lie in (0, 1]");
  }

  TabularTrainResult result{QTable(mdp), value_iteration(mdp, 1e-10), {}};
  QTable& q = result.q;
  std::vector<int> starts;
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (!mdp.terminal(s)) starts.push_back(s);
  }
  if (starts.empty()) return result;

  std::vector<std::uint64_t> visits(q.values().size(), 0);
  Rng rng(config.seed);
  result.distance.reserve(static_cast<std::size_t>(config.episodes));
  for (int episode = 0; episode < config.episodes; ++episode) {
    int s = starts[rng.uniform_index(starts.size())];
    for (int step = 0; step < config.max_steps && !mdp.terminal(s); ++step) {
      int a = q.argmax(s);
      if (rng.uniform01() < config.epsilon) {
        std::vector<int> legal;
        for (int b = 0; b < mdp.num_actions(); ++b) {
          if (mdp.legal(s, b)) legal.push_back(b);
        }
        a = legal[rng.uniform_index(legal.size())];
      }
      const double u = rng.uniform01();
      int next = mdp.num_states() - 1;
      double cumulative = 0.0;
      for (int n = 0; n < mdp.num_states(); ++n) {
        cumulative += mdp.prob(s, a, n);
        if (u < cumulative) {
          next = n;
          break;
        }
      }
      // Guard against rounding in the cumulative sum landing on a zero row.
      while (mdp.prob(s, a, next) == 0.0 && next > 0) --next;

      const std::size_t slot = static_cast<std::size_t>(s) * mdp.num_actions() + a;
      const double alpha = config.schedule == AlphaSchedule::kHarmonic
                               ? 1.0 / static_cast<double>(++visits[slot])
                               : config.alpha;
      q_learning_step(q, s, a, mdp.reward(s, a, next), next, alpha, mdp.discount(),
                      mdp.terminal(next));
      s = next;
    }
    result.distance.push_back(max_norm_distance(q, result.oracle));
  }
  return result;
}

}  // namespace liftsim
