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

#ifndef LIFTSIM_QCORE_HPP_
#define LIFTSIM_QCORE_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace liftsim {

// Finite MDP (S, A, P_a, R_a) with a per-state legality mask. States without
// legal actions are terminal.
class FiniteMdp {
 public:
  FiniteMdp(int num_states, int num_actions, double discount);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double discount() const { return discount_; }

  bool legal(int s, int a) const { return legal_[index(s, a)] != 0; }
  bool terminal(int s) const;
  double prob(int s, int a, int next) const {
    return prob_[index(s, a) * num_states_ + next];
  }
  double reward(int s, int a, int next) const {
    return reward_[index(s, a) * num_states_ + next];
  }

  // Adds probability mass for (s, a) -> next and marks (s, a) legal.
  void add_transition(int s, int a, int next, double prob, double reward);

  // Throws ConfigError unless every legal row sums to 1 within 1e-12 and all
  // probabilities lie in [0, 1].
  void validate() const;

 private:
  std::size_t index(int s, int a) const {
    return static_cast<std::size_t>(s) * num_actions_ + a;
  }

  int num_states_;
  int num_actions_;
  double discount_;
  std::vector<std::uint8_t> legal_;
  std::vector<double> prob_;
  std::vector<double> reward_;
};

// Plain text: `discount <value>` plus lines `s a s' prob reward`; `#` starts a
// comment. State and action ids are 0-based.
FiniteMdp parse_mdp(std::istream& in);
FiniteMdp load_mdp_file(const std::string& path);

class QTable {
 public:
  QTable(int num_states, int num_actions);
  // Shape and legality copied from `mdp`, values zero.
  explicit QTable(const FiniteMdp& mdp);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double& at(int s, int a) { return values_[index(s, a)]; }
  double at(int s, int a) const { return values_[index(s, a)]; }
  bool legal(int s, int a) const { return legal_[index(s, a)] != 0; }

  // Max over legal actions, 0 when the state has none.
  double max_value(int s) const;
  // Lowest-index legal maximizer, -1 when the state has none.
  int argmax(int s) const;

  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t index(int s, int a) const {
    return static_cast<std::size_t>(s) * num_actions_ + a;
  }

  int num_states_;
  int num_actions_;
  std::vector<double> values_;
  std::vector<std::uint8_t> legal_;
};

double max_norm_distance(const QTable& a, const QTable& b);

// One synchronous Bellman optimality backup.
QTable bellman_backup(const FiniteMdp& mdp, const QTable& q);
double bellman_residual(const FiniteMdp& mdp, const QTable& q);

// Iterates backups until successive tables differ by at most `tol` in max
// norm; the result's Bellman residual is then at most discount * tol.
QTable value_iteration(const FiniteMdp& mdp, double tol);

// Q(s,a) += alpha * (r + discount * max_a' Q(s',a') - Q(s,a)); the bootstrap
// is 0 when `terminal` is set or s' has no legal action.
void q_learning_step(QTable& q, int s, int a, double r, int next, double alpha,
                     double discount, bool terminal = false);

enum class AlphaSchedule { kConstant, kHarmonic };

struct TabularTrainConfig {
  int episodes = 10000;
  double epsilon = 0.2;
  double alpha = 0.1;
  AlphaSchedule schedule = AlphaSchedule::kConstant;
  int max_steps = 100;
  std::uint64_t seed = 0;
};

struct TabularTrainResult {
  QTable q;
  QTable oracle;
  // Max-norm distance to the oracle after each episode.
  std::vector<double> distance;
};

// Epsilon-greedy Q-learning. Episodes start from a uniformly drawn
// non-terminal state and run until a terminal state or `max_steps`.
TabularTrainResult train_tabular(const FiniteMdp& mdp,
                                 const TabularTrainConfig& config);

}  // namespace liftsim

#endif  // LIFTSIM_QCORE_HPP_
