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
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "liftsim/error.hpp"
#include "liftsim/qcore.hpp"
#include "liftsim/rng.hpp"
#include "test_util.hpp"

namespace liftsim {
namespace {

FiniteMdp two_state(double discount) {
  FiniteMdp m(2, 2, discount);
  m.add_transition(0, 0, 1, 1.0, 1.0);
  m.add_transition(0, 1, 0, 1.0, 0.0);
  m.add_transition(1, 0, 0, 1.0, 0.0);
  m.add_transition(1, 1, 1, 1.0, 0.0);
  return m;
}

// Random MDP with dense random transition rows; some actions illegal.
FiniteMdp random_mdp(Rng& rng, double discount) {
  const int ns = 2 + static_cast<int>(rng.uniform_index(5));
  const int na = 1 + static_cast<int>(rng.uniform_index(4));
  FiniteMdp m(ns, na, discount);
  for (int s = 0; s < ns; ++s) {
    for (int a = 0; a < na; ++a) {
      if (a > 0 && rng.uniform_index(4) == 0) continue;
      std::vector<double> w(ns);
      double total = 0.0;
      for (double& x : w) total += (x = rng.uniform01());
      double assigned = 0.0;
      for (int n = 0; n < ns; ++n) {
        const double p = n + 1 == ns ? 1.0 - assigned : w[n] / total;
        assigned += p;
        m.add_transition(s, a, n, p, 4.0 * rng.uniform01() - 2.0);
      }
    }
  }
  return m;
}

// Independent oracle: iterate the expectation written out longhand until it
// stops moving, without the library's backup routine.
std::vector<double> brute_force_q(const FiniteMdp& m, int sweeps) {
  std::vector<double> q(static_cast<std::size_t>(m.num_states()) * m.num_actions(), 0.0);
  for (int it = 0; it < sweeps; ++it) {
    std::vector<double> next(q.size(), 0.0);
    for (int s = 0; s < m.num_states(); ++s) {
      for (int a = 0; a < m.num_actions(); ++a) {
        if (!m.legal(s, a)) continue;
        double v = 0.0;
        for (int n = 0; n < m.num_states(); ++n) {
          double best = 0.0;
          bool any = false;
          for (int b = 0; b < m.num_actions(); ++b) {
            if (!m.legal(n, b)) continue;
            const double x = q[n * m.num_actions() + b];
            if (!any || x > best) best = x;
            any = true;
          }
          v += m.prob(s, a, n) * (m.reward(s, a, n) + m.discount() * best);
        }
        next[s * m.num_actions() + a] = v;
      }
    }
    q = next;
  }
  return q;
}

TEST_CASE("value iteration: closed form on the two-state MDP") {
  const QTable q = value_iteration(two_state(0.5), 1e-12);
  // go from s0 collects 1 every other step: 1 / (1 - 0.25).
  CHECK(q.at(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-11));
  CHECK(q.at(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  CHECK(q.at(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  CHECK(q.at(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
  const auto oracle = brute_force_q(two_state(0.5), 200);
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a) CHECK(std::abs(q.at(s, a) - oracle[s * 2 + a]) < 1e-11);
}

TEST_CASE("value iteration: zero discount is the one-step expectation") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteMdp m = random_mdp(rng, 0.0);
    const QTable q = value_iteration(m, 1e-12);
    for (int s = 0; s < m.num_states(); ++s) {
      for (int a = 0; a < m.num_actions(); ++a) {
        if (!m.legal(s, a)) continue;
        double expected = 0.0;
        for (int n = 0; n < m.num_states(); ++n) expected += m.prob(s, a, n) * m.reward(s, a, n);
        CHECK(q.at(s, a) == doctest::Approx(expected).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("value iteration: all-zero rewards give zero") {
  FiniteMdp m(3, 2, 0.9);
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a) m.add_transition(s, a, (s + a) % 3, 1.0, 0.0);
  const QTable q = value_iteration(m, 1e-10);
  for (double v : q.values()) CHECK(v == 0.0);
}

TEST_CASE("property: value iteration is a fixed point and matches brute force") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const double discount = 0.9 * rng.uniform01();
    const FiniteMdp m = random_mdp(rng, discount);
    const double tol = 1e-10;
    const QTable q = value_iteration(m, tol);
    CHECK(bellman_residual(m, q) <= tol);
    CHECK(max_norm_distance(bellman_backup(m, q), q) <= tol);
    const auto oracle = brute_force_q(m, 2000);
    for (int s = 0; s < m.num_states(); ++s)
      for (int a = 0; a < m.num_actions(); ++a)
        CHECK(std::abs(q.at(s, a) - oracle[s * m.num_actions() + a]) < 1e-8);
  }
}

TEST_CASE("property: reward scaling scales Q and keeps greedy actions") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const FiniteMdp m = random_mdp(rng, 0.8);
    const double c = 0.1 + 10.0 * rng.uniform01();
    FiniteMdp scaled(m.num_states(), m.num_actions(), m.discount());
    for (int s = 0; s < m.num_states(); ++s)
      for (int a = 0; a < m.num_actions(); ++a)
        for (int n = 0; n < m.num_states(); ++n)
          if (m.legal(s, a)) scaled.add_transition(s, a, n, m.prob(s, a, n), c * m.reward(s, a, n));
    const QTable q = value_iteration(m, 1e-12);
    const QTable qc = value_iteration(scaled, 1e-12);
    for (int s = 0; s < m.num_states(); ++s) {
      for (int a = 0; a < m.num_actions(); ++a) {
        if (!m.legal(s, a)) continue;
        CHECK(qc.at(s, a) == doctest::Approx(c * q.at(s, a)).epsilon(1e-8).scale(1.0));
      }
      // Argmax sets: compare every action's membership up to rounding.
      const double best = q.max_value(s), best_c = qc.max_value(s);
      for (int a = 0; a < m.num_actions(); ++a) {
        if (!m.legal(s, a)) continue;
        const bool in = best - q.at(s, a) < 1e-9;
        const bool in_c = best_c - qc.at(s, a) < 1e-9 * c;
        CHECK(in == in_c);
      }
    }
  }
}

TEST_CASE("q_learning_step examples") {
  QTable q(2, 2);
  q_learning_step(q, 0, 1, 5.0, 1, 1.0, 0.9);
  CHECK(q.at(0, 1) == 5.0);

  QTable same(2, 2);
  same.at(0, 0) = 3.0;
  q_learning_step(same, 0, 0, 7.0, 1, 0.0, 0.9);
  CHECK(same.at(0, 0) == 3.0);

  QTable h(2, 2);
  h.at(0, 0) = 2.0;
  h.at(1, 1) = 4.0;
  q_learning_step(h, 0, 0, 1.0, 1, 0.5, 0.5);
  CHECK(h.at(0, 0) == 2.5);

  QTable t(2, 2);
  t.at(1, 0) = 100.0;
  q_learning_step(t, 0, 0, 1.0, 1, 1.0, 0.9, /*terminal=*/true);
  CHECK(t.at(0, 0) == 1.0);
}

TEST_CASE("property: q_learning_step changes only the updated entry, by the rule") {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    QTable q(4, 3);
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 3; ++a) q.at(s, a) = 10.0 * rng.uniform01() - 5.0;
    const QTable before = q;
    const int s = static_cast<int>(rng.uniform_index(4));
    const int a = static_cast<int>(rng.uniform_index(3));
    const int n = static_cast<int>(rng.uniform_index(4));
    const double r = 4.0 * rng.uniform01() - 2.0;
    const double alpha = rng.uniform01();
    const double discount = 0.99 * rng.uniform01();
    q_learning_step(q, s, a, r, n, alpha, discount);
    const double max_next =
        std::max({before.at(n, 0), before.at(n, 1), before.at(n, 2)});
    const double expected = before.at(s, a) + alpha * (r + discount * max_next - before.at(s, a));
    for (int x = 0; x < 4; ++x) {
      for (int b = 0; b < 3; ++b) {
        if (x == s && b == a) {
          CHECK(q.at(x, b) == doctest::Approx(expected).epsilon(1e-15));
        } else {
          CHECK(q.at(x, b) == before.at(x, b));
        }
      }
    }
  }
}

TEST_CASE("argmax ties break to the lowest legal index") {
  FiniteMdp m(1, 3, 0.5);
  m.add_transition(0, 1, 0, 1.0, 0.0);
  m.add_transition(0, 2, 0, 1.0, 0.0);
  QTable q(m);
  CHECK(q.argmax(0) == 1);
  q.at(0, 0) = 100.0;  // illegal entries never win
  CHECK(q.argmax(0) == 1);
  CHECK(q.max_value(0) == 0.0);
}

TEST_CASE("train_tabular: zero episodes leaves the table at zero") {
  TabularTrainConfig cfg;
  cfg.episodes = 0;
  const auto r = train_tabular(two_state(0.5), cfg);
  for (double v : r.q.values()) CHECK(v == 0.0);
  CHECK(r.distance.empty());
}

TEST_CASE("train_tabular: two-state MDP converges") {
  TabularTrainConfig cfg;
  cfg.seed = 11;
  const auto r = train_tabular(two_state(0.5), cfg);
  CHECK(r.distance.back() < 0.05);
  CHECK(r.distance.size() == 10000);
}

TEST_CASE("train_tabular: single state converges to 1 / (1 - discount)") {
  FiniteMdp m(1, 1, 0.5);
  m.add_transition(0, 0, 0, 1.0, 1.0);
  TabularTrainConfig cfg;
  cfg.episodes = 500;
  const auto r = train_tabular(m, cfg);
  CHECK(r.q.at(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("train_tabular rejects bad parameters") {
  TabularTrainConfig cfg;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(train_tabular(two_state(0.5), cfg), ConfigError);
  cfg.epsilon = 0.2;
  cfg.alpha = 1.5;
  CHECK_THROWS_AS(train_tabular(two_state(0.5), cfg), ConfigError);
}

// Deterministic MDPs with nonnegative rewards approach q* from below, so the
// smoothed distance never increases. Stochastic transitions add sampling
// noise of a few 1e-3, which the slack absorbs.
TEST_CASE("property: smoothed distance to the oracle is nonincreasing") {
  struct Case {
    const char* file;
    AlphaSchedule schedule;
    double slack;
  };
  const Case cases[] = {{"data/mdps/two_state.mdp", AlphaSchedule::kConstant, 0.0},
                        {"data/mdps/single_state.mdp", AlphaSchedule::kConstant, 0.0},
                        {"data/mdps/slippery_chain.mdp", AlphaSchedule::kHarmonic, 0.005}};
  for (const Case& c : cases) {
    const FiniteMdp m = load_mdp_file(testing::data_path(c.file));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      TabularTrainConfig cfg;
      cfg.seed = seed;
      cfg.schedule = c.schedule;
      const auto r = train_tabular(m, cfg);
      double prev = 1e300;
      for (std::size_t w = 9; (w + 1) * 100 <= r.distance.size(); ++w) {
        double mean = 0.0;
        for (std::size_t i = w * 100; i < (w + 1) * 100; ++i) mean += r.distance[i];
        mean /= 100.0;
        INFO(c.file << " seed " << seed << " window " << w);
        REQUIRE(mean <= prev + c.slack);
        prev = mean;
      }
    }
  }
}

TEST_CASE("mdp text format") {
  std::istringstream in("# comment\ndiscount 0.5\n0 0 1 1.0 1.0  # go\n1 0 0 1 0\n");
  const FiniteMdp m = parse_mdp(in);
  CHECK(m.num_states() == 2);
  CHECK(m.num_actions() == 1);
  CHECK(m.discount() == 0.5);
  CHECK(m.prob(0, 0, 1) == 1.0);
  CHECK(m.reward(0, 0, 1) == 1.0);

  std::istringstream missing("0 0 1 1.0 1.0\n");
  CHECK_THROWS_AS(parse_mdp(missing), ParseError);
  std::istringstream bad_row("discount 0.5\n0 0 1 abc 1.0\n");
  try {
    parse_mdp(bad_row);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 4);
  }
  std::istringstream unnormalized("discount 0.5\n0 0 1 0.6 1.0\n0 0 0 0.3 0\n");
  CHECK_THROWS_AS(parse_mdp(unnormalized), ConfigError);
  CHECK_THROWS_AS(load_mdp_file("/nonexistent.mdp"), IoError);
}

TEST_CASE("bundled MDPs load and validate") {
  for (const char* f : {"two_state.mdp", "single_state.mdp", "slippery_chain.mdp"}) {
    const FiniteMdp m = load_mdp_file(testing::data_path(std::string("data/mdps/") + f));
    CHECK_NOTHROW(m.validate());
    CHECK(m.discount() < 1.0);
  }
}

}  // namespace
}  // namespace liftsim
