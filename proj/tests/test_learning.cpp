#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "restrl/learning.hpp"

using namespace restrl;

TEST_CASE("epsilon schedule endpoints and midpoint") {
  LearningConfig config;
  CHECK(epsilon_at(0, 100, config) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(epsilon_at(100, 100, config) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(epsilon_at(50, 100, config) == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(epsilon_at(200, 100, config) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(epsilon_at(1, 0, config), ZeroBudget);
}

TEST_CASE("select_action: pure exploitation picks the argmax") {
  QTable table;
  table.set("s", "a", 0.3);
  table.set("s", "b", 0.1);
  Rng rng(1);
  for (int i = 0; i < 100; ++i)
    CHECK(select_action(table, "s", {"a", "b"}, 0.0, rng) == "a");
}

TEST_CASE("select_action: empty action set throws") {
  QTable table;
  Rng rng(1);
  CHECK_THROWS_AS(select_action(table, "s", {}, 0.5, rng), EmptyActionSet);
}

TEST_CASE("select_action: epsilon=1 explores uniformly (seeded stream)") {
  QTable table;
  table.set("s", "a", 5.0);  // should not matter under pure exploration
  Rng rng(42);
  std::map<std::string, int> freq;
  const std::vector<std::string> actions{"a", "b", "c", "d"};
  for (int i = 0; i < 10000; ++i)
    ++freq[select_action(table, "s", actions, 1.0, rng)];
  for (const auto& a : actions) {
    CHECK(freq[a] >= 2350);
    CHECK(freq[a] <= 2650);
  }
}

TEST_CASE("select_action: ties break uniformly under exploitation") {
  QTable table;  // all Q equal (0)
  Rng rng(7);
  std::map<std::string, int> freq;
  const std::vector<std::string> actions{"a", "b", "c", "d"};
  for (int i = 0; i < 10000; ++i)
    ++freq[select_action(table, "s", actions, 0.0, rng)];
  for (const auto& a : actions) {
    CHECK(freq[a] >= 2350);
    CHECK(freq[a] <= 2650);
  }
}

TEST_CASE("independent_update hand arithmetic") {
  LearningConfig config;  // alpha 0.1, gamma 0.9

  SUBCASE("fresh state, reward +2") {
    QTable table;
    const auto trace = independent_update(table, "s", "a", 2.0, {"a"}, config);
    CHECK(trace.delta == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(table.get("s", "a") == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("Q=1 everywhere, reward 0") {
    QTable table;
    table.set("s", "a", 1.0);
    const auto trace = independent_update(table, "s", "a", 0.0, {"a"}, config);
    // delta = 0 + 0.9*1 - 1 = -0.1; new Q = 1 - 0.01 = 0.99
    CHECK(trace.delta == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(table.get("s", "a") == doctest::Approx(0.99).epsilon(1e-12));
  }

  SUBCASE("alpha=0 leaves Q unchanged") {
    LearningConfig frozen;
    frozen.alpha = 0.0;
    QTable table;
    table.set("s", "a", 0.4);
    independent_update(table, "s", "a", 123.0, {"a"}, frozen);
    CHECK(table.get("s", "a") == 0.4);
  }
}

TEST_CASE("joint_update hand arithmetic") {
  LearningConfig config;

  SUBCASE("three agents at zero, reward +2") {
    QTable t1, t2, t3;
    std::vector<JointParticipant> parts = {
        {&t1, "s1", "a", {"a"}}, {&t2, "s2", "b", {"b"}}, {&t3, "s3", "c", {"c"}}};
    const auto traces = joint_update(parts, 2.0, config);
    REQUIRE(traces.size() == 3);
    for (const auto& tr : traces) {
      CHECK(tr.delta == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(tr.new_q == doctest::Approx(0.2).epsilon(1e-12));
    }
  }

  SUBCASE("sums 0.6 with zero reward") {
    QTable t1, t2;
    t1.set("s1", "a", 0.4);
    t2.set("s2", "b", 0.2);
    std::vector<JointParticipant> parts = {{&t1, "s1", "a", {"a"}},
                                           {&t2, "s2", "b", {"b"}}};
    const auto traces = joint_update(parts, 0.0, config);
    // delta = 0 + 0.9*0.6 - 0.6 = -0.06; each Q moves by alpha*delta = -0.006
    for (const auto& tr : traces)
      CHECK(tr.delta == doctest::Approx(-0.06).epsilon(1e-12));
    CHECK(t1.get("s1", "a") == doctest::Approx(0.394).epsilon(1e-12));
    CHECK(t2.get("s2", "b") == doctest::Approx(0.194).epsilon(1e-12));
  }

  SUBCASE("single participant equals independent_update") {
    QTable a, b;
    a.set("s", "x", 0.37);
    b.set("s", "x", 0.37);
    a.set("s", "y", -0.2);
    b.set("s", "y", -0.2);
    std::vector<JointParticipant> parts = {{&a, "s", "x", {"x", "y"}}};
    const auto joint = joint_update(parts, 1.5, config);
    const auto indep = independent_update(b, "s", "x", 1.5, {"x", "y"}, config);
    CHECK(joint[0].delta == indep.delta);
    CHECK(a.get("s", "x") == b.get("s", "x"));
  }
}

TEST_CASE("every trace satisfies new_q - old_q = alpha * delta") {
  LearningConfig config;
  Rng rng(99);
  QTable table;
  for (int i = 0; i < 2000; ++i) {
    const std::string s = "s" + std::to_string(rng.index(5));
    const std::string a = "a" + std::to_string(rng.index(4));
    const double r = rng.real_range(-10, 10);
    const auto trace =
        independent_update(table, s, a, r, {"a0", "a1", "a2", "a3"}, config);
    CHECK(std::abs((trace.new_q - trace.old_q) - config.alpha * trace.delta) <
          1e-12);
  }
}

TEST_CASE("bounded rewards keep Q within r_max/(1-gamma)") {
  LearningConfig config;  // gamma 0.9 -> bound 10/0.1 = 100
  Rng rng(4242);
  QTable table;
  const std::vector<std::string> actions{"a", "b", "c"};
  for (int i = 0; i < 100000; ++i) {
    const std::string s = "s" + std::to_string(rng.index(3));
    const auto& a = actions[rng.index(actions.size())];
    const double r = rng.real_range(-10, 10);
    independent_update(table, s, a, r, actions, config);
  }
  for (const auto& [state, row] : table.entries())
    for (const auto& [action, q] : row) {
      CHECK(q <= 100.0 + 1e-9);
      CHECK(q >= -100.0 - 1e-9);
      CHECK(std::isfinite(q));
    }
}

TEST_CASE("argmax is invariant under positive affine scaling") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    QTable base, scaled;
    const std::vector<std::string> actions{"a", "b", "c", "d", "e"};
    const double scale = rng.real_range(0.1, 10.0);
    const double shift = rng.real_range(-5.0, 5.0);
    for (const auto& a : actions) {
      const double q = rng.real_range(-3, 3);
      base.set("s", a, q);
      scaled.set("s", a, scale * q + shift);
    }
    Rng r1(trial), r2(trial);
    CHECK(select_action(base, "s", actions, 0.0, r1) ==
          select_action(scaled, "s", actions, 0.0, r2));
  }
}

TEST_CASE("decomposition: max of joint sums equals sum of per-agent maxima") {
  Rng rng(555);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n_agents = 1 + rng.index(4);
    std::vector<std::vector<double>> qs(n_agents);
    for (auto& row : qs) {
      const std::size_t n_actions = 1 + rng.index(6);
      for (std::size_t i = 0; i < n_actions; ++i)
        row.push_back(rng.real_range(-5, 5));
    }
    // brute force over the Cartesian product of action choices
    std::vector<std::size_t> idx(n_agents, 0);
    double joint_max = -1e300;
    while (true) {
      double sum = 0;
      for (std::size_t i = 0; i < n_agents; ++i) sum += qs[i][idx[i]];
      joint_max = std::max(joint_max, sum);
      std::size_t k = 0;
      while (k < n_agents && ++idx[k] == qs[k].size()) idx[k++] = 0;
      if (k == n_agents) break;
    }
    double sum_of_maxima = 0;
    for (const auto& row : qs) {
      double m = row[0];
      for (const double q : row) m = std::max(m, q);
      sum_of_maxima += m;
    }
    CHECK(joint_max == sum_of_maxima);  // exact
  }
}
