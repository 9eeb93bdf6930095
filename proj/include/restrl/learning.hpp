#pragma once

#include <map>
#include <string>
#include <vector>

#include "restrl/errors.hpp"
#include "restrl/rng.hpp"

namespace restrl {

struct LearningConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
};

// State -> action -> expected cumulative reward. Absent entries read as 0.
class QTable {
 public:
  double get(const std::string& state, const std::string& action) const {
    auto s = entries_.find(state);
    if (s == entries_.end()) return 0.0;
    auto a = s->second.find(action);
    return a == s->second.end() ? 0.0 : a->second;
  }

  void set(const std::string& state, const std::string& action, double q) {
    entries_[state][action] = q;
  }

  void add(const std::string& state, const std::string& action, double dq) {
    entries_[state][action] = get(state, action) + dq;
  }

  double max_over(const std::string& state,
                  const std::vector<std::string>& actions) const {
    double best = 0.0;
    bool first = true;
    for (const auto& a : actions) {
      const double q = get(state, a);
      if (first || q > best) { best = q; first = false; }
    }
    return first ? 0.0 : best;
  }

  const std::map<std::string, std::map<std::string, double>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::map<std::string, double>> entries_;
};

struct TdTrace {
  double reward = 0.0;
  double delta = 0.0;
  double old_q = 0.0;
  double new_q = 0.0;
};

// Linear decay from epsilon_start at 0 to epsilon_end at budget; clamped
// afterwards. Units are whatever drives the session (seconds or requests).
double epsilon_at(double elapsed, double budget, const LearningConfig& config);

// Epsilon-greedy: random action with probability epsilon, otherwise argmax
// with uniform tie-breaking through the same RNG.
std::string select_action(const QTable& table, const std::string& state,
                          const std::vector<std::string>& actions,
                          double epsilon, Rng& rng);

// One-agent TD step: delta = r + gamma * max_a' Q(s', a') - Q(s, a).
// Stateless agents pass their own action set as next_actions (s' = s).
TdTrace independent_update(QTable& table, const std::string& state,
                           const std::string& action, double reward,
                           const std::vector<std::string>& next_actions,
                           const LearningConfig& config);

// One acting (table, state, action) component of a value-decomposed update.
struct JointParticipant {
  QTable* table;
  std::string state;
  std::string action;
  std::vector<std::string> next_actions;
};

// Value-decomposition TD step: the shared delta uses the sum of per-agent
// Q-values and the sum of per-agent next-state maxima; every participant
// applies the same alpha * delta.
std::vector<TdTrace> joint_update(std::vector<JointParticipant>& participants,
                                  double reward, const LearningConfig& config);

}  // namespace restrl
