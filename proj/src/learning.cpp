#include "restrl/learning.hpp"

namespace restrl {

double epsilon_at(double elapsed, double budget,
                  const LearningConfig& config) {
  if (budget <= 0.0) throw ZeroBudget("epsilon schedule needs a budget > 0");
  const double t = elapsed / budget;
  if (t >= 1.0) return config.epsilon_end;
  if (t <= 0.0) return config.epsilon_start;
  return config.epsilon_start +
         t * (config.epsilon_end - config.epsilon_start);
}

std::string select_action(const QTable& table, const std::string& state,
                          const std::vector<std::string>& actions,
                          double epsilon, Rng& rng) {
  if (actions.empty()) throw EmptyActionSet("state " + state);
  if (epsilon > 0.0 && rng.uniform() < epsilon)
    return actions[rng.index(actions.size())];

  double best = table.get(state, actions[0]);
  std::vector<std::size_t> ties{0};
  for (std::size_t i = 1; i < actions.size(); ++i) {
    const double q = table.get(state, actions[i]);
    if (q > best) {
      best = q;
      ties.assign(1, i);
    } else if (q == best) {
      ties.push_back(i);
    }
  }
  if (ties.size() == 1) return actions[ties[0]];
  return actions[ties[rng.index(ties.size())]];
}

TdTrace independent_update(QTable& table, const std::string& state,
                           const std::string& action, double reward,
                           const std::vector<std::string>& next_actions,
                           const LearningConfig& config) {
  TdTrace trace;
  trace.reward = reward;
  trace.old_q = table.get(state, action);
  const double next_max = table.max_over(state, next_actions);
  trace.delta = reward + config.gamma * next_max - trace.old_q;
  trace.new_q = trace.old_q + config.alpha * trace.delta;
  table.set(state, action, trace.new_q);
  return trace;
}

std::vector<TdTrace> joint_update(std::vector<JointParticipant>& participants,
                                  double reward,
                                  const LearningConfig& config) {
  double q_sum = 0.0;
  double next_max_sum = 0.0;
  for (const auto& p : participants) {
    q_sum += p.table->get(p.state, p.action);
    next_max_sum += p.table->max_over(p.state, p.next_actions);
  }
  const double delta = reward + config.gamma * next_max_sum - q_sum;

  std::vector<TdTrace> traces;
  traces.reserve(participants.size());
  for (auto& p : participants) {
    TdTrace trace;
    trace.reward = reward;
    trace.delta = delta;
    trace.old_q = p.table->get(p.state, p.action);
    trace.new_q = trace.old_q + config.alpha * delta;
    p.table->set(p.state, p.action, trace.new_q);
    traces.push_back(trace);
  }
  return traces;
}

}  // namespace restrl
