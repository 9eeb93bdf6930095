#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "restrl/databank.hpp"
#include "restrl/engine.hpp"
#include "restrl/learning.hpp"
#include "restrl/llm.hpp"
#include "restrl/spdg.hpp"
#include "restrl/spec_model.hpp"
#include "restrl/values.hpp"

namespace restrl {

// Operation agent: +2 for 5xx, +1 for 4xx (except 401/405), -1 for 2xx,
// -3 for 401, -10 for 405. Undefined classes (1xx/3xx) are neutral.
int operation_reward(int status);

// Dependency, parameter, and value agents share one signal: +2 for 2xx,
// -2 for 4xx, -1 for 5xx, neutral otherwise.
int shared_reward(int status);

struct AgentOptions {
  bool llm_enabled = true;
  // learning disabled means the Q-tables are never written, so the
  // similarity seeding of the dependency agent is skipped as well
  bool seed_dependency_q = true;
  std::size_t max_parameter_combinations = 10;
};

struct ParameterCombination {
  std::vector<std::string> names;  // in operation parameter order
  std::string key;                 // canonical comma-joined names
};

// Candidate parameter combinations for one operation: the required-only and
// all-parameters sets always appear; fills the remaining slots (cap 10) with
// distinct random supersets of the required set, or enumerates everything
// when the space is small.
std::vector<ParameterCombination> parameter_action_space(
    const OperationNode& op, std::size_t cap, Rng& rng);

// Where a dependency-sourced value came from.
struct DependencyChoice {
  std::string consumer_op;
  std::string consumer_field;
  ConsumerLocation consumer_location = ConsumerLocation::Query;
  std::string producer_op;
  std::string producer_field;
  ProducerTarget producer_target = ProducerTarget::Response;
  bool via_random_query = false;  // exploration pick without a graph edge
};

// The four Q-tables plus the static action-space data derived from the spec.
class AgentSet {
 public:
  AgentSet(const ApiSpec& spec, const Spdg& graph, const AgentOptions& options,
           Rng& rng);

  static const std::string kOperationState;

  QTable operation_q;
  QTable parameter_q;
  QTable value_q;
  QTable dependency_q;

  const std::vector<std::string>& operation_actions() const { return op_ids_; }
  const std::vector<ParameterCombination>& combinations(
      const std::string& op_id) const;
  const std::vector<std::string>& combination_keys(
      const std::string& op_id) const;
  const std::vector<std::string>& value_actions(const std::string& op_id,
                                                const std::string& param) const;

  static std::string value_state_key(const std::string& op_id,
                                     const std::string& param);
  static std::string dependency_state_key(const std::string& op,
                                          const std::string& field,
                                          ConsumerLocation loc);
  static std::string dependency_action_key(const std::string& op,
                                           const std::string& field,
                                           ProducerTarget target);

  void seed_dependency_entry(const SpdgEdge& edge);

  const AgentOptions& options() const { return options_; }

 private:
  AgentOptions options_;
  std::vector<std::string> op_ids_;
  std::map<std::string, std::vector<ParameterCombination>> combos_;
  std::map<std::string, std::vector<std::string>> combo_keys_;
  std::map<std::string, std::vector<std::string>> value_actions_;
  std::vector<std::string> no_actions_;
};

struct PlanContext {
  const ApiSpec& spec;
  Spdg& graph;
  const DataBank& bank;
  LlmValueService& llm;
  RandomPolicy random_policy;
  bool spdg_enabled = true;
};

// Pick an operation, a parameter combination, a source per parameter, and
// resolve concrete values. DEPENDENCY choices that cannot be satisfied fall
// back to LLM (when enabled) and then RANDOM; the executed source is what
// later gets credited.
RequestPlan choose_plan(AgentSet& agents, PlanContext& ctx, double epsilon,
                        Rng& rng);

// Uniform pick among the stored values behind a dependency choice; the
// lookup contract guarantees the store is non-empty.
Json databank_value(const DataBank& bank, const DependencyChoice& choice,
                    Rng& rng);

// Resolve one consumer field through the graph (exploitation) or through a
// uniformly random store pick (exploration). Returns nothing when no values
// exist anywhere or the consumer is outside the dependency taxonomy.
std::optional<DependencyChoice> dependency_lookup(
    AgentSet& agents, Spdg& graph, const DataBank& bank,
    const std::string& consumer_op, const std::string& field,
    ParamLocation location, double epsilon, bool spdg_enabled, Rng& rng);

struct FeedbackOptions {
  bool learning_enabled = true;
  bool spdg_enabled = true;
};

struct JointTraceEntry {
  std::string agent;  // "parameter" | "value" | "dependency"
  std::string state;
  std::string action;
  TdTrace trace;
};

struct FeedbackTrace {
  std::optional<TdTrace> operation_trace;
  std::vector<JointTraceEntry> joint;
  int edges_refined = 0;
  int edges_discovered = 0;
  bool databank_written = false;
};

// Update every agent that acted, refine used edges, write the data bank, and
// evaluate undocumented response fields for new dependencies.
FeedbackTrace apply_feedback(AgentSet& agents, Spdg& graph, DataBank& bank,
                             const ApiSpec& spec, const EmbeddingTable& table,
                             const RequestPlan& plan,
                             const ResponseRecord& response,
                             const LearningConfig& config,
                             const FeedbackOptions& options);

}  // namespace restrl
