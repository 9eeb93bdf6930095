#include "restrl/agents.hpp"

#include <algorithm>

namespace restrl {

int operation_reward(int status) {
  if (status == 401) return -3;
  if (status == 405) return -10;
  if (status >= 500 && status <= 599) return 2;
  if (status >= 400 && status <= 499) return 1;
  if (status >= 200 && status <= 299) return -1;
  return 0;
}

int shared_reward(int status) {
  if (status >= 200 && status <= 299) return 2;
  if (status >= 400 && status <= 499) return -2;
  if (status >= 500 && status <= 599) return -1;
  return 0;
}

namespace {

std::vector<std::string> unique_parameter_names(const OperationNode& op,
                                                std::set<std::string>* required_out) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& p : op.parameters) {
    if (!seen.insert(p.name).second) continue;
    names.push_back(p.name);
    if (p.required && required_out) required_out->insert(p.name);
  }
  return names;
}

std::string combo_key_for(const std::vector<std::string>& names) {
  std::string key;
  for (const auto& n : names) {
    if (!key.empty()) key += ',';
    key += n;
  }
  return key;
}

}  // namespace

std::vector<ParameterCombination> parameter_action_space(
    const OperationNode& op, std::size_t cap, Rng& rng) {
  std::set<std::string> required;
  const auto available = unique_parameter_names(op, &required);
  std::vector<std::string> optional;
  for (const auto& n : available)
    if (!required.count(n)) optional.push_back(n);

  auto make_combo = [&](std::uint64_t mask) {
    ParameterCombination combo;
    for (const auto& n : available) {
      if (required.count(n)) {
        combo.names.push_back(n);
        continue;
      }
      const auto idx = static_cast<std::size_t>(
          std::find(optional.begin(), optional.end(), n) - optional.begin());
      if (mask & (1ull << idx)) combo.names.push_back(n);
    }
    combo.key = combo_key_for(combo.names);
    return combo;
  };

  std::vector<ParameterCombination> out;
  if (optional.size() <= 20 && (1ull << optional.size()) <= cap) {
    for (std::uint64_t mask = 0; mask < (1ull << optional.size()); ++mask)
      out.push_back(make_combo(mask));
    return out;
  }

  std::set<std::uint64_t> masks;
  masks.insert(0);  // required only
  const std::uint64_t all =
      optional.size() >= 64 ? ~0ull : (1ull << optional.size()) - 1;
  masks.insert(all);
  out.push_back(make_combo(0));
  out.push_back(make_combo(all));
  while (out.size() < cap) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < optional.size() && i < 64; ++i)
      if (rng.coin()) mask |= (1ull << i);
    if (masks.insert(mask).second) out.push_back(make_combo(mask));
  }
  return out;
}

const std::string AgentSet::kOperationState = "$operations";

AgentSet::AgentSet(const ApiSpec& spec, const Spdg& graph,
                   const AgentOptions& options, Rng& rng)
    : options_(options) {
  for (const auto& op : spec.operations) {
    op_ids_.push_back(op.id);
    auto combos =
        parameter_action_space(op, options.max_parameter_combinations, rng);
    std::vector<std::string> keys;
    for (const auto& c : combos) keys.push_back(c.key);
    combos_[op.id] = std::move(combos);
    combo_keys_[op.id] = std::move(keys);

    std::set<std::string> seen;
    for (const auto& p : op.parameters) {
      if (!seen.insert(p.name).second) continue;
      std::vector<std::string> actions;
      if (consumer_location_of(p.location))
        actions.push_back(to_string(ValueSource::Dependency));
      if (options.llm_enabled) actions.push_back(to_string(ValueSource::Llm));
      actions.push_back(to_string(ValueSource::Random));
      value_actions_[value_state_key(op.id, p.name)] = std::move(actions);
    }
  }
  if (options.seed_dependency_q)
    for (const auto& e : graph.edges) seed_dependency_entry(e);
}

const std::vector<ParameterCombination>& AgentSet::combinations(
    const std::string& op_id) const {
  static const std::vector<ParameterCombination> empty;
  auto it = combos_.find(op_id);
  return it == combos_.end() ? empty : it->second;
}

const std::vector<std::string>& AgentSet::combination_keys(
    const std::string& op_id) const {
  auto it = combo_keys_.find(op_id);
  return it == combo_keys_.end() ? no_actions_ : it->second;
}

const std::vector<std::string>& AgentSet::value_actions(
    const std::string& op_id, const std::string& param) const {
  auto it = value_actions_.find(value_state_key(op_id, param));
  return it == value_actions_.end() ? no_actions_ : it->second;
}

std::string AgentSet::value_state_key(const std::string& op_id,
                                      const std::string& param) {
  return op_id + "#" + param;
}

std::string AgentSet::dependency_state_key(const std::string& op,
                                           const std::string& field,
                                           ConsumerLocation loc) {
  return op + "#" + field + "@" + to_string(loc);
}

std::string AgentSet::dependency_action_key(const std::string& op,
                                            const std::string& field,
                                            ProducerTarget target) {
  return op + "#" + field + "@" + to_string(target);
}

void AgentSet::seed_dependency_entry(const SpdgEdge& edge) {
  const auto state = dependency_state_key(edge.consumer_op, edge.consumer_field,
                                          edge.consumer_location);
  const auto action = dependency_action_key(edge.producer_op,
                                            edge.producer_field,
                                            edge.producer_target);
  if (dependency_q.get(state, action) == 0.0)
    dependency_q.set(state, action, edge.similarity);
}

Json databank_value(const DataBank& bank, const DependencyChoice& choice,
                    Rng& rng) {
  const auto* stored = bank.values(choice.producer_op, choice.producer_target,
                                   choice.producer_field);
  if (!stored || stored->empty())
    throw EmptyStore("no stored values for " + choice.producer_op + "." +
                     choice.producer_field);
  return (*stored)[rng.index(stored->size())];
}

std::optional<DependencyChoice> dependency_lookup(
    AgentSet& agents, Spdg& graph, const DataBank& bank,
    const std::string& consumer_op, const std::string& field,
    ParamLocation location, double epsilon, bool spdg_enabled, Rng& rng) {
  const auto loc = consumer_location_of(location);
  if (!loc) return std::nullopt;  // header parameters stay outside the taxonomy
  if (bank.empty()) return std::nullopt;

  const auto state = AgentSet::dependency_state_key(consumer_op, field, *loc);
  const bool explore = epsilon > 0.0 && rng.uniform() < epsilon;

  if (!explore) {
    // exploitation candidates: with the graph, the unpruned edges for this
    // consumer; without it, the producers this state has already tried
    // (its Q-table rows) — either way only producers with stored values
    std::vector<const SpdgEdge*> candidate_edges;
    std::vector<std::string> actions;
    if (spdg_enabled) {
      for (const auto& e : graph.edges) {
        if (e.pruned || e.consumer_op != consumer_op ||
            e.consumer_field != field)
          continue;
        if (!bank.values(e.producer_op, e.producer_target, e.producer_field))
          continue;
        candidate_edges.push_back(&e);
        actions.push_back(AgentSet::dependency_action_key(
            e.producer_op, e.producer_field, e.producer_target));
      }
    } else {
      auto row = agents.dependency_q.entries().find(state);
      if (row != agents.dependency_q.entries().end()) {
        for (const auto& [action, q] : row->second) {
          // action keys decode as producer#field@target
          const auto hash_pos = action.find('#');
          const auto at_pos = action.rfind('@');
          if (hash_pos == std::string::npos || at_pos == std::string::npos)
            continue;
          const std::string op = action.substr(0, hash_pos);
          const std::string pfield =
              action.substr(hash_pos + 1, at_pos - hash_pos - 1);
          const std::string target_s = action.substr(at_pos + 1);
          ProducerTarget target = ProducerTarget::Response;
          if (target_s == "parameters") target = ProducerTarget::Parameters;
          else if (target_s == "body") target = ProducerTarget::Body;
          if (op == consumer_op) continue;
          if (!bank.values(op, target, pfield)) continue;
          candidate_edges.push_back(nullptr);
          actions.push_back(action);
        }
      }
    }
    // with the graph, unresolvable exploitation reports none so the value
    // agent's fallback takes over; without it, random queries are the only
    // discovery mechanism, so fall through
    if (actions.empty() && spdg_enabled) return std::nullopt;
    if (!actions.empty()) {
      const auto action =
          select_action(agents.dependency_q, state, actions, 0.0, rng);
      const auto idx = static_cast<std::size_t>(
          std::find(actions.begin(), actions.end(), action) - actions.begin());
      DependencyChoice choice;
      choice.consumer_op = consumer_op;
      choice.consumer_field = field;
      choice.consumer_location = *loc;
      if (const SpdgEdge* edge = candidate_edges[idx]) {
        choice.producer_op = edge->producer_op;
        choice.producer_field = edge->producer_field;
        choice.producer_target = edge->producer_target;
        choice.via_random_query = false;
      } else {
        const auto hash_pos = action.find('#');
        const auto at_pos = action.rfind('@');
        choice.producer_op = action.substr(0, hash_pos);
        choice.producer_field =
            action.substr(hash_pos + 1, at_pos - hash_pos - 1);
        const std::string target_s = action.substr(at_pos + 1);
        choice.producer_target = ProducerTarget::Response;
        if (target_s == "parameters")
          choice.producer_target = ProducerTarget::Parameters;
        else if (target_s == "body")
          choice.producer_target = ProducerTarget::Body;
        choice.via_random_query = true;  // graphless reuse of a learned query
      }
      return choice;
    }
    // nothing to exploit: fall through to a random query
  }

  // random dependency query: any stored producer value, edge or not
  std::vector<DataBank::Entry> pool;
  for (const auto& e : bank.entries())
    if (e.op != consumer_op) pool.push_back(e);
  if (pool.empty()) return std::nullopt;
  const auto& pick = pool[rng.index(pool.size())];
  DependencyChoice choice;
  choice.consumer_op = consumer_op;
  choice.consumer_field = field;
  choice.consumer_location = *loc;
  choice.producer_op = pick.op;
  choice.producer_field = pick.field;
  choice.producer_target = pick.target;
  choice.via_random_query = true;
  return choice;
}

namespace {

LlmRequest llm_request_for(const std::string& op_id, const ParameterDef& p) {
  LlmRequest req;
  req.operation_id = op_id;
  req.parameter = p.name;
  req.kind = p.kind;
  req.constraints = p.constraints;
  if (p.schema) {
    req.format = p.schema->format;
    req.spec_examples = p.schema->examples;
    req.schema = p.schema.get();
  }
  return req;
}

const ParameterDef* find_param(const OperationNode& op,
                               const std::string& name) {
  for (const auto& p : op.parameters)
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace

RequestPlan choose_plan(AgentSet& agents, PlanContext& ctx, double epsilon,
                        Rng& rng) {
  const std::string op_id =
      select_action(agents.operation_q, AgentSet::kOperationState,
                    agents.operation_actions(), epsilon, rng);
  const OperationNode& op = *ctx.spec.find(op_id);

  RequestPlan plan;
  plan.operation_id = op_id;
  plan.method = op.method;
  plan.path_template = op.path;

  const auto& combo_keys = agents.combination_keys(op_id);
  const ParameterCombination* combo = nullptr;
  if (!combo_keys.empty()) {
    const auto key =
        select_action(agents.parameter_q, op_id, combo_keys, epsilon, rng);
    plan.combo_key = key;
    for (const auto& c : agents.combinations(op_id))
      if (c.key == key) combo = &c;
  }
  if (!combo) return plan;  // parameterless operation

  for (const auto& name : combo->names) {
    const ParameterDef* def = find_param(op, name);
    if (!def) continue;
    Binding binding;
    binding.name = name;
    binding.location = def->location;
    binding.kind = def->kind;
    binding.required = def->required;

    const auto& actions = agents.value_actions(op_id, name);
    const auto state = AgentSet::value_state_key(op_id, name);
    const std::string chosen =
        select_action(agents.value_q, state, actions, epsilon, rng);
    ValueSource source = ValueSource::Random;
    if (chosen == to_string(ValueSource::Dependency))
      source = ValueSource::Dependency;
    else if (chosen == to_string(ValueSource::Llm))
      source = ValueSource::Llm;
    binding.chosen = source;
    binding.executed = source;

    bool bound = false;
    if (source == ValueSource::Dependency) {
      auto choice =
          dependency_lookup(agents, ctx.graph, ctx.bank, op_id, name,
                            def->location, epsilon, ctx.spdg_enabled, rng);
      if (choice) {
        const auto* stored = ctx.bank.values(
            choice->producer_op, choice->producer_target,
            choice->producer_field);
        if (stored && !stored->empty()) {
          binding.value = databank_value(ctx.bank, *choice, rng);
          binding.random_query = choice->via_random_query;
          if (choice->via_random_query) {
            binding.query_source = DataBank::Entry{choice->producer_op,
                                                   choice->producer_target,
                                                   choice->producer_field};
          } else {
            SpdgEdge tuple;
            tuple.consumer_op = choice->consumer_op;
            tuple.consumer_field = choice->consumer_field;
            tuple.consumer_location = choice->consumer_location;
            tuple.producer_op = choice->producer_op;
            tuple.producer_field = choice->producer_field;
            tuple.producer_target = choice->producer_target;
            binding.via_edge = tuple;
          }
          bound = true;
        }
      }
      if (!bound) {
        // unresolvable: fall back, crediting the source actually executed
        binding.executed = agents.options().llm_enabled ? ValueSource::Llm
                                                        : ValueSource::Random;
      }
    }

    if (!bound && binding.executed == ValueSource::Llm) {
      const auto& candidates = ctx.llm.values(llm_request_for(op_id, *def));
      if (!candidates.empty()) {
        binding.value = candidates[rng.index(candidates.size())];
        bound = true;
      } else {
        binding.executed = ValueSource::Random;
      }
    }

    if (!bound) {
      binding.executed = binding.executed == ValueSource::Dependency
                             ? ValueSource::Random
                             : binding.executed;
      binding.value = def->schema
                          ? random_value(*def->schema, ctx.random_policy, rng)
                          : random_value(def->kind, ctx.random_policy, rng);
    }
    plan.bindings.push_back(std::move(binding));
  }
  return plan;
}

FeedbackTrace apply_feedback(AgentSet& agents, Spdg& graph, DataBank& bank,
                             const ApiSpec& spec, const EmbeddingTable& table,
                             const RequestPlan& plan,
                             const ResponseRecord& response,
                             const LearningConfig& config,
                             const FeedbackOptions& options) {
  FeedbackTrace out;
  if (response.is_transport_error()) return out;  // log-only outcome

  const OperationNode* op = spec.find(plan.operation_id);

  // a method swap executes a different operation than the agent picked, so
  // crediting its outcome would poison the operation policy; every other
  // mutation leaves the operation identity intact
  const bool op_identity_intact =
      !plan.mutated || plan.mutation_kind != MutationKind::MethodSwap;

  if (options.learning_enabled && op_identity_intact) {
    out.operation_trace = independent_update(
        agents.operation_q, AgentSet::kOperationState, plan.operation_id,
        operation_reward(response.status), agents.operation_actions(), config);
  }

  // dependency, parameter, and value agents share one decomposed update;
  // mutated plans skip it because their bindings no longer reflect the
  // agents' choices
  if (options.learning_enabled && !plan.mutated) {
    std::vector<JointParticipant> participants;
    std::vector<std::pair<std::string, std::size_t>> labels;
    if (!agents.combination_keys(plan.operation_id).empty()) {
      participants.push_back({&agents.parameter_q, plan.operation_id,
                              plan.combo_key,
                              agents.combination_keys(plan.operation_id)});
      labels.emplace_back("parameter", participants.size() - 1);
    }
    for (const auto& b : plan.bindings) {
      participants.push_back(
          {&agents.value_q,
           AgentSet::value_state_key(plan.operation_id, b.name),
           to_string(b.executed),
           agents.value_actions(plan.operation_id, b.name)});
      labels.emplace_back("value", participants.size() - 1);

      if (b.via_edge || b.random_query) {
        std::string producer_op, producer_field;
        ProducerTarget target = ProducerTarget::Response;
        ConsumerLocation loc = ConsumerLocation::Query;
        if (b.via_edge) {
          producer_op = b.via_edge->producer_op;
          producer_field = b.via_edge->producer_field;
          target = b.via_edge->producer_target;
          loc = b.via_edge->consumer_location;
        } else if (b.query_source) {
          producer_op = b.query_source->op;
          producer_field = b.query_source->field;
          target = b.query_source->target;
          loc = consumer_location_of(b.location).value_or(
              ConsumerLocation::Query);
        }
        const auto state = AgentSet::dependency_state_key(plan.operation_id,
                                                          b.name, loc);
        const auto action =
            AgentSet::dependency_action_key(producer_op, producer_field, target);
        std::vector<std::string> next_actions;
        for (const auto& e : graph.edges)
          if (!e.pruned && e.consumer_op == plan.operation_id &&
              e.consumer_field == b.name)
            next_actions.push_back(AgentSet::dependency_action_key(
                e.producer_op, e.producer_field, e.producer_target));
        participants.push_back(
            {&agents.dependency_q, state, action, std::move(next_actions)});
        labels.emplace_back("dependency", participants.size() - 1);
      }
    }
    if (!participants.empty()) {
      const auto traces =
          joint_update(participants, shared_reward(response.status), config);
      for (const auto& [agent, idx] : labels)
        out.joint.push_back({agent, participants[idx].state,
                             participants[idx].action, traces[idx]});
    }
  }

  if (plan.mutated) return out;

  // graph refinement from direct server feedback
  if (options.spdg_enabled) {
    const auto outcome =
        response.is_2xx() ? EdgeOutcome::Success : EdgeOutcome::Failure;
    for (const auto& b : plan.bindings) {
      if (b.via_edge) {
        refine_edge(graph, *b.via_edge, outcome);
        ++out.edges_refined;
      } else if (b.random_query && b.query_source && response.is_2xx()) {
        SpdgEdge edge;
        edge.consumer_op = plan.operation_id;
        edge.consumer_field = b.name;
        edge.consumer_location =
            consumer_location_of(b.location).value_or(ConsumerLocation::Query);
        edge.producer_op = b.query_source->op;
        edge.producer_field = b.query_source->field;
        edge.producer_target = b.query_source->target;
        if (!graph.find_edge(edge)) {
          const auto& added = add_discovered_edge(
              graph, edge, graph.config.discovered_weight);
          if (options.learning_enabled) agents.seed_dependency_entry(added);
          ++out.edges_discovered;
        }
      }
    }
  }

  if (response.is_2xx() && op) {
    const auto undocumented = record_success(bank, plan, *op, response);
    out.databank_written = true;

    // undocumented response fields become producer candidates for other
    // operations' inputs
    if (options.spdg_enabled && !undocumented.empty()) {
      for (const auto& [path, value] : undocumented) {
        const auto dot = path.rfind('.');
        const std::string leaf =
            dot == std::string::npos ? path : path.substr(dot + 1);
        const auto producer_vec = name_vector(table, leaf);
        if (producer_vec.oov) continue;
        for (const auto& other : spec.operations) {
          if (other.id == plan.operation_id) continue;
          for (const auto& p : other.parameters) {
            const auto loc = consumer_location_of(p.location);
            if (!loc) continue;
            const auto consumer_vec = name_vector(table, p.name);
            if (consumer_vec.oov) continue;
            const double score =
                cosine(consumer_vec.vector, producer_vec.vector);
            if (score <= graph.config.similarity_threshold) continue;
            SpdgEdge edge;
            edge.consumer_op = other.id;
            edge.consumer_field = p.name;
            edge.consumer_location = *loc;
            edge.producer_op = plan.operation_id;
            edge.producer_field = path;
            edge.producer_target = ProducerTarget::Response;
            if (!graph.find_edge(edge)) {
              const auto& added = add_discovered_edge(graph, edge, score);
              if (options.learning_enabled) agents.seed_dependency_entry(added);
              ++out.edges_discovered;
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace restrl
