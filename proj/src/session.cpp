#include "restrl/session.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace restrl {

namespace {

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SessionResult run_session(const SessionConfig& config) {
  if (!config.time_budget_s && !config.max_requests)
    throw std::invalid_argument("no stop condition: set a time budget or a request cap");

  ApiSpec spec = config.spec_path.empty()
                     ? parse_spec(config.spec_document, config.spec_format)
                     : parse_spec_file(config.spec_path);
  EmbeddingTable table = load_embeddings(config.embeddings_path);

  const bool learning_enabled = !config.disable.count(Ablation::Learning);
  const bool spdg_enabled = !config.disable.count(Ablation::Spdg);
  const bool llm_enabled = !config.disable.count(Ablation::Llm);

  Rng rng(config.seed);
  Spdg graph = build_spdg(spec, table, config.spdg);

  AgentOptions agent_options;
  agent_options.llm_enabled = llm_enabled;
  agent_options.seed_dependency_q = learning_enabled;
  AgentSet agents(spec, graph, agent_options, rng);

  std::shared_ptr<LlmClient> client;
  if (config.llm.endpoint.empty())
    client = std::make_shared<StubLlmClient>(config.seed);
  else
    client = std::make_shared<HttpLlmClient>(config.llm);
  LlmValueService llm(client);

  SimService sim;
  std::unique_ptr<Transport> transport;
  if (config.base_url == "sim" || config.base_url.rfind("sim://", 0) == 0)
    transport = std::make_unique<SimTransport>(sim);
  else
    transport = std::make_unique<HttpTransport>(
        config.base_url, config.request_timeout_s, config.auth_header);

  DataBank bank;
  ReportAggregator aggregator(spec.operations.size());
  PlanContext ctx{spec, graph, bank, llm, config.random_policy, spdg_enabled};
  FeedbackOptions feedback{learning_enabled, spdg_enabled};

  // epsilon decays over requests when a request cap drives the session,
  // over wall time otherwise
  const bool count_driven = config.max_requests.has_value();
  const double budget = count_driven
                            ? static_cast<double>(*config.max_requests)
                            : *config.time_budget_s;

  WallClock clock;
  std::ostringstream jsonl;
  long long seq = 0;
  while (true) {
    if (config.max_requests && seq >= *config.max_requests) break;
    if (config.time_budget_s && clock.elapsed_s() >= *config.time_budget_s)
      break;

    const double elapsed =
        count_driven ? static_cast<double>(seq) : clock.elapsed_s();
    const double epsilon =
        budget > 0 ? epsilon_at(elapsed, budget, config.learning)
                   : config.learning.epsilon_end;

    RequestPlan plan = choose_plan(agents, ctx, epsilon, rng);
    const OperationNode* op = spec.find(plan.operation_id);
    maybe_mutate(plan, *op, config.mutation_rate, rng);

    HttpRequest request = build_request(plan, spec, config.auth_header);
    ResponseRecord response = transport->send(request);
    ++seq;

    apply_feedback(agents, graph, bank, spec, table, plan, response,
                   config.learning, feedback);
    aggregator.observe(seq, plan, response);
    jsonl << request_log_row(seq, plan, response).dump() << "\n";
  }

  SessionResult result;
  result.summary = aggregator.summary();
  result.graph = graph;
  result.requests_jsonl = jsonl.str();
  result.report_json = summary_to_json(result.summary);

  if (!config.out_dir.empty()) {
    const std::vector<std::pair<std::string, const QTable*>> tables = {
        {"operation", &agents.operation_q},
        {"parameter", &agents.parameter_q},
        {"value", &agents.value_q},
        {"dependency", &agents.dependency_q},
    };
    emit_report(result.summary, graph, tables, config.out_dir);
    std::ofstream log(std::filesystem::path(config.out_dir) / "requests.jsonl");
    if (!log) throw IoFailure("cannot write requests.jsonl in " + config.out_dir);
    log << result.requests_jsonl;
  }
  return result;
}

SessionResult run_ablation(SessionConfig config,
                           const std::set<Ablation>& disable) {
  config.disable = disable;
  return run_session(config);
}

}  // namespace restrl
