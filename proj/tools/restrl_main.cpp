#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "restrl/session.hpp"

using namespace restrl;

int main(int argc, char** argv) {
  CLI::App app{
      "restrl: reinforcement-guided black-box REST API testing.\n"
      "Four Q-learning agents coordinate over a semantic dependency graph\n"
      "to generate, mutate, and dispatch requests against a service."};

  SessionConfig config;
  double budget_s = 0;
  long long max_requests = 0;
  int repeat = 1;
  bool llm_stub = false;
  std::vector<std::string> disable_flags;

  app.add_option("--spec", config.spec_path, "OpenAPI 3.x document (JSON or YAML)")
      ->required();
  app.add_option("--base-url", config.base_url,
                 "service base URL, or 'sim' for the bundled in-process service");
  app.add_option("--budget", budget_s, "time budget in seconds (default 3600)");
  app.add_option("--max-requests", max_requests,
                 "request-count stop condition (alternative to --budget)");
  app.add_option("--seed", config.seed, "RNG seed; fixes the request stream")
      ->required();
  app.add_option("--mutation-rate", config.mutation_rate,
                 "fraction of requests to mutate (default 0.2)");
  app.add_option("--embeddings", config.embeddings_path,
                 "word-embedding file, GloVe text format")
      ->required();
  app.add_option("--llm-endpoint", config.llm.endpoint,
                 "chat-completions endpoint; omit to use the deterministic stub");
  app.add_option("--llm-model", config.llm.model, "model name for the endpoint");
  app.add_flag("--llm-stub", llm_stub,
               "force the deterministic stub even when an endpoint is set");
  app.add_option("--auth-header", config.auth_header,
                 "static header added to every request, 'Name: value'");
  app.add_option("--disable", disable_flags,
                 "drop a component: learning, spdg, or llm (repeatable)");
  app.add_option("--repeat", repeat, "run N sessions, reseeding each");
  app.add_option("--out", config.out_dir,
                 "report directory (report.json, spdg.json, qtables.json, requests.jsonl)");
  app.add_option("--timeout", config.request_timeout_s,
                 "per-request timeout in seconds (default 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (budget_s > 0) config.time_budget_s = budget_s;
  if (max_requests > 0) config.max_requests = max_requests;
  if (!config.time_budget_s && !config.max_requests)
    config.time_budget_s = 3600;  // the default one-hour budget
  if (llm_stub) config.llm.endpoint.clear();

  for (const auto& d : disable_flags) {
    if (d == "learning") config.disable.insert(Ablation::Learning);
    else if (d == "spdg") config.disable.insert(Ablation::Spdg);
    else if (d == "llm") config.disable.insert(Ablation::Llm);
    else {
      std::cerr << "unknown --disable value: " << d
                << " (expected learning, spdg, or llm)\n";
      return 2;
    }
  }
  if (repeat < 1) {
    std::cerr << "--repeat must be >= 1\n";
    return 2;
  }

  try {
    Json aggregate = Json::array();
    for (int i = 0; i < repeat; ++i) {
      SessionConfig run = config;
      run.seed = config.seed + static_cast<std::uint64_t>(i);
      if (repeat > 1 && !config.out_dir.empty())
        run.out_dir = (std::filesystem::path(config.out_dir) /
                       ("run_" + std::to_string(i)))
                          .string();
      const auto result = run_session(run);
      const auto& s = result.summary;
      std::cout << "seed " << run.seed << ": " << s.operations_processed << "/"
                << s.operations_total << " operations processed, "
                << s.failures.size() << " distinct 5xx, " << s.requests_total
                << " requests\n";
      for (const auto& f : s.failures)
        std::cout << "  5xx " << f.operation_id << " [" << f.status
                  << "]: " << f.message << " (first seen #" << f.first_seen_seq
                  << ")\n";
      aggregate.push_back(result.report_json);
    }
    if (repeat > 1 && !config.out_dir.empty()) {
      std::filesystem::create_directories(config.out_dir);
      std::ofstream agg(std::filesystem::path(config.out_dir) /
                        "aggregate.json");
      agg << aggregate.dump(2) << "\n";
    }
  } catch (const MalformedDocument& e) {
    std::cerr << "startup failure: " << e.what() << "\n";
    return 3;
  } catch (const UnsupportedSpecVersion& e) {
    std::cerr << "startup failure: " << e.what() << "\n";
    return 3;
  } catch (const UnresolvableRef& e) {
    std::cerr << "startup failure: " << e.what() << "\n";
    return 3;
  } catch (const EmptyFile& e) {
    std::cerr << "startup failure: " << e.what() << "\n";
    return 3;
  } catch (const DimensionMismatch& e) {
    std::cerr << "startup failure: " << e.what() << "\n";
    return 3;
  } catch (const IoFailure& e) {
    std::cerr << "startup failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
