#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "restrl/agents.hpp"
#include "restrl/llm.hpp"
#include "restrl/report.hpp"
#include "restrl/semantics.hpp"
#include "restrl/spdg.hpp"
#include "restrl/sut_sim.hpp"

namespace restrl {

enum class Ablation { Learning, Spdg, Llm };

struct SessionConfig {
  std::string spec_path;            // or inline document below
  std::string spec_document;        // used when spec_path is empty
  SpecFormat spec_format = SpecFormat::Json;
  std::string embeddings_path;
  std::string base_url = "sim";     // "sim" = in-process simulated service

  std::optional<double> time_budget_s;   // wall-clock stop condition
  std::optional<long long> max_requests; // request-count stop condition
  std::uint64_t seed = 0;
  double mutation_rate = 0.2;
  double request_timeout_s = 10.0;
  std::string auth_header;

  LearningConfig learning;
  SpdgConfig spdg;
  LlmClientConfig llm;              // empty endpoint selects the stub
  RandomPolicy random_policy;

  std::set<Ablation> disable;
  std::string out_dir;              // empty: nothing written
};

struct SessionResult {
  CoverageSummary summary;
  Spdg graph;
  std::string requests_jsonl;  // full log content (also written to out_dir)
  Json report_json;
};

// The full loop: parse -> build graph -> init agents -> iterate
// (choose, mutate, build, dispatch, learn, record) until the budget runs
// out -> emit the report. Startup failures throw; mid-session transport
// errors are absorbed into the log.
SessionResult run_session(const SessionConfig& config);

// Same loop with components disabled: no Q-updates, dependency agent
// restricted to random queries, or the LLM source removed.
SessionResult run_ablation(SessionConfig config,
                           const std::set<Ablation>& disable);

}  // namespace restrl
