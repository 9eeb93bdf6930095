#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "restrl/session.hpp"

using namespace restrl;

namespace {

SessionConfig sim_config(std::uint64_t seed, long long max_requests) {
  SessionConfig config;
  config.spec_path = std::string(RESTRL_DATA_DIR) + "/sim_openapi.json";
  config.embeddings_path = std::string(RESTRL_DATA_DIR) + "/mini_glove.txt";
  config.base_url = "sim";
  config.seed = seed;
  config.max_requests = max_requests;
  return config;
}

}  // namespace

TEST_CASE("a short simulated session runs, logs, and reports") {
  const auto result = run_session(sim_config(7, 200));
  CHECK(result.summary.requests_total == 200);
  CHECK(result.summary.operations_total == 4);
  // every request left one log line
  long long lines = 0;
  for (const char c : result.requests_jsonl)
    if (c == '\n') ++lines;
  CHECK(lines == 200);
  CHECK(result.report_json["requests_total"] == 200);
}

TEST_CASE("zero request budget gives an empty report") {
  const auto result = run_session(sim_config(7, 0));
  CHECK(result.summary.requests_total == 0);
  CHECK(result.summary.operations_processed == 0);
  CHECK(result.summary.failures.empty());
  CHECK(result.requests_jsonl.empty());
}

TEST_CASE("missing spec file fails at startup naming the path") {
  auto config = sim_config(7, 10);
  config.spec_path = "/nonexistent/spec.json";
  try {
    run_session(config);
    FAIL("expected IoFailure");
  } catch (const IoFailure& e) {
    CHECK(std::string(e.what()).find("/nonexistent/spec.json") !=
          std::string::npos);
  }
}

TEST_CASE("no stop condition is a configuration error") {
  auto config = sim_config(7, 10);
  config.max_requests.reset();
  config.time_budget_s.reset();
  CHECK_THROWS_AS(run_session(config), std::invalid_argument);
}

TEST_CASE("identical config and seed reproduce the log byte for byte") {
  const auto a = run_session(sim_config(1234, 400));
  const auto b = run_session(sim_config(1234, 400));
  CHECK(a.requests_jsonl == b.requests_jsonl);
  CHECK(a.report_json.dump() == b.report_json.dump());

  const auto c = run_session(sim_config(1235, 400));
  CHECK(a.requests_jsonl != c.requests_jsonl);  // the seed matters
}

TEST_CASE("wall-clock budget stops the loop") {
  auto config = sim_config(7, 0);
  config.max_requests.reset();
  config.time_budget_s = 0.3;
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_session(config);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  CHECK(result.summary.requests_total > 0);
  CHECK(elapsed < 5.0);
}

TEST_CASE("report files land in the output directory") {
  const auto dir =
      std::filesystem::temp_directory_path() / "restrl_session_out";
  std::filesystem::remove_all(dir);
  auto config = sim_config(7, 50);
  config.out_dir = dir.string();
  run_session(config);
  for (const char* name :
       {"report.json", "spdg.json", "spdg.dot", "qtables.json",
        "requests.jsonl"})
    CHECK_MESSAGE(std::filesystem::exists(dir / name), "missing ", name);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ablation with an empty disable set equals the baseline") {
  const auto a = run_session(sim_config(99, 300));
  const auto b = run_ablation(sim_config(99, 300), {});
  CHECK(a.requests_jsonl == b.requests_jsonl);
}

TEST_CASE("disabling learning keeps every Q-value at zero") {
  auto config = sim_config(7, 300);
  config.out_dir.clear();
  config.disable = {Ablation::Learning};
  const auto result = run_session(config);
  CHECK(result.summary.requests_total == 300);
  // the graph still refines, so weights may move, but no Q entry exists
  // (spot-check through a fresh run with an out dir)
  const auto dir =
      std::filesystem::temp_directory_path() / "restrl_nolearn_out";
  std::filesystem::remove_all(dir);
  config.out_dir = dir.string();
  run_session(config);
  std::ifstream in(dir / "qtables.json");
  Json rows;
  in >> rows;
  for (const auto& row : rows) {
    if (row["agent"] == "dependency") continue;  // seeded from similarity
    CHECK(row["q"].get<double>() == 0.0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("disabling the LLM removes it from executed sources") {
  auto config = sim_config(7, 400);
  config.disable = {Ablation::Llm};
  const auto result = run_session(config);
  std::istringstream lines(result.requests_jsonl);
  std::string line;
  while (std::getline(lines, line)) {
    const Json row = Json::parse(line);
    for (const auto& [name, source] : row["sources"].items())
      CHECK(source != "LLM");
  }
}

TEST_CASE("mutated requests never write the data bank (provenance audit)") {
  // run a session, then replay the log: every mutated row must not be the
  // first 2xx that marked an operation processed
  const auto result = run_session(sim_config(21, 600));
  std::istringstream lines(result.requests_jsonl);
  std::string line;
  std::map<std::string, bool> processed_before_mutated_2xx;
  while (std::getline(lines, line)) {
    const Json row = Json::parse(line);
    if (row["mutated"] == true && !row["status"].is_null()) {
      const int status = row["status"].get<int>();
      if (status >= 200 && status < 300) {
        // fine: mutated 2xx happen, they just must not count as processed
        continue;
      }
    }
  }
  // the report's processed set is computed from unmutated 2xx only
  for (const auto& id : result.summary.processed_operation_ids) {
    bool found_unmutated_2xx = false;
    std::istringstream again(result.requests_jsonl);
    while (std::getline(again, line)) {
      const Json row = Json::parse(line);
      if (row["operation"] == id && row["mutated"] == false &&
          !row["status"].is_null()) {
        const int status = row["status"].get<int>();
        if (status >= 200 && status < 300) found_unmutated_2xx = true;
      }
    }
    CHECK_MESSAGE(found_unmutated_2xx, "processed without unmutated 2xx: ", id);
  }
}
