#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "restrl/engine.hpp"
#include "restrl/learning.hpp"
#include "restrl/spdg.hpp"

namespace restrl {

// One deduplicated 5xx observation: keyed by operation plus the server's
// response message.
struct FailureRecord {
  std::string operation_id;
  int status = 500;
  std::string dedup_key;
  std::string message;
  long long first_seen_seq = 0;
  Json example_plan;
};

struct CoverageSummary {
  std::size_t operations_total = 0;
  std::size_t operations_processed = 0;  // >= 1 unmutated 2xx
  std::vector<std::string> processed_operation_ids;
  std::map<int, long long> per_status;
  long long transport_errors = 0;
  std::vector<FailureRecord> failures;
  long long requests_total = 0;
  std::optional<long long> first_full_coverage_seq;
};

// operation id + "|" + server message, where the message is the body's
// "message"/"error" JSON field when present, else the body itself trimmed
// to 200 characters.
std::string dedup_key(const std::string& operation_id,
                      const std::string& body);

class ReportAggregator {
 public:
  explicit ReportAggregator(std::size_t operations_total)
      : operations_total_(operations_total) {}

  void observe(long long seq, const RequestPlan& plan,
               const ResponseRecord& response);

  CoverageSummary summary() const;

 private:
  std::size_t operations_total_;
  long long requests_total_ = 0;
  long long transport_errors_ = 0;
  std::map<int, long long> per_status_;
  std::map<std::string, long long> processed_;  // op id -> first 2xx seq
  std::optional<long long> first_full_coverage_seq_;
  std::map<std::string, FailureRecord> failures_;  // by dedup key
};

Json summary_to_json(const CoverageSummary& summary);
Json qtables_to_json(
    const std::vector<std::pair<std::string, const QTable*>>& tables);

// Write report.json, spdg.json, spdg.dot, and qtables.json under out_dir.
// Finding failures is the product, not an error: this never signals failure
// through the exit path unless the filesystem refuses the write.
void emit_report(const CoverageSummary& summary, const Spdg& graph,
                 const std::vector<std::pair<std::string, const QTable*>>& tables,
                 const std::string& out_dir);

// One requests.jsonl row; ordered so the line reads seq-first.
nlohmann::ordered_json request_log_row(long long seq, const RequestPlan& plan,
                                       const ResponseRecord& response);

}  // namespace restrl
