#include "restrl/report.hpp"

#include <filesystem>
#include <fstream>

namespace restrl {

std::string dedup_key(const std::string& operation_id,
                      const std::string& body) {
  std::string message;
  Json parsed = Json::parse(body, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object()) {
    if (parsed.contains("message") && parsed["message"].is_string())
      message = parsed["message"].get<std::string>();
    else if (parsed.contains("error") && parsed["error"].is_string())
      message = parsed["error"].get<std::string>();
  }
  if (message.empty()) {
    message = body.substr(0, 200);
  }
  return operation_id + "|" + message;
}

namespace {

Json plan_summary(const RequestPlan& plan) {
  Json j;
  j["operation"] = plan.operation_id;
  j["method"] = plan.method;
  j["path"] = plan.path_template;
  Json bindings = Json::object();
  for (const auto& b : plan.bindings) bindings[b.name] = b.value;
  j["bindings"] = std::move(bindings);
  j["mutated"] = plan.mutated;
  if (plan.mutation_kind) j["mutation_kind"] = to_string(*plan.mutation_kind);
  return j;
}

}  // namespace

void ReportAggregator::observe(long long seq, const RequestPlan& plan,
                               const ResponseRecord& response) {
  ++requests_total_;
  if (response.is_transport_error()) {
    ++transport_errors_;
    return;
  }
  ++per_status_[response.status];

  if (response.is_2xx() && !plan.mutated &&
      !processed_.count(plan.operation_id)) {
    processed_[plan.operation_id] = seq;
    if (processed_.size() == operations_total_ && !first_full_coverage_seq_)
      first_full_coverage_seq_ = seq;
  }

  if (response.status >= 500) {
    const auto key = dedup_key(plan.operation_id, response.body);
    if (!failures_.count(key)) {
      FailureRecord rec;
      rec.operation_id = plan.operation_id;
      rec.status = response.status;
      rec.dedup_key = key;
      rec.message = key.substr(plan.operation_id.size() + 1);
      rec.first_seen_seq = seq;
      rec.example_plan = plan_summary(plan);
      failures_.emplace(key, std::move(rec));
    }
  }
}

CoverageSummary ReportAggregator::summary() const {
  CoverageSummary s;
  s.operations_total = operations_total_;
  s.operations_processed = processed_.size();
  for (const auto& [op, seq] : processed_)
    s.processed_operation_ids.push_back(op);
  s.per_status = per_status_;
  s.transport_errors = transport_errors_;
  s.requests_total = requests_total_;
  s.first_full_coverage_seq = first_full_coverage_seq_;
  for (const auto& [key, rec] : failures_) s.failures.push_back(rec);
  return s;
}

Json summary_to_json(const CoverageSummary& summary) {
  Json j;
  j["operations_total"] = summary.operations_total;
  j["operations_processed"] = summary.operations_processed;
  j["processed_operation_ids"] = summary.processed_operation_ids;
  Json statuses = Json::object();
  for (const auto& [code, n] : summary.per_status)
    statuses[std::to_string(code)] = n;
  j["per_status"] = std::move(statuses);
  j["transport_errors"] = summary.transport_errors;
  j["requests_total"] = summary.requests_total;
  if (summary.first_full_coverage_seq)
    j["first_full_coverage_seq"] = *summary.first_full_coverage_seq;
  else
    j["first_full_coverage_seq"] = nullptr;
  Json failures = Json::array();
  for (const auto& f : summary.failures) {
    Json fj;
    fj["operation"] = f.operation_id;
    fj["status"] = f.status;
    fj["dedup_key"] = f.dedup_key;
    fj["message"] = f.message;
    fj["first_seen_seq"] = f.first_seen_seq;
    fj["example"] = f.example_plan;
    failures.push_back(std::move(fj));
  }
  j["failures"] = std::move(failures);
  return j;
}

Json qtables_to_json(
    const std::vector<std::pair<std::string, const QTable*>>& tables) {
  Json rows = Json::array();
  for (const auto& [agent, table] : tables) {
    for (const auto& [state, actions] : table->entries())
      for (const auto& [action, q] : actions) {
        Json row;
        row["agent"] = agent;
        row["state_key"] = state;
        row["action_key"] = action;
        row["q"] = q;
        rows.push_back(std::move(row));
      }
  }
  return rows;
}

void emit_report(const CoverageSummary& summary, const Spdg& graph,
                 const std::vector<std::pair<std::string, const QTable*>>& tables,
                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create " + out_dir + ": " + ec.message());

  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = fs::path(out_dir) / name;
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path.string());
    out << content;
  };
  write("report.json", summary_to_json(summary).dump(2) + "\n");
  write("spdg.json", spdg_to_json(graph).dump(2) + "\n");
  write("spdg.dot", spdg_to_dot(graph));
  write("qtables.json", qtables_to_json(tables).dump(2) + "\n");
}

nlohmann::ordered_json request_log_row(long long seq, const RequestPlan& plan,
                                       const ResponseRecord& response) {
  nlohmann::ordered_json row;
  row["seq"] = seq;
  row["operation"] = plan.operation_id;
  row["mutated"] = plan.mutated;
  if (plan.mutation_kind)
    row["mutation_kind"] = to_string(*plan.mutation_kind);
  else
    row["mutation_kind"] = nullptr;
  if (response.is_transport_error()) {
    row["status"] = nullptr;
    row["transport_error"] = response.transport_error;
  } else {
    row["status"] = response.status;
  }
  row["latency_ms"] = response.latency.count();
  nlohmann::ordered_json sources = nlohmann::ordered_json::object();
  for (const auto& b : plan.bindings) sources[b.name] = to_string(b.executed);
  row["sources"] = std::move(sources);
  return row;
}

}  // namespace restrl
