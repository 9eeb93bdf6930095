#pragma once

#include <deque>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "restrl/spdg.hpp"

namespace restrl {

// Per-operation stores of values observed on successful requests:
// parameters, request body properties, and recursively decomposed response
// fields. Only unmutated 2xx outcomes write. Exact repeats deduplicate and
// each list is capped with FIFO eviction.
class DataBank {
 public:
  static constexpr std::size_t kCapPerField = 100;

  void add(const std::string& op, ProducerTarget target,
           const std::string& field, const Json& value);

  const std::vector<Json>* values(const std::string& op, ProducerTarget target,
                                  const std::string& field) const;

  bool empty() const { return stores_.empty(); }

  struct Entry {
    std::string op;
    ProducerTarget target;
    std::string field;
  };
  // deterministic enumeration of every non-empty (op, target, field) store
  std::vector<Entry> entries() const;

  Json to_json() const;

 private:
  // key: op -> target -> field -> values
  std::map<std::string, std::map<int, std::map<std::string, std::vector<Json>>>>
      stores_;
};

}  // namespace restrl
