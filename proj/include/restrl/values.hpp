#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "restrl/rng.hpp"
#include "restrl/spec_model.hpp"

namespace restrl {

// The three data sources the value agent chooses between.
enum class ValueSource { Dependency, Llm, Random };

std::string to_string(ValueSource s);

struct RandomPolicy {
  std::size_t string_len_min = 1;
  std::size_t string_len_max = 50;
  long long int_min = -1024;
  long long int_max = 1024;
  double number_min = -1024.0;
  double number_max = 1024.0;
  std::size_t array_len_min = 0;
  std::size_t array_len_max = 3;
};

// Type-directed random value. Schema constraints are deliberately ignored;
// honoring them is what the LLM source is for.
Json random_value(ValueKind kind, const RandomPolicy& policy, Rng& rng);
Json random_value(const SchemaNode& schema, const RandomPolicy& policy,
                  Rng& rng);

// A value of a different JSON type than the given kind, for mutations.
Json wrong_typed_value(ValueKind kind, const RandomPolicy& policy, Rng& rng);

}  // namespace restrl
