#include "restrl/values.hpp"

namespace restrl {

std::string to_string(ValueSource s) {
  switch (s) {
    case ValueSource::Dependency: return "DEPENDENCY";
    case ValueSource::Llm: return "LLM";
    case ValueSource::Random: return "RANDOM";
  }
  return "RANDOM";
}

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

std::string random_string(const RandomPolicy& policy, Rng& rng) {
  const std::size_t len = static_cast<std::size_t>(
      rng.int_range(static_cast<long long>(policy.string_len_min),
                    static_cast<long long>(policy.string_len_max)));
  std::string s;
  s.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    s += kAlphabet[rng.index(sizeof(kAlphabet) - 1)];
  return s;
}

Json random_for_schema(const SchemaNode* schema, ValueKind kind,
                       const RandomPolicy& policy, Rng& rng, int depth) {
  switch (kind) {
    case ValueKind::String:
      return random_string(policy, rng);
    case ValueKind::Integer:
      return rng.int_range(policy.int_min, policy.int_max);
    case ValueKind::Number:
      return rng.real_range(policy.number_min, policy.number_max);
    case ValueKind::Boolean:
      return rng.coin();
    case ValueKind::Array: {
      Json arr = Json::array();
      if (depth > 4) return arr;
      const std::size_t len = static_cast<std::size_t>(
          rng.int_range(static_cast<long long>(policy.array_len_min),
                        static_cast<long long>(policy.array_len_max)));
      const SchemaNode* items =
          schema && schema->items ? schema->items.get() : nullptr;
      for (std::size_t i = 0; i < len; ++i)
        arr.push_back(random_for_schema(items,
                                        items ? items->kind : ValueKind::String,
                                        policy, rng, depth + 1));
      return arr;
    }
    case ValueKind::Object: {
      Json obj = Json::object();
      if (depth > 4 || !schema) return obj;
      for (const auto& [name, child] : schema->properties)
        obj[name] = random_for_schema(&child, child.kind, policy, rng,
                                      depth + 1);
      return obj;
    }
  }
  return nullptr;
}

}  // namespace

Json random_value(ValueKind kind, const RandomPolicy& policy, Rng& rng) {
  return random_for_schema(nullptr, kind, policy, rng, 0);
}

Json random_value(const SchemaNode& schema, const RandomPolicy& policy,
                  Rng& rng) {
  return random_for_schema(&schema, schema.kind, policy, rng, 0);
}

Json wrong_typed_value(ValueKind kind, const RandomPolicy& policy, Rng& rng) {
  // any JSON type other than the declared one
  switch (kind) {
    case ValueKind::String:
      return rng.coin() ? Json(rng.int_range(policy.int_min, policy.int_max))
                        : Json(rng.coin());
    case ValueKind::Integer:
    case ValueKind::Number:
      return random_string(policy, rng);
    case ValueKind::Boolean:
      return random_string(policy, rng);
    case ValueKind::Array:
    case ValueKind::Object:
      return rng.coin() ? Json(random_string(policy, rng))
                        : Json(rng.int_range(policy.int_min, policy.int_max));
  }
  return nullptr;
}

}  // namespace restrl
