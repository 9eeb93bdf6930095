#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "restrl/errors.hpp"

namespace restrl {

using Json = nlohmann::json;

enum class ParamLocation { Path, Query, Header, Body };
enum class ValueKind { String, Integer, Number, Boolean, Array, Object };

std::string to_string(ParamLocation loc);
std::string to_string(ValueKind kind);
ParamLocation param_location_from_string(const std::string& s);
ValueKind value_kind_from_string(const std::string& s);

struct ConstraintSet {
  std::optional<std::string> pattern;
  std::optional<std::size_t> min_length;
  std::optional<std::size_t> max_length;
  std::optional<double> minimum;
  std::optional<double> maximum;
  std::optional<std::vector<Json>> enum_values;

  bool operator==(const ConstraintSet&) const = default;
  bool empty() const {
    return !pattern && !min_length && !max_length && !minimum && !maximum &&
           !enum_values;
  }
};

struct SchemaNode {
  ValueKind kind = ValueKind::Object;
  std::map<std::string, SchemaNode> properties;   // kind == Object
  std::shared_ptr<SchemaNode> items;              // kind == Array
  std::set<std::string> required_names;
  ConstraintSet constraints;
  std::optional<std::string> format;              // date, uuid, ...
  std::vector<Json> examples;

  bool operator==(const SchemaNode& other) const;
};

struct ParameterDef {
  std::string name;
  ParamLocation location = ParamLocation::Query;
  ValueKind kind = ValueKind::String;
  bool required = false;
  ConstraintSet constraints;
  // full schema for structured kinds; scalar params carry kind+constraints only
  std::shared_ptr<SchemaNode> schema;

  bool operator==(const ParameterDef& other) const;
};

struct OperationNode {
  std::string id;  // operationId, or "<METHOD> <path>" when absent
  std::string method;
  std::string path;
  std::vector<ParameterDef> parameters;  // path/query/header plus body top-level props
  std::optional<SchemaNode> request_body;
  std::map<std::string, SchemaNode> responses;  // status-code pattern -> schema

  bool operator==(const OperationNode& other) const = default;

  std::vector<std::string> declared_methods_on_path;  // for mutation: sibling methods
};

struct ApiSpec {
  std::string title;
  std::string base_url;
  std::vector<OperationNode> operations;
  std::vector<std::string> warnings;

  const OperationNode* find(const std::string& id) const;
};

enum class SpecFormat { Json, Yaml };

// Parse an OpenAPI 3.x document. All component $refs are inlined (cyclic refs
// capped at 5 expansions); unsupported fields are ignored. Swagger 2.0 is
// rejected. A document with zero operations parses with a warning.
ApiSpec parse_spec(const std::string& document, SpecFormat format);
ApiSpec parse_spec_file(const std::string& path);

// inputs = parameter names plus body property names (recursive, leaf names);
// outputs = response property names across 2xx schemas, recursive.
std::pair<std::vector<std::string>, std::vector<std::string>> extract_io_names(
    const OperationNode& op);

// 2xx response fields as (dotted path, leaf name) pairs; paths match what
// response decomposition produces (array hops are transparent).
std::vector<std::pair<std::string, std::string>> response_output_paths(
    const OperationNode& op);

// Round-trip serialization of the normalized model.
Json spec_to_json(const ApiSpec& spec);
ApiSpec spec_from_json(const Json& j);

}  // namespace restrl
