#include "restrl/spec_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace restrl {

std::string to_string(ParamLocation loc) {
  switch (loc) {
    case ParamLocation::Path: return "path";
    case ParamLocation::Query: return "query";
    case ParamLocation::Header: return "header";
    case ParamLocation::Body: return "body";
  }
  return "query";
}

std::string to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::String: return "string";
    case ValueKind::Integer: return "integer";
    case ValueKind::Number: return "number";
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Array: return "array";
    case ValueKind::Object: return "object";
  }
  return "string";
}

ParamLocation param_location_from_string(const std::string& s) {
  if (s == "path") return ParamLocation::Path;
  if (s == "query") return ParamLocation::Query;
  if (s == "header") return ParamLocation::Header;
  if (s == "body") return ParamLocation::Body;
  throw MalformedDocument("unknown parameter location: " + s);
}

ValueKind value_kind_from_string(const std::string& s) {
  if (s == "string") return ValueKind::String;
  if (s == "integer") return ValueKind::Integer;
  if (s == "number") return ValueKind::Number;
  if (s == "boolean") return ValueKind::Boolean;
  if (s == "array") return ValueKind::Array;
  if (s == "object") return ValueKind::Object;
  return ValueKind::String;  // unknown types degrade to string
}

bool SchemaNode::operator==(const SchemaNode& other) const {
  if (kind != other.kind || properties != other.properties ||
      required_names != other.required_names ||
      constraints != other.constraints || format != other.format)
    return false;
  if (static_cast<bool>(items) != static_cast<bool>(other.items)) return false;
  if (items && !(*items == *other.items)) return false;
  return examples == other.examples;
}

bool ParameterDef::operator==(const ParameterDef& other) const {
  if (name != other.name || location != other.location || kind != other.kind ||
      required != other.required || constraints != other.constraints)
    return false;
  if (static_cast<bool>(schema) != static_cast<bool>(other.schema))
    return false;
  return !schema || *schema == *other.schema;
}

const OperationNode* ApiSpec::find(const std::string& id) const {
  for (const auto& op : operations)
    if (op.id == id) return &op;
  return nullptr;
}

namespace {

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
      return nullptr;
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      // quoted scalars stay strings
      if (node.Tag() == "!") return s;
      if (s == "null" || s == "~") return nullptr;
      if (s == "true") return true;
      if (s == "false") return false;
      try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
      } catch (...) {
      }
      try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
      } catch (...) {
      }
      return s;
    }
    case YAML::NodeType::Sequence: {
      Json arr = Json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      Json obj = Json::object();
      for (const auto& kv : node)
        obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
    default:
      return nullptr;
  }
}

constexpr int kMaxRefExpansions = 5;

class SchemaBuilder {
 public:
  explicit SchemaBuilder(const Json& root) : root_(root) {}

  SchemaNode build(const Json& schema) {
    std::map<std::string, int> depth;
    return build_impl(schema, depth);
  }

 private:
  const Json& root_;

  const Json& resolve_ref(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0)
      throw UnresolvableRef("external $ref not supported: " + ref);
    const Json* cur = &root_;
    std::stringstream ss(ref.substr(2));
    std::string part;
    while (std::getline(ss, part, '/')) {
      if (!cur->is_object() || !cur->contains(part))
        throw UnresolvableRef("dangling $ref: " + ref);
      cur = &(*cur)[part];
    }
    return *cur;
  }

  SchemaNode build_impl(const Json& schema, std::map<std::string, int>& depth) {
    if (!schema.is_object()) return SchemaNode{ValueKind::Object, {}, nullptr, {}, {}, {}, {}};

    if (schema.contains("$ref")) {
      const std::string ref = schema["$ref"].get<std::string>();
      if (depth[ref] >= kMaxRefExpansions) {
        // cycle cap: truncate to an empty object node
        return SchemaNode{ValueKind::Object, {}, nullptr, {}, {}, {}, {}};
      }
      ++depth[ref];
      SchemaNode out = build_impl(resolve_ref(ref), depth);
      --depth[ref];
      return out;
    }

    SchemaNode node;
    std::string type = schema.value("type", "");
    if (type.empty()) {
      if (schema.contains("properties")) type = "object";
      else if (schema.contains("items")) type = "array";
      else type = "string";
    }
    node.kind = value_kind_from_string(type);
    node.constraints = parse_constraints(schema);
    if (schema.contains("format") && schema["format"].is_string())
      node.format = schema["format"].get<std::string>();
    if (schema.contains("example")) node.examples.push_back(schema["example"]);
    if (schema.contains("examples") && schema["examples"].is_array())
      for (const auto& e : schema["examples"]) node.examples.push_back(e);

    if (node.kind == ValueKind::Object && schema.contains("properties")) {
      for (auto it = schema["properties"].begin();
           it != schema["properties"].end(); ++it)
        node.properties[it.key()] = build_impl(it.value(), depth);
    }
    if (node.kind == ValueKind::Array && schema.contains("items"))
      node.items = std::make_shared<SchemaNode>(build_impl(schema["items"], depth));
    if (schema.contains("required") && schema["required"].is_array())
      for (const auto& r : schema["required"])
        if (r.is_string()) node.required_names.insert(r.get<std::string>());
    return node;
  }

  static ConstraintSet parse_constraints(const Json& schema) {
    ConstraintSet cs;
    if (schema.contains("pattern") && schema["pattern"].is_string())
      cs.pattern = schema["pattern"].get<std::string>();
    if (schema.contains("minLength") && schema["minLength"].is_number())
      cs.min_length = schema["minLength"].get<std::size_t>();
    if (schema.contains("maxLength") && schema["maxLength"].is_number())
      cs.max_length = schema["maxLength"].get<std::size_t>();
    if (schema.contains("minimum") && schema["minimum"].is_number())
      cs.minimum = schema["minimum"].get<double>();
    if (schema.contains("maximum") && schema["maximum"].is_number())
      cs.maximum = schema["maximum"].get<double>();
    if (schema.contains("enum") && schema["enum"].is_array()) {
      std::vector<Json> vals;
      for (const auto& v : schema["enum"]) vals.push_back(v);
      if (!vals.empty()) cs.enum_values = std::move(vals);
    }
    return cs;
  }
};

std::vector<std::string> path_template_vars(const std::string& path) {
  std::vector<std::string> vars;
  std::size_t pos = 0;
  while ((pos = path.find('{', pos)) != std::string::npos) {
    auto end = path.find('}', pos);
    if (end == std::string::npos) break;
    vars.push_back(path.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return vars;
}

const Json* pick_json_content(const Json& content) {
  if (!content.is_object()) return nullptr;
  if (content.contains("application/json") &&
      content["application/json"].contains("schema"))
    return &content["application/json"]["schema"];
  for (auto it = content.begin(); it != content.end(); ++it)
    if (it.value().is_object() && it.value().contains("schema"))
      return &it.value()["schema"];
  return nullptr;
}

ParameterDef parse_parameter(const Json& p, SchemaBuilder& builder) {
  ParameterDef def;
  def.name = p.value("name", "");
  if (def.name.empty()) throw MalformedDocument("parameter without a name");
  def.location = param_location_from_string(p.value("in", "query"));
  def.required = p.value("required", false);
  if (def.location == ParamLocation::Path) def.required = true;
  if (p.contains("schema")) {
    SchemaNode schema = builder.build(p["schema"]);
    def.kind = schema.kind;
    def.constraints = schema.constraints;
    def.schema = std::make_shared<SchemaNode>(std::move(schema));
  }
  return def;
}

const char* kHttpMethods[] = {"get",  "put",   "post",  "delete",
                              "options", "head", "patch", "trace"};

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

ApiSpec parse_spec(const std::string& document, SpecFormat format) {
  Json doc;
  if (format == SpecFormat::Json) {
    doc = Json::parse(document, nullptr, false);
    if (doc.is_discarded())
      throw MalformedDocument("document is not valid JSON");
  } else {
    try {
      doc = yaml_to_json(YAML::Load(document));
    } catch (const YAML::Exception& e) {
      throw MalformedDocument(std::string("document is not valid YAML: ") +
                              e.what());
    }
  }
  if (!doc.is_object()) throw MalformedDocument("top level is not a mapping");

  if (doc.contains("swagger"))
    throw UnsupportedSpecVersion(
        "unsupported document: found version field 'swagger: " +
        doc["swagger"].dump() + "'; only OpenAPI 3.x is accepted");

  ApiSpec spec;
  if (doc.contains("info") && doc["info"].is_object())
    spec.title = doc["info"].value("title", "");
  if (doc.contains("servers") && doc["servers"].is_array() &&
      !doc["servers"].empty())
    spec.base_url = doc["servers"][0].value("url", "");

  SchemaBuilder builder(doc);

  if (!doc.contains("paths") || !doc["paths"].is_object() ||
      doc["paths"].empty()) {
    spec.warnings.push_back("NoOperations: document declares no paths");
    return spec;
  }

  std::set<std::string> seen_ids;
  for (auto path_it = doc["paths"].begin(); path_it != doc["paths"].end();
       ++path_it) {
    const std::string& path = path_it.key();
    const Json& item = path_it.value();
    if (!item.is_object()) continue;

    std::vector<ParameterDef> shared_params;
    if (item.contains("parameters") && item["parameters"].is_array())
      for (const auto& p : item["parameters"])
        shared_params.push_back(parse_parameter(p, builder));

    std::vector<std::string> declared;
    for (const char* m : kHttpMethods)
      if (item.contains(m)) declared.push_back(upper(m));

    for (const char* m : kHttpMethods) {
      if (!item.contains(m)) continue;
      const Json& op_json = item[m];
      OperationNode op;
      op.method = upper(m);
      op.path = path;
      op.declared_methods_on_path = declared;
      op.id = op_json.value("operationId", "");
      if (op.id.empty()) op.id = op.method + " " + path;
      if (seen_ids.count(op.id))
        op.id += " (" + path + ")";  // keep ids unique
      seen_ids.insert(op.id);

      op.parameters = shared_params;
      if (op_json.contains("parameters") && op_json["parameters"].is_array())
        for (const auto& p : op_json["parameters"])
          op.parameters.push_back(parse_parameter(p, builder));

      if (op_json.contains("requestBody") &&
          op_json["requestBody"].is_object()) {
        Json body_obj = op_json["requestBody"];
        if (body_obj.contains("$ref")) {
          // requestBody-level ref: inline through the schema builder path
          // by resolving the ref container first
          const std::string ref = body_obj["$ref"].get<std::string>();
          Json resolved = doc;
          const Json* cur = &doc;
          std::stringstream ss(ref.substr(2));
          std::string part;
          bool ok = ref.rfind("#/", 0) == 0;
          while (ok && std::getline(ss, part, '/')) {
            if (!cur->is_object() || !cur->contains(part)) { ok = false; break; }
            cur = &(*cur)[part];
          }
          if (!ok) throw UnresolvableRef("dangling $ref: " + ref);
          body_obj = *cur;
        }
        if (body_obj.contains("content")) {
          if (const Json* schema = pick_json_content(body_obj["content"]))
            op.request_body = builder.build(*schema);
        }
      }

      if (op_json.contains("responses") && op_json["responses"].is_object()) {
        for (auto r = op_json["responses"].begin();
             r != op_json["responses"].end(); ++r) {
          if (!r.value().is_object()) continue;
          if (r.value().contains("content")) {
            if (const Json* schema = pick_json_content(r.value()["content"]))
              op.responses[r.key()] = builder.build(*schema);
          } else if (r.value().contains("schema")) {
            op.responses[r.key()] = builder.build(r.value()["schema"]);
          }
        }
      }

      // body top-level properties surface as body-located parameters
      if (op.request_body && op.request_body->kind == ValueKind::Object) {
        for (const auto& [pname, pschema] : op.request_body->properties) {
          ParameterDef def;
          def.name = pname;
          def.location = ParamLocation::Body;
          def.kind = pschema.kind;
          def.required = op.request_body->required_names.count(pname) > 0;
          def.constraints = pschema.constraints;
          def.schema = std::make_shared<SchemaNode>(pschema);
          op.parameters.push_back(std::move(def));
        }
      }

      // every path template variable must have a path parameter
      for (const auto& var : path_template_vars(path)) {
        bool found = false;
        for (const auto& p : op.parameters)
          if (p.location == ParamLocation::Path && p.name == var) found = true;
        if (!found) {
          ParameterDef def;
          def.name = var;
          def.location = ParamLocation::Path;
          def.kind = ValueKind::String;
          def.required = true;
          op.parameters.push_back(std::move(def));
          spec.warnings.push_back("synthesized path parameter '" + var +
                                  "' for " + op.id);
        }
      }

      spec.operations.push_back(std::move(op));
    }
  }
  if (spec.operations.empty())
    spec.warnings.push_back("NoOperations: document declares no operations");
  return spec;
}

ApiSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open spec file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const bool yaml = path.size() > 5 && (path.ends_with(".yaml") ||
                                        path.ends_with(".yml"));
  return parse_spec(buf.str(), yaml ? SpecFormat::Yaml : SpecFormat::Json);
}

namespace {

void collect_leaf_names(const SchemaNode& node, std::vector<std::string>& out,
                        int depth = 0) {
  if (depth > 16) return;
  if (node.kind == ValueKind::Object) {
    for (const auto& [name, child] : node.properties) {
      out.push_back(name);
      collect_leaf_names(child, out, depth + 1);
    }
  } else if (node.kind == ValueKind::Array && node.items) {
    collect_leaf_names(*node.items, out, depth + 1);
  }
}

}  // namespace

namespace {

void collect_output_paths(const SchemaNode& node, const std::string& prefix,
                          std::vector<std::pair<std::string, std::string>>& out,
                          int depth = 0) {
  if (depth > 16) return;
  if (node.kind == ValueKind::Object) {
    for (const auto& [name, child] : node.properties) {
      const std::string path = prefix.empty() ? name : prefix + "." + name;
      out.emplace_back(path, name);
      collect_output_paths(child, path, out, depth + 1);
    }
  } else if (node.kind == ValueKind::Array && node.items) {
    collect_output_paths(*node.items, prefix, out, depth + 1);
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> response_output_paths(
    const OperationNode& op) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  for (const auto& [code, schema] : op.responses) {
    if (code.empty() || code[0] != '2') continue;
    std::vector<std::pair<std::string, std::string>> paths;
    collect_output_paths(schema, "", paths);
    for (auto& p : paths)
      if (seen.insert(p.first).second) out.push_back(std::move(p));
  }
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> extract_io_names(
    const OperationNode& op) {
  std::vector<std::string> inputs;
  std::set<std::string> seen;
  auto add = [&](std::vector<std::string>& dst, const std::string& n) {
    if (seen.insert(n).second) dst.push_back(n);
  };
  for (const auto& p : op.parameters) add(inputs, p.name);
  if (op.request_body) {
    std::vector<std::string> body_names;
    collect_leaf_names(*op.request_body, body_names);
    for (const auto& n : body_names) add(inputs, n);
  }

  std::vector<std::string> outputs;
  seen.clear();
  for (const auto& [code, schema] : op.responses) {
    if (code.empty() || code[0] != '2') continue;  // 2xx only
    std::vector<std::string> names;
    collect_leaf_names(schema, names);
    for (const auto& n : names) add(outputs, n);
  }
  return {inputs, outputs};
}

namespace {

Json constraints_to_json(const ConstraintSet& cs) {
  Json j = Json::object();
  if (cs.pattern) j["pattern"] = *cs.pattern;
  if (cs.min_length) j["minLength"] = *cs.min_length;
  if (cs.max_length) j["maxLength"] = *cs.max_length;
  if (cs.minimum) j["minimum"] = *cs.minimum;
  if (cs.maximum) j["maximum"] = *cs.maximum;
  if (cs.enum_values) j["enum"] = *cs.enum_values;
  return j;
}

ConstraintSet constraints_from_json(const Json& j) {
  ConstraintSet cs;
  if (j.contains("pattern")) cs.pattern = j["pattern"].get<std::string>();
  if (j.contains("minLength")) cs.min_length = j["minLength"].get<std::size_t>();
  if (j.contains("maxLength")) cs.max_length = j["maxLength"].get<std::size_t>();
  if (j.contains("minimum")) cs.minimum = j["minimum"].get<double>();
  if (j.contains("maximum")) cs.maximum = j["maximum"].get<double>();
  if (j.contains("enum"))
    cs.enum_values = std::vector<Json>(j["enum"].begin(), j["enum"].end());
  return cs;
}

Json schema_to_json(const SchemaNode& node) {
  Json j = Json::object();
  j["type"] = to_string(node.kind);
  j["constraints"] = constraints_to_json(node.constraints);
  if (node.format) j["format"] = *node.format;
  if (!node.examples.empty()) j["examples"] = node.examples;
  if (!node.required_names.empty())
    j["required"] = node.required_names;
  if (!node.properties.empty()) {
    Json props = Json::object();
    for (const auto& [name, child] : node.properties)
      props[name] = schema_to_json(child);
    j["properties"] = std::move(props);
  }
  if (node.items) j["items"] = schema_to_json(*node.items);
  return j;
}

SchemaNode schema_from_json(const Json& j) {
  SchemaNode node;
  node.kind = value_kind_from_string(j.value("type", "object"));
  if (j.contains("constraints"))
    node.constraints = constraints_from_json(j["constraints"]);
  if (j.contains("format")) node.format = j["format"].get<std::string>();
  if (j.contains("examples"))
    node.examples = std::vector<Json>(j["examples"].begin(), j["examples"].end());
  if (j.contains("required"))
    for (const auto& r : j["required"])
      node.required_names.insert(r.get<std::string>());
  if (j.contains("properties"))
    for (auto it = j["properties"].begin(); it != j["properties"].end(); ++it)
      node.properties[it.key()] = schema_from_json(it.value());
  if (j.contains("items"))
    node.items = std::make_shared<SchemaNode>(schema_from_json(j["items"]));
  return node;
}

}  // namespace

Json spec_to_json(const ApiSpec& spec) {
  Json j;
  j["title"] = spec.title;
  j["base_url"] = spec.base_url;
  j["warnings"] = spec.warnings;
  Json ops = Json::array();
  for (const auto& op : spec.operations) {
    Json o;
    o["id"] = op.id;
    o["method"] = op.method;
    o["path"] = op.path;
    o["declared_methods_on_path"] = op.declared_methods_on_path;
    Json params = Json::array();
    for (const auto& p : op.parameters) {
      Json pj;
      pj["name"] = p.name;
      pj["in"] = to_string(p.location);
      pj["type"] = to_string(p.kind);
      pj["required"] = p.required;
      pj["constraints"] = constraints_to_json(p.constraints);
      if (p.schema) pj["schema"] = schema_to_json(*p.schema);
      params.push_back(std::move(pj));
    }
    o["parameters"] = std::move(params);
    if (op.request_body) o["request_body"] = schema_to_json(*op.request_body);
    Json resp = Json::object();
    for (const auto& [code, schema] : op.responses)
      resp[code] = schema_to_json(schema);
    o["responses"] = std::move(resp);
    ops.push_back(std::move(o));
  }
  j["operations"] = std::move(ops);
  return j;
}

ApiSpec spec_from_json(const Json& j) {
  ApiSpec spec;
  spec.title = j.value("title", "");
  spec.base_url = j.value("base_url", "");
  if (j.contains("warnings"))
    spec.warnings =
        std::vector<std::string>(j["warnings"].begin(), j["warnings"].end());
  for (const auto& o : j["operations"]) {
    OperationNode op;
    op.id = o["id"].get<std::string>();
    op.method = o["method"].get<std::string>();
    op.path = o["path"].get<std::string>();
    if (o.contains("declared_methods_on_path"))
      op.declared_methods_on_path = std::vector<std::string>(
          o["declared_methods_on_path"].begin(),
          o["declared_methods_on_path"].end());
    for (const auto& pj : o["parameters"]) {
      ParameterDef p;
      p.name = pj["name"].get<std::string>();
      p.location = param_location_from_string(pj["in"].get<std::string>());
      p.kind = value_kind_from_string(pj["type"].get<std::string>());
      p.required = pj["required"].get<bool>();
      p.constraints = constraints_from_json(pj["constraints"]);
      if (pj.contains("schema"))
        p.schema = std::make_shared<SchemaNode>(schema_from_json(pj["schema"]));
      op.parameters.push_back(std::move(p));
    }
    if (o.contains("request_body"))
      op.request_body = schema_from_json(o["request_body"]);
    if (o.contains("responses"))
      for (auto it = o["responses"].begin(); it != o["responses"].end(); ++it)
        op.responses[it.key()] = schema_from_json(it.value());
    spec.operations.push_back(std::move(op));
  }
  return spec;
}

}  // namespace restrl
