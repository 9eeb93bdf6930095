#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "restrl/spec_model.hpp"

using namespace restrl;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// the register snippet with the published constraints
const char* kRegisterDoc = R"({
  "openapi": "3.0.1",
  "info": { "title": "Market", "version": "1" },
  "paths": {
    "/register": {
      "post": {
        "operationId": "createCustomerUsingPOST",
        "requestBody": {
          "content": {
            "application/json": {
              "schema": {
                "type": "object",
                "properties": {
                  "links": { "type": "array", "items": { "$ref": "#/components/schemas/Link" } },
                  "email": { "type": "string", "maxLength": 50,
                             "pattern": "^[\\w-]+(\\.[\\w-]+)*@([\\w-]+\\.)+[a-zA-Z]+$" },
                  "name": { "type": "string", "maxLength": 50, "pattern": "^[\\pL '-]+$" },
                  "password": { "type": "string", "maxLength": 50, "minLength": 6,
                                "pattern": "^[a-zA-Z0-9]+$" }
                }
              }
            }
          }
        },
        "responses": {
          "201": {
            "description": "Created",
            "content": {
              "*/*": { "schema": { "$ref": "#/components/schemas/UserDTORes" } }
            }
          },
          "401": { "description": "Unauthorized" }
        }
      }
    }
  },
  "components": {
    "schemas": {
      "Link": { "type": "object", "properties": { "href": { "type": "string" } } },
      "UserDTORes": {
        "type": "object",
        "properties": {
          "id": { "type": "integer" },
          "email": { "type": "string" },
          "name": { "type": "string" }
        }
      }
    }
  }
})";

}  // namespace

TEST_CASE("register snippet parses with body schema and pattern") {
  const ApiSpec spec = parse_spec(kRegisterDoc, SpecFormat::Json);
  REQUIRE(spec.operations.size() == 1);
  const auto& op = spec.operations[0];
  CHECK(op.id == "createCustomerUsingPOST");
  CHECK(op.method == "POST");
  CHECK(op.path == "/register");
  REQUIRE(op.request_body.has_value());
  const auto& body = *op.request_body;
  CHECK(body.properties.count("links") == 1);
  CHECK(body.properties.count("email") == 1);
  CHECK(body.properties.count("name") == 1);
  CHECK(body.properties.count("password") == 1);
  CHECK(body.properties.at("email").constraints.pattern ==
        "^[\\w-]+(\\.[\\w-]+)*@([\\w-]+\\.)+[a-zA-Z]+$");
  CHECK(body.properties.at("password").constraints.min_length == 6);
  CHECK(body.properties.at("password").constraints.max_length == 50);

  // body top-level properties surface as body-located parameters
  int body_params = 0;
  for (const auto& p : op.parameters)
    if (p.location == ParamLocation::Body) ++body_params;
  CHECK(body_params == 4);
}

TEST_CASE("empty paths parses to zero operations with a warning") {
  const ApiSpec spec =
      parse_spec(R"({"openapi":"3.0.0","info":{"title":"t"},"paths":{}})",
                 SpecFormat::Json);
  CHECK(spec.operations.empty());
  REQUIRE(!spec.warnings.empty());
  CHECK(spec.warnings[0].find("NoOperations") != std::string::npos);
}

TEST_CASE("response $ref inlines to the hand-inlined document's schema") {
  const ApiSpec with_ref =
      parse_spec(read_file(std::string(RESTRL_FIXTURE_DIR) + "/ref_spec.json"),
                 SpecFormat::Json);
  const ApiSpec inlined = parse_spec(
      read_file(std::string(RESTRL_FIXTURE_DIR) + "/ref_spec_inlined.json"),
      SpecFormat::Json);
  REQUIRE(with_ref.operations.size() == 1);
  REQUIRE(inlined.operations.size() == 1);
  CHECK(with_ref.operations[0].responses.at("200") ==
        inlined.operations[0].responses.at("200"));
  CHECK(with_ref.operations[0] == inlined.operations[0]);
}

TEST_CASE("dangling $ref raises UnresolvableRef") {
  const char* doc = R"({
    "openapi": "3.0.0", "info": {"title": "x"},
    "paths": { "/a": { "get": { "responses": { "200": {
      "content": { "application/json": { "schema": { "$ref": "#/components/schemas/Nope" } } }
    } } } } }
  })";
  CHECK_THROWS_AS(parse_spec(doc, SpecFormat::Json), UnresolvableRef);
}

TEST_CASE("swagger 2.0 is rejected naming the version field") {
  try {
    parse_spec(R"({"swagger":"2.0","paths":{}})", SpecFormat::Json);
    FAIL("expected UnsupportedSpecVersion");
  } catch (const UnsupportedSpecVersion& e) {
    CHECK(std::string(e.what()).find("swagger") != std::string::npos);
  }
}

TEST_CASE("malformed JSON raises MalformedDocument") {
  CHECK_THROWS_AS(parse_spec("{not json", SpecFormat::Json), MalformedDocument);
}

TEST_CASE("operationId missing synthesizes METHOD + path") {
  const char* doc = R"({
    "openapi": "3.0.0", "info": {"title": "x"},
    "paths": { "/things/{tid}": {
      "get": { "parameters": [{"name":"tid","in":"path","required":true,
                               "schema":{"type":"string"}}],
               "responses": { "200": { "description": "ok" } } } } }
  })";
  const ApiSpec spec = parse_spec(doc, SpecFormat::Json);
  REQUIRE(spec.operations.size() == 1);
  CHECK(spec.operations[0].id == "GET /things/{tid}");
}

TEST_CASE("path template variables always have a path parameter") {
  const char* doc = R"({
    "openapi": "3.0.0", "info": {"title": "x"},
    "paths": { "/a/{missing}": { "get": { "responses": {} } } }
  })";
  const ApiSpec spec = parse_spec(doc, SpecFormat::Json);
  REQUIRE(spec.operations.size() == 1);
  bool found = false;
  for (const auto& p : spec.operations[0].parameters)
    if (p.name == "missing" && p.location == ParamLocation::Path && p.required)
      found = true;
  CHECK(found);
}

TEST_CASE("YAML documents parse the same as JSON") {
  const char* yaml = R"(
openapi: 3.0.0
info:
  title: YamlFixture
paths:
  /ping:
    get:
      operationId: ping
      responses:
        "200":
          description: ok
)";
  const ApiSpec spec = parse_spec(yaml, SpecFormat::Yaml);
  REQUIRE(spec.operations.size() == 1);
  CHECK(spec.operations[0].id == "ping");
  CHECK(spec.title == "YamlFixture");
}

TEST_CASE("extract_io_names: register inputs and outputs") {
  const ApiSpec spec = parse_spec(kRegisterDoc, SpecFormat::Json);
  const auto [inputs, outputs] = extract_io_names(spec.operations[0]);
  for (const char* expected : {"links", "email", "name", "password"})
    CHECK(std::count(inputs.begin(), inputs.end(), expected) == 1);
  // outputs are the 2xx response property names
  CHECK(outputs == std::vector<std::string>({"email", "id", "name"}));
}

TEST_CASE("extract_io_names: no parameters and no body gives empty inputs") {
  const char* doc = R"({
    "openapi": "3.0.0", "info": {"title": "x"},
    "paths": { "/ping": { "get": { "responses": {} } } }
  })";
  const ApiSpec spec = parse_spec(doc, SpecFormat::Json);
  const auto [inputs, outputs] = extract_io_names(spec.operations[0]);
  CHECK(inputs.empty());
  CHECK(outputs.empty());
}

TEST_CASE("extract_io_names flattens nested body schemas to leaf names") {
  // hand-flattened expectation for {user: {id, email}}
  const char* doc = R"({
    "openapi": "3.0.0", "info": {"title": "x"},
    "paths": { "/a": { "post": {
      "requestBody": { "content": { "application/json": { "schema": {
        "type": "object",
        "properties": { "user": { "type": "object", "properties": {
          "id": { "type": "integer" }, "email": { "type": "string" } } } }
      } } } },
      "responses": {}
    } } }
  })";
  const ApiSpec spec = parse_spec(doc, SpecFormat::Json);
  const auto [inputs, outputs] = extract_io_names(spec.operations[0]);
  CHECK(std::count(inputs.begin(), inputs.end(), "id") == 1);
  CHECK(std::count(inputs.begin(), inputs.end(), "email") == 1);
  CHECK(std::count(inputs.begin(), inputs.end(), "user") == 1);
}

TEST_CASE("parse_spec is deterministic and the model round-trips") {
  const std::string doc =
      read_file(std::string(RESTRL_DATA_DIR) + "/sim_openapi.json");
  const ApiSpec a = parse_spec(doc, SpecFormat::Json);
  const ApiSpec b = parse_spec(doc, SpecFormat::Json);
  CHECK(spec_to_json(a) == spec_to_json(b));
  CHECK(a.operations == b.operations);

  const ApiSpec reread = spec_from_json(spec_to_json(a));
  CHECK(reread.operations == a.operations);
  CHECK(reread.title == a.title);
}

TEST_CASE("circular refs cap at bounded depth instead of diverging") {
  const char* doc = R"({
    "openapi": "3.0.0", "info": {"title": "x"},
    "paths": { "/n": { "get": { "responses": { "200": {
      "content": { "application/json": { "schema": { "$ref": "#/components/schemas/Node" } } }
    } } } } },
    "components": { "schemas": {
      "Node": { "type": "object", "properties": {
        "value": { "type": "integer" },
        "next": { "$ref": "#/components/schemas/Node" } } }
    } }
  })";
  const ApiSpec spec = parse_spec(doc, SpecFormat::Json);
  const auto [inputs, outputs] = extract_io_names(spec.operations[0]);
  CHECK(std::count(outputs.begin(), outputs.end(), "value") == 1);
  CHECK(std::count(outputs.begin(), outputs.end(), "next") == 1);
}

TEST_CASE("every parsed path variable has a path ParameterDef across the corpus") {
  for (const char* file : {"/sim_openapi.json"}) {
    const ApiSpec spec =
        parse_spec(read_file(std::string(RESTRL_DATA_DIR) + file),
                   SpecFormat::Json);
    for (const auto& op : spec.operations) {
      std::string path = op.path;
      std::size_t pos = 0;
      while ((pos = path.find('{', pos)) != std::string::npos) {
        const auto end = path.find('}', pos);
        const std::string var = path.substr(pos + 1, end - pos - 1);
        bool found = false;
        for (const auto& p : op.parameters)
          if (p.name == var && p.location == ParamLocation::Path && p.required)
            found = true;
        CHECK_MESSAGE(found, op.id, " missing path param ", var);
        pos = end + 1;
      }
    }
  }
}
