#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "restrl/rng.hpp"
#include "restrl/spdg.hpp"

using namespace restrl;

namespace {

EmbeddingTable fixture_table() {
  return load_embeddings(std::string(RESTRL_DATA_DIR) + "/mini_glove.txt");
}

ApiSpec sim_spec() {
  return parse_spec_file(std::string(RESTRL_DATA_DIR) + "/sim_openapi.json");
}

// toy builder: one operation per (id, inputs, outputs) triple, inputs as
// query parameters, outputs as a flat 200 response schema
ApiSpec toy_spec(
    const std::vector<std::tuple<std::string, std::vector<std::string>,
                                 std::vector<std::string>>>& ops) {
  Json doc;
  doc["openapi"] = "3.0.0";
  doc["info"] = {{"title", "toy"}};
  Json paths = Json::object();
  for (const auto& [id, inputs, outputs] : ops) {
    Json op;
    op["operationId"] = id;
    Json params = Json::array();
    for (const auto& in : inputs)
      params.push_back({{"name", in},
                        {"in", "query"},
                        {"schema", {{"type", "string"}}}});
    op["parameters"] = params;
    Json props = Json::object();
    for (const auto& out : outputs) props[out] = {{"type", "string"}};
    op["responses"] = {
        {"200",
         {{"description", "ok"},
          {"content",
           {{"application/json",
             {{"schema", {{"type", "object"}, {"properties", props}}}}}}}}}};
    paths["/" + id] = {{"get", op}};
  }
  doc["paths"] = paths;
  return parse_spec(doc.dump(), SpecFormat::Json);
}

SpdgEdge tuple_of(const std::string& c_op, const std::string& c_field,
                  const std::string& p_op, const std::string& p_field) {
  SpdgEdge e;
  e.consumer_op = c_op;
  e.consumer_field = c_field;
  e.producer_op = p_op;
  e.producer_field = p_field;
  e.producer_target = ProducerTarget::Response;
  return e;
}

}  // namespace

TEST_CASE("sim spec: orders -> users edge lands at weight 0.9") {
  const auto table = fixture_table();
  const auto spec = sim_spec();
  const auto graph = build_spdg(spec, table, SpdgConfig{});

  const SpdgEdge* found = nullptr;
  for (const auto& e : graph.edges)
    if (e.consumer_op == "GET /orders/{user_id}" &&
        e.consumer_field == "user_id" && e.producer_op == "GET /users/{id}" &&
        e.producer_field == "id")
      found = &e;
  REQUIRE(found != nullptr);
  CHECK(found->similarity == doctest::Approx(0.9).epsilon(0.06));
  CHECK(std::abs(found->similarity - 0.9) <= 0.05);
  CHECK(found->refined_weight == found->similarity);
  CHECK(found->origin == EdgeOrigin::Semantic);
}

TEST_CASE("sim spec: every node has at least one outgoing edge") {
  const auto graph = build_spdg(sim_spec(), fixture_table(), SpdgConfig{});
  for (const auto& node : graph.nodes) {
    bool outgoing = false;
    for (const auto& e : graph.edges)
      if (e.consumer_op == node) outgoing = true;
    CHECK_MESSAGE(outgoing, "node without outgoing edges: ", node);
  }
}

TEST_CASE("build_spdg equals the brute-force oracle on the sim spec") {
  const auto table = fixture_table();
  const auto spec = sim_spec();
  const SpdgConfig config;
  const auto graph = build_spdg(spec, table, config);

  // independent recomputation: every ordered pair, every field pair;
  // producer fields are response paths scored by their leaf name
  std::set<std::tuple<std::string, std::string, std::string, std::string>>
      expected;
  std::map<std::tuple<std::string, std::string, std::string, std::string>,
           double>
      expected_weight;
  for (const auto& a : spec.operations) {
    for (const auto& b : spec.operations) {
      if (a.id == b.id) continue;
      const auto a_io = extract_io_names(a);
      for (const auto& in : a_io.first) {
        // header parameters are outside the taxonomy
        bool is_header = false;
        for (const auto& p : a.parameters)
          if (p.name == in && p.location == ParamLocation::Header)
            is_header = true;
        if (is_header) continue;
        for (const auto& [path, leaf] : response_output_paths(b)) {
          const double s = name_similarity(table, in, leaf);
          if (s > config.similarity_threshold) {
            expected.insert({a.id, in, b.id, path});
            expected_weight[{a.id, in, b.id, path}] = s;
          }
        }
      }
    }
  }

  std::set<std::tuple<std::string, std::string, std::string, std::string>>
      actual;
  for (const auto& e : graph.edges) {
    REQUIRE(!e.fallback);  // sim spec needs no fallback edges
    actual.insert(
        {e.consumer_op, e.consumer_field, e.producer_op, e.producer_field});
    CHECK(e.similarity ==
          expected_weight[{e.consumer_op, e.consumer_field, e.producer_op,
                           e.producer_field}]);
  }
  CHECK(actual == expected);
}

TEST_CASE("single-operation spec builds an edgeless graph") {
  const auto graph =
      build_spdg(toy_spec({{"only", {"id"}, {"id"}}}), fixture_table(),
                 SpdgConfig{});
  CHECK(graph.nodes.size() == 1);
  CHECK(graph.edges.empty());
}

TEST_CASE("no self-edges even with identical field names") {
  const auto graph = build_spdg(toy_spec({{"a", {"id"}, {"id"}},
                                          {"b", {"name"}, {"name"}}}),
                                fixture_table(), SpdgConfig{});
  for (const auto& e : graph.edges) CHECK(e.consumer_op != e.producer_op);
}

TEST_CASE("below-threshold operation receives exactly top-5 fallback edges") {
  const auto table = fixture_table();
  // "page" against six unrelated outputs, all below the 0.7 threshold
  const std::vector<std::string> producers = {"date", "time",  "item",
                                              "sku",  "email", "password"};
  std::vector<std::tuple<std::string, std::vector<std::string>,
                         std::vector<std::string>>>
      ops = {{"consumer", {"page"}, {}}};
  for (const auto& out : producers)
    ops.push_back({"prod_" + out, {}, {out}});
  const auto spec = toy_spec(ops);
  const auto graph = build_spdg(spec, table, SpdgConfig{});

  // precondition: nothing crosses the threshold
  for (const auto& out : producers)
    REQUIRE(name_similarity(table, "page", out) <= 0.7);

  std::vector<const SpdgEdge*> fallback_edges;
  for (const auto& e : graph.edges)
    if (e.consumer_op == "consumer") fallback_edges.push_back(&e);
  REQUIRE(fallback_edges.size() == 5);
  for (const auto* e : fallback_edges) CHECK(e->fallback);

  // brute-force ranking over the six candidates
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& out : producers)
    ranked.emplace_back(name_similarity(table, "page", out), "prod_" + out);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::set<std::string> expected_producers;
  for (int i = 0; i < 5; ++i) expected_producers.insert(ranked[i].second);
  std::set<std::string> actual_producers;
  for (const auto* e : fallback_edges) actual_producers.insert(e->producer_op);
  CHECK(actual_producers == expected_producers);
}

TEST_CASE("threshold soundness: semantic edges exceed 0.7 or carry the fallback flag") {
  const auto graph = build_spdg(sim_spec(), fixture_table(), SpdgConfig{});
  for (const auto& e : graph.edges) {
    if (e.origin != EdgeOrigin::Semantic) continue;
    CHECK((e.similarity > 0.7 || e.fallback));
  }
}

TEST_CASE("refine_edge arithmetic and pruning") {
  Spdg graph;
  graph.config = SpdgConfig{};
  SpdgEdge e = tuple_of("a", "x", "b", "y");
  e.similarity = 0.9;
  e.refined_weight = 0.9;
  graph.nodes = {"a", "b"};
  graph.edges.push_back(e);

  refine_edge(graph, e, EdgeOutcome::Success);
  CHECK(graph.edges[0].refined_weight == doctest::Approx(0.95).epsilon(1e-12));

  graph.edges[0].refined_weight = 1.0;
  refine_edge(graph, e, EdgeOutcome::Success);
  CHECK(graph.edges[0].refined_weight == 1.0);  // clamp

  graph.edges[0].refined_weight = 0.12;
  refine_edge(graph, e, EdgeOutcome::Failure);
  CHECK(graph.edges[0].refined_weight == doctest::Approx(0.07).epsilon(1e-12));
  CHECK(graph.edges[0].pruned);

  CHECK_THROWS_AS(refine_edge(graph, tuple_of("a", "x", "b", "zzz"),
                              EdgeOutcome::Success),
                  UnknownEdge);
}

TEST_CASE("refined_weight stays in [0,1] under any outcome sequence") {
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    Spdg graph;
    graph.config = SpdgConfig{};
    SpdgEdge e = tuple_of("a", "x", "b", "y");
    e.similarity = rng.uniform();
    e.refined_weight = e.similarity;
    graph.edges.push_back(e);
    double prev = e.refined_weight;
    for (int i = 0; i < 200; ++i) {
      const auto outcome =
          rng.coin() ? EdgeOutcome::Success : EdgeOutcome::Failure;
      refine_edge(graph, e, outcome);
      const double now = graph.edges[0].refined_weight;
      CHECK(now >= 0.0);
      CHECK(now <= 1.0);
      if (outcome == EdgeOutcome::Success) CHECK(now >= prev);
      else CHECK(now <= prev);
      prev = now;
    }
  }
}

TEST_CASE("discovered edges insert with the given weight; duplicates throw") {
  Spdg graph;
  graph.config = SpdgConfig{};
  graph.nodes = {"POST /carts", "GET /orders/{user_id}", "POST /register"};

  // a successful random dependency query becomes a new edge
  SpdgEdge q = tuple_of("GET /orders/{user_id}", "user_id", "POST /carts",
                        "cart_id");
  const auto& added = add_discovered_edge(graph, q, 0.75);
  CHECK(added.refined_weight == 0.75);
  CHECK(added.origin == EdgeOrigin::Discovered);

  // an undocumented register response field becomes a producer
  SpdgEdge u = tuple_of("POST /carts", "user_id", "POST /register", "token");
  CHECK(add_discovered_edge(graph, u, 0.85).refined_weight == 0.85);

  CHECK_THROWS_AS(add_discovered_edge(graph, q, 0.5), DuplicateEdge);
}

TEST_CASE("graph export lists nodes and edges with both weights") {
  const auto graph = build_spdg(sim_spec(), fixture_table(), SpdgConfig{});
  const Json j = spdg_to_json(graph);
  CHECK(j["nodes"].size() == 4);
  CHECK(j["edges"].size() == graph.edges.size());
  for (const auto& e : j["edges"]) {
    CHECK(e.contains("similarity"));
    CHECK(e.contains("refined_weight"));
    CHECK(e.contains("origin"));
    CHECK(e.contains("pruned"));
  }
  const std::string dot = spdg_to_dot(graph);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("GET /orders/{user_id}") != std::string::npos);
}
