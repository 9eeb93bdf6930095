#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "restrl/semantics.hpp"
#include "restrl/spec_model.hpp"

namespace restrl {

enum class ConsumerLocation { Query, Body, Path };
enum class ProducerTarget { Parameters, Body, Response };
enum class EdgeOrigin { Semantic, Discovered };

std::string to_string(ConsumerLocation loc);
std::string to_string(ProducerTarget target);

// Weighted consumer->producer dependency candidate: the producer operation's
// field may supply a value for the consumer operation's field.
struct SpdgEdge {
  std::string consumer_op;
  std::string consumer_field;
  ConsumerLocation consumer_location = ConsumerLocation::Query;
  std::string producer_op;
  std::string producer_field;
  ProducerTarget producer_target = ProducerTarget::Response;
  double similarity = 0.0;      // the seeding score, fixed at creation
  double refined_weight = 0.0;  // moves with server feedback, clamped [0,1]
  EdgeOrigin origin = EdgeOrigin::Semantic;
  bool fallback = false;  // created by top-k fallback below the threshold
  bool pruned = false;    // dropped below the prune floor, never offered again

  bool same_tuple(const SpdgEdge& other) const {
    return consumer_op == other.consumer_op &&
           consumer_field == other.consumer_field &&
           producer_op == other.producer_op &&
           producer_field == other.producer_field &&
           producer_target == other.producer_target;
  }
};

struct SpdgConfig {
  double similarity_threshold = 0.7;
  int fallback_top_k = 5;
  double refine_step = 0.05;
  double prune_floor = 0.1;
  double discovered_weight = 0.75;  // default for runtime-discovered edges
};

struct Spdg {
  std::vector<std::string> nodes;  // operation ids
  std::vector<SpdgEdge> edges;
  SpdgConfig config;

  std::vector<SpdgEdge*> edges_for_consumer(const std::string& op,
                                            const std::string& field);
  SpdgEdge* find_edge(const SpdgEdge& tuple);
};

// Build the initial graph: an edge a->b for every (input of a, output of b)
// name pair whose cosine similarity exceeds the threshold; operations left
// with no outgoing edges are connected to their top-k most similar producers.
Spdg build_spdg(const ApiSpec& spec, const EmbeddingTable& table,
                const SpdgConfig& config);

enum class EdgeOutcome { Success, Failure };

// Move refined_weight by one step, clamp to [0,1], prune below the floor.
void refine_edge(Spdg& graph, const SpdgEdge& tuple, EdgeOutcome outcome);

// Insert a runtime-discovered edge; throws DuplicateEdge if the tuple exists.
SpdgEdge& add_discovered_edge(Spdg& graph, SpdgEdge edge,
                              double initial_weight);

Json spdg_to_json(const Spdg& graph);
std::string spdg_to_dot(const Spdg& graph);

// Consumer location for a parameter: path behaves like query for the
// dependency taxonomy; header parameters are not dependency consumers.
std::optional<ConsumerLocation> consumer_location_of(ParamLocation loc);

}  // namespace restrl
