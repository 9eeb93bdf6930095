#include "restrl/spdg.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace restrl {

std::string to_string(ConsumerLocation loc) {
  switch (loc) {
    case ConsumerLocation::Query: return "query";
    case ConsumerLocation::Body: return "body";
    case ConsumerLocation::Path: return "path";
  }
  return "query";
}

std::string to_string(ProducerTarget target) {
  switch (target) {
    case ProducerTarget::Parameters: return "parameters";
    case ProducerTarget::Body: return "body";
    case ProducerTarget::Response: return "response";
  }
  return "response";
}

std::optional<ConsumerLocation> consumer_location_of(ParamLocation loc) {
  switch (loc) {
    case ParamLocation::Query: return ConsumerLocation::Query;
    case ParamLocation::Path: return ConsumerLocation::Query;  // path ~ query
    case ParamLocation::Body: return ConsumerLocation::Body;
    case ParamLocation::Header: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<SpdgEdge*> Spdg::edges_for_consumer(const std::string& op,
                                                const std::string& field) {
  std::vector<SpdgEdge*> out;
  for (auto& e : edges)
    if (e.consumer_op == op && e.consumer_field == field) out.push_back(&e);
  return out;
}

SpdgEdge* Spdg::find_edge(const SpdgEdge& tuple) {
  for (auto& e : edges)
    if (e.same_tuple(tuple)) return &e;
  return nullptr;
}

namespace {

struct FieldVec {
  std::string name;
  ConsumerLocation location;  // meaningful for inputs
  std::vector<double> vec;
  bool oov;
};

}  // namespace

Spdg build_spdg(const ApiSpec& spec, const EmbeddingTable& table,
                const SpdgConfig& config) {
  Spdg graph;
  graph.config = config;

  // precompute name vectors for each operation's inputs and outputs
  std::map<std::string, std::vector<FieldVec>> inputs, outputs;
  for (const auto& op : spec.operations) {
    graph.nodes.push_back(op.id);
    std::vector<FieldVec> ins;
    std::set<std::string> seen;
    for (const auto& p : op.parameters) {
      if (!seen.insert(p.name).second) continue;
      auto loc = consumer_location_of(p.location);
      if (!loc) continue;  // header parameters are out of the taxonomy
      auto nv = name_vector(table, p.name);
      ins.push_back({p.name, *loc, std::move(nv.vector), nv.oov});
    }
    // nested body property names also consume dependencies
    auto [in_names, out_names] = extract_io_names(op);
    for (const auto& n : in_names) {
      if (!seen.insert(n).second) continue;
      auto nv = name_vector(table, n);
      ins.push_back({n, ConsumerLocation::Body, std::move(nv.vector), nv.oov});
    }
    inputs[op.id] = std::move(ins);

    // producer fields carry the dotted path (the data-bank key), scored by
    // their leaf name
    std::vector<FieldVec> outs;
    for (const auto& [path, leaf] : response_output_paths(op)) {
      auto nv = name_vector(table, leaf);
      outs.push_back(
          {path, ConsumerLocation::Query, std::move(nv.vector), nv.oov});
    }
    outputs[op.id] = std::move(outs);
  }

  for (const auto& consumer : spec.operations) {
    double best_any = -1.0;
    for (const auto& producer : spec.operations) {
      if (consumer.id == producer.id) continue;
      for (const auto& in : inputs[consumer.id]) {
        for (const auto& out : outputs[producer.id]) {
          const double score =
              (in.oov || out.oov) ? 0.0 : cosine(in.vec, out.vec);
          best_any = std::max(best_any, score);
          if (score > config.similarity_threshold) {
            SpdgEdge e;
            e.consumer_op = consumer.id;
            e.consumer_field = in.name;
            e.consumer_location = in.location;
            e.producer_op = producer.id;
            e.producer_field = out.name;
            e.producer_target = ProducerTarget::Response;
            e.similarity = score;
            e.refined_weight = score;
            e.origin = EdgeOrigin::Semantic;
            graph.edges.push_back(std::move(e));
          }
        }
      }
    }

    bool has_outgoing = false;
    for (const auto& e : graph.edges)
      if (e.consumer_op == consumer.id) { has_outgoing = true; break; }
    if (has_outgoing || inputs[consumer.id].empty()) continue;

    // fallback: connect to the top-k producers by best field-pair score
    struct Candidate {
      double score;
      std::string producer;
      const FieldVec* in;
      const FieldVec* out;
    };
    std::vector<Candidate> candidates;
    for (const auto& producer : spec.operations) {
      if (consumer.id == producer.id) continue;
      Candidate best{-1.0, producer.id, nullptr, nullptr};
      for (const auto& in : inputs[consumer.id]) {
        for (const auto& out : outputs[producer.id]) {
          const double score =
              (in.oov || out.oov) ? 0.0 : cosine(in.vec, out.vec);
          if (score > best.score) best = {score, producer.id, &in, &out};
        }
      }
      if (best.in) candidates.push_back(best);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       if (a.score != b.score) return a.score > b.score;
                       return a.producer < b.producer;
                     });
    const std::size_t k =
        std::min<std::size_t>(candidates.size(),
                              static_cast<std::size_t>(config.fallback_top_k));
    for (std::size_t i = 0; i < k; ++i) {
      const auto& c = candidates[i];
      SpdgEdge e;
      e.consumer_op = consumer.id;
      e.consumer_field = c.in->name;
      e.consumer_location = c.in->location;
      e.producer_op = c.producer;
      e.producer_field = c.out->name;
      e.producer_target = ProducerTarget::Response;
      e.similarity = std::max(0.0, c.score);
      e.refined_weight = e.similarity;
      e.origin = EdgeOrigin::Semantic;
      e.fallback = true;
      graph.edges.push_back(std::move(e));
    }
  }
  return graph;
}

void refine_edge(Spdg& graph, const SpdgEdge& tuple, EdgeOutcome outcome) {
  SpdgEdge* e = graph.find_edge(tuple);
  if (!e)
    throw UnknownEdge("no edge " + tuple.consumer_op + "." +
                      tuple.consumer_field + " -> " + tuple.producer_op + "." +
                      tuple.producer_field);
  const double step = graph.config.refine_step;
  e->refined_weight += (outcome == EdgeOutcome::Success) ? step : -step;
  e->refined_weight = std::clamp(e->refined_weight, 0.0, 1.0);
  if (e->refined_weight < graph.config.prune_floor) e->pruned = true;
}

SpdgEdge& add_discovered_edge(Spdg& graph, SpdgEdge edge,
                              double initial_weight) {
  if (graph.find_edge(edge))
    throw DuplicateEdge("edge already present: " + edge.consumer_op + "." +
                        edge.consumer_field + " -> " + edge.producer_op + "." +
                        edge.producer_field);
  edge.origin = EdgeOrigin::Discovered;
  edge.similarity = initial_weight;
  edge.refined_weight = std::clamp(initial_weight, 0.0, 1.0);
  graph.edges.push_back(std::move(edge));
  return graph.edges.back();
}

Json spdg_to_json(const Spdg& graph) {
  Json j;
  j["nodes"] = graph.nodes;
  Json edges = Json::array();
  for (const auto& e : graph.edges) {
    Json ej;
    ej["consumer_op"] = e.consumer_op;
    ej["consumer_field"] = e.consumer_field;
    ej["consumer_location"] = to_string(e.consumer_location);
    ej["producer_op"] = e.producer_op;
    ej["producer_field"] = e.producer_field;
    ej["producer_target"] = to_string(e.producer_target);
    ej["similarity"] = e.similarity;
    ej["refined_weight"] = e.refined_weight;
    ej["origin"] = e.origin == EdgeOrigin::Semantic ? "semantic" : "discovered";
    ej["fallback"] = e.fallback;
    ej["pruned"] = e.pruned;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  return j;
}

std::string spdg_to_dot(const Spdg& graph) {
  std::ostringstream out;
  out << "digraph spdg {\n  rankdir=LR;\n";
  for (const auto& n : graph.nodes) out << "  \"" << n << "\";\n";
  for (const auto& e : graph.edges) {
    out << "  \"" << e.consumer_op << "\" -> \"" << e.producer_op
        << "\" [label=\"" << e.consumer_field << "<-" << e.producer_field
        << " " << e.refined_weight << "\"";
    if (e.pruned) out << ", style=dotted";
    else if (e.origin == EdgeOrigin::Discovered) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace restrl
