#pragma once

#include <map>
#include <string>
#include <vector>

#include "restrl/errors.hpp"

namespace restrl {

// Word vectors in GloVe text format: token then whitespace-separated floats,
// one record per line. Dimension is inferred from the first line.
struct EmbeddingTable {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>> vectors;
};

struct NameVector {
  std::string source_name;
  std::vector<double> vector;
  bool oov = false;  // true iff every token was out of vocabulary
};

EmbeddingTable load_embeddings(const std::string& path);
EmbeddingTable parse_embeddings(const std::string& text);

// Split on underscores, hyphens, dots, slashes, digits, and camelCase
// lower-to-upper boundaries; lowercased, empties dropped.
std::vector<std::string> tokenize_identifier(const std::string& name);

// Mean of in-vocabulary token vectors; zero vector with oov=true when
// nothing is in vocabulary.
NameVector name_vector(const EmbeddingTable& table, const std::string& name);

// dot(u,v) / (|u||v|); 0 when either norm is 0.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

// Convenience: cosine between two identifier names under a table.
double name_similarity(const EmbeddingTable& table, const std::string& a,
                       const std::string& b);

}  // namespace restrl
