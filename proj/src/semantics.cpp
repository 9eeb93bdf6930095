#include "restrl/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace restrl {

EmbeddingTable parse_embeddings(const std::string& text) {
  EmbeddingTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::vector<double> vec;
    double x;
    while (ls >> x) vec.push_back(x);
    if (table.dimension == 0) {
      if (vec.empty())
        throw DimensionMismatch("line 1 has no vector components");
      table.dimension = vec.size();
    } else if (vec.size() != table.dimension) {
      throw DimensionMismatch("line " + std::to_string(lineno) + " has " +
                              std::to_string(vec.size()) +
                              " components, expected " +
                              std::to_string(table.dimension));
    }
    table.vectors[token] = std::move(vec);
  }
  if (table.vectors.empty()) throw EmptyFile("embedding file has no records");
  return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmptyFile("cannot open embedding file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_embeddings(buf.str());
}

std::vector<std::string> tokenize_identifier(const std::string& name) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      std::transform(cur.begin(), cur.end(), cur.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      tokens.push_back(cur);
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    const char c = name[i];
    if (c == '_' || c == '-' || c == '.' || c == '/' ||
        std::isdigit(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(c)) && !cur.empty() &&
        std::islower(static_cast<unsigned char>(cur.back()))) {
      flush();
    }
    cur += c;
  }
  flush();
  return tokens;
}

NameVector name_vector(const EmbeddingTable& table, const std::string& name) {
  NameVector nv;
  nv.source_name = name;
  nv.vector.assign(table.dimension, 0.0);
  std::size_t hits = 0;
  for (const auto& tok : tokenize_identifier(name)) {
    auto it = table.vectors.find(tok);
    if (it == table.vectors.end()) continue;
    ++hits;
    for (std::size_t i = 0; i < table.dimension; ++i)
      nv.vector[i] += it->second[i];
  }
  if (hits == 0) {
    nv.oov = true;
    return nv;
  }
  for (auto& x : nv.vector) x /= static_cast<double>(hits);
  return nv;
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size())
    throw DimensionMismatch("cosine: " + std::to_string(u.size()) + " vs " +
                            std::to_string(v.size()));
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double name_similarity(const EmbeddingTable& table, const std::string& a,
                       const std::string& b) {
  return cosine(name_vector(table, a).vector, name_vector(table, b).vector);
}

}  // namespace restrl
