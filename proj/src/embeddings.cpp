#include "hiersum/embeddings.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hiersum/rng.hpp"

namespace hiersum {

using nlohmann::json;

HashEmbeddingProvider::HashEmbeddingProvider(size_t dim, uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim == 0) throw DimensionMismatch("hash embedding dimension must be > 0");
}

std::vector<double> HashEmbeddingProvider::token_vector(
    const std::string& token) const {
  Rng rng(mix_seed(seed_, hash_string(token)));
  std::vector<double> v(dim_);
  double norm2 = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  if (norm2 <= 0.0) {
    v[0] = 1.0;  // vanishing draw; any unit vector will do
    return v;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

Tensor HashEmbeddingProvider::embed(const Document& doc) {
  const size_t n = doc.n_sentences();
  std::vector<double> out(n * dim_, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const auto& toks = doc.sentences[i].tokens;
    for (const std::string& t : toks) {
      auto v = token_vector(t);
      for (size_t j = 0; j < dim_; ++j) out[i * dim_ + j] += v[j];
    }
    const double inv = 1.0 / static_cast<double>(toks.size());
    for (size_t j = 0; j < dim_; ++j) out[i * dim_ + j] *= inv;
  }
  return Tensor::from(n, dim_, std::move(out));
}

FileEmbeddingProvider::FileEmbeddingProvider(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed embeddings JSON: ") + e.what(),
                       lineno);
    }
    try {
      std::string id = j.at("id").get<std::string>();
      std::vector<std::vector<double>> rows;
      for (const json& row : j.at("vectors"))
        rows.push_back(row.get<std::vector<double>>());
      for (const auto& r : rows) {
        if (dim_ == 0) dim_ = r.size();
        if (r.size() != dim_ || dim_ == 0)
          throw DimensionMismatch("embeddings file has ragged or empty rows");
      }
      table_[id] = std::move(rows);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad embeddings object: ") + e.what(),
                       lineno);
    }
  }
}

Tensor FileEmbeddingProvider::embed(const Document& doc) {
  auto it = table_.find(doc.id);
  if (it == table_.end()) throw MissingEmbedding(doc.id, 0);
  const auto& rows = it->second;
  const size_t n = doc.n_sentences();
  if (rows.size() < n) throw MissingEmbedding(doc.id, rows.size());
  std::vector<double> out(n * dim_);
  for (size_t i = 0; i < n; ++i)
    std::copy(rows[i].begin(), rows[i].end(), out.begin() + i * dim_);
  return Tensor::from(n, dim_, std::move(out));
}

}  // namespace hiersum
