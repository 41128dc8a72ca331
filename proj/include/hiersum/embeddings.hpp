#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hiersum/corpus.hpp"
#include "hiersum/tensor.hpp"

namespace hiersum {

// Frozen sentence encoder abstraction. Implementations must be deterministic
// per (provider, document); the returned matrix is a constant leaf
// (n_sentences x dim), aligned to global sentence order.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual size_t dim() const = 0;
  virtual Tensor embed(const Document& doc) = 0;
};

// Maps each token to a seeded pseudo-random unit vector and averages over
// the sentence. Stateless apart from a memo cache; the mapping depends only
// on (dim, seed, token), never on the document.
class HashEmbeddingProvider : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(size_t dim, uint64_t seed);
  size_t dim() const override { return dim_; }
  Tensor embed(const Document& doc) override;

  // Unit-norm vector for one token.
  std::vector<double> token_vector(const std::string& token) const;

 private:
  size_t dim_;
  uint64_t seed_;
};

// Reads precomputed vectors from a JSONL file of
// {"id": str, "vectors": [[f64; dim]; n]}, keyed by document id and aligned
// to global sentence order. Throws MissingEmbedding when a document or
// sentence row is absent, DimensionMismatch on ragged rows.
class FileEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const std::string& path);
  size_t dim() const override { return dim_; }
  Tensor embed(const Document& doc) override;

 private:
  size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<std::vector<double>>> table_;
};

}  // namespace hiersum
