#pragma once

#include <utility>
#include <vector>

#include "hiersum/corpus.hpp"
#include "hiersum/tensor.hpp"

namespace hiersum {

// Three-level document graph. Node ids are global: sentence i -> i,
// section j -> n_sen + j, document supernode -> n_sen + n_sec. All edge sets
// are undirected (stored once with u < v) and unweighted.
struct HierGraph {
  size_t n_sen = 0;
  size_t n_sec = 0;
  std::vector<std::pair<size_t, size_t>> e_sen;    // same-section sentence pairs
  std::vector<std::pair<size_t, size_t>> e_sec;    // all section-level pairs
  std::vector<std::pair<size_t, size_t>> e_cross;  // sentence -> its section
  std::vector<size_t> sec_of;                      // sentence -> section index
  size_t doc_node = 0;                             // global id of the supernode

  size_t n_nodes() const { return n_sen + n_sec + 1; }
  size_t section_node(size_t j) const { return n_sen + j; }
};

HierGraph build_hier_graph(const Document& doc);

// Transformer-style sinusoidal encoding: entry 2i = sin(pos/10000^(2i/d)),
// entry 2i+1 = cos(pos/10000^(2i/d)). d must be even.
std::vector<double> sinusoidal_pe(size_t pos, size_t d);

// Hierarchical position embedding: PE(section index) + PE(position within
// the section).
std::vector<double> hpe(size_t sec_idx, size_t sen_idx, size_t d);

struct NodeFeatures {
  Tensor h_sen;  // n_sen x d
  Tensor h_sec;  // (n_sec + 1) x d, last row = document node
  size_t dim() const { return h_sen.cols(); }
};

// Sentence rows = embeddings + HPE; section rows = mean of their sentence
// rows; document row = mean of the section rows (supernode excluded from its
// own mean). `embedded` must already be n x d; gradients flow through it, so
// a trainable input projection can sit upstream.
NodeFeatures init_node_features(const Document& doc, const HierGraph& g,
                                const Tensor& embedded);

class EmbeddingProvider;
// Convenience overload: embeds with the provider, whose dimension must
// already be the target d (DimensionMismatch otherwise).
NodeFeatures init_node_features(const Document& doc, const HierGraph& g,
                                EmbeddingProvider& embedder);

}  // namespace hiersum
