#pragma once

#include <string>
#include <vector>

#include "hiersum/hiergraph.hpp"
#include "hiersum/ops.hpp"
#include "hiersum/rng.hpp"
#include "hiersum/tensor.hpp"

namespace hiersum {

struct GatHeadParams {
  Tensor w_in;   // d_in x d_head
  Tensor a_src;  // d_head x 1, first half of the attention vector
  Tensor a_dst;  // d_head x 1, second half
  Tensor w_v;    // d_in x d_head
};

struct GatLayerParams {
  std::vector<GatHeadParams> heads;
  double leaky_slope = 0.2;

  size_t d_in() const { return heads.at(0).w_in.rows(); }
  size_t d_out() const { return heads.size() * heads.at(0).w_in.cols(); }
};

struct HierLayerParams {
  GatLayerParams intra;    // sentence <-> sentence, same section
  GatLayerParams sen2sec;  // sections attend over their sentences
  GatLayerParams inter;    // section-level nodes, fully connected
  Tensor w_b;              // 2d x d fuse matrix
};

struct ModelDims {
  size_t d = 64;         // node embedding dimension
  size_t d_h = 128;      // scoring head hidden size
  size_t heads = 8;      // attention heads (must divide d)
  size_t layers = 2;     // hierarchical iterations
  size_t embed_dim = 0;  // provider dimension; 0 or ==d means no projection
  double leaky_slope = 0.2;
};

struct ModelParams {
  ModelDims dims;
  Tensor input_proj;  // embed_dim x d, undefined when no projection needed
  GatLayerParams gcl;
  std::vector<HierLayerParams> hier;
  Tensor w_o1;  // 2d x d_h
  Tensor w_o2;  // d_h x 1

  static ModelParams init(const ModelDims& dims, Rng& rng);

  // Deep copy: fresh leaves with the same values (gradients not copied).
  ModelParams clone() const;

  // Stable registration order; shared by Adam, checkpoints, gradcheck.
  std::vector<std::pair<std::string, Tensor>> named() const;
  std::vector<Tensor> tensors() const;
  void zero_grad();
};

// Attention neighborhoods derived from the graph. Kept explicit so tests and
// ablations can substitute their own connectivity.
Mask build_gcl_mask(const HierGraph& g);  // all edge sets + self-loops
struct HierMasks {
  Mask intra;    // n_sen x n_sen
  Mask sen2sec;  // (n_sec+1) x (n_sen + n_sec + 1); keys are [H_sen ; H_sec]
  Mask inter;    // (n_sec+1) x (n_sec+1)
};
HierMasks build_hier_masks(const HierGraph& g);

struct ForwardOptions {
  double dropout = 0.0;
  bool train = false;
  bool hierarchical = true;
  double tau = 0.1;
};

// One multi-head GAT pass. Queries attend over keys at the positions allowed
// by the mask; every row must allow at least one key (EmptyNeighborhood).
// Scores use the leaky-relu attention form; per-head aggregation goes through
// ELU and heads are concatenated. Attention weights get (inverted) dropout
// when training.
Tensor gat_forward(const Tensor& queries, const Tensor& keys, const Mask& mask,
                   const GatLayerParams& p, double dropout, bool train,
                   Rng& rng);

struct GclOutput {
  Tensor h_sen;  // n x d, theme-aware sentence rows
  Tensor h_sec;  // (n_sec+1) x d, updated section rows (last = document)
  Tensor h_doc;  // 1 x d view of the document row
};

// One GAT pass over the full hierarchical graph (all edge sets united).
GclOutput gcl_forward(const HierGraph& g, const NodeFeatures& feats,
                      const GatLayerParams& p, double dropout, bool train,
                      Rng& rng);

// InfoNCE-style pull of positive sentences toward the document node:
// mean over positives i of -log softmax_i(cos(h_doc, h_j)/tau over all j).
Tensor contrastive_loss(const Tensor& h_doc, const Tensor& h_sen,
                        const std::vector<size_t>& positives, double tau);

// Four-step hierarchical update: intra-section GAT, sentence->section GAT,
// inter-section GAT, then fuse each sentence with its updated section row.
struct HierOutput {
  Tensor h_sen;
  Tensor h_sec;
};
HierOutput hier_layer(const Tensor& h_sen, const Tensor& h_sec,
                      const HierGraph& g, const HierMasks& masks,
                      const HierLayerParams& p, double dropout, bool train,
                      Rng& rng);

// Per-sentence confidence: sigmoid over a leaky-relu hidden layer on
// [sentence row || its section row].
Tensor score_head(const Tensor& h_sen, const Tensor& h_sec,
                  const std::vector<size_t>& sec_of, const Tensor& w_o1,
                  const Tensor& w_o2, double leaky_slope);

// Class-weighted binary cross entropy, mean over the document's sentences;
// predictions are clamped to [1e-12, 1-1e-12] inside the log.
Tensor weighted_bce(const Tensor& y_hat, const std::vector<int>& labels,
                    double eta);

// L_s + lambda * L_c (exactly L_s when lambda == 0).
Tensor total_loss(const Tensor& l_s, const Tensor& l_c, double lambda);

struct ModelOutput {
  Tensor scores;       // n x 1 in (0,1)
  Tensor contrastive;  // scalar; undefined when positives were not supplied
};

// Full pass: GCL, optional hierarchical stack, scoring head. `positives`
// may be empty at inference (no contrastive term is built then).
ModelOutput model_forward(const HierGraph& g, const NodeFeatures& feats,
                          const ModelParams& params,
                          const std::vector<size_t>& positives,
                          const ForwardOptions& opt, Rng& rng);

// Embed + optional input projection + feature init, shared by training and
// inference paths.
NodeFeatures prepare_features(const Document& doc, const HierGraph& g,
                              const Tensor& raw_embedding,
                              const ModelParams& params);

}  // namespace hiersum
