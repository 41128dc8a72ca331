#include "hiersum/hiergraph.hpp"

#include <cmath>

#include "hiersum/embeddings.hpp"
#include "hiersum/ops.hpp"

namespace hiersum {

HierGraph build_hier_graph(const Document& doc) {
  HierGraph g;
  g.n_sen = doc.n_sentences();
  g.n_sec = doc.n_sections();
  g.doc_node = g.n_sen + g.n_sec;
  g.sec_of.resize(g.n_sen);
  for (size_t i = 0; i < g.n_sen; ++i) g.sec_of[i] = doc.sentences[i].sec_idx;

  for (const Section& sec : doc.sections) {
    for (size_t a = 0; a < sec.sentence_ids.size(); ++a)
      for (size_t b = a + 1; b < sec.sentence_ids.size(); ++b)
        g.e_sen.emplace_back(sec.sentence_ids[a], sec.sentence_ids[b]);
  }
  // Section-level nodes (sections + supernode) are fully connected.
  for (size_t p = 0; p <= g.n_sec; ++p)
    for (size_t q = p + 1; q <= g.n_sec; ++q)
      g.e_sec.emplace_back(g.section_node(p), g.section_node(q));
  for (size_t i = 0; i < g.n_sen; ++i)
    g.e_cross.emplace_back(i, g.section_node(g.sec_of[i]));
  return g;
}

std::vector<double> sinusoidal_pe(size_t pos, size_t d) {
  if (d % 2 != 0)
    throw OddDimension("sinusoidal_pe: dimension must be even, got " +
                       std::to_string(d));
  std::vector<double> out(d);
  const double p = static_cast<double>(pos);
  for (size_t i = 0; 2 * i < d; ++i) {
    const double denom =
        std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(d));
    out[2 * i] = std::sin(p / denom);
    out[2 * i + 1] = std::cos(p / denom);
  }
  return out;
}

std::vector<double> hpe(size_t sec_idx, size_t sen_idx, size_t d) {
  std::vector<double> out = sinusoidal_pe(sec_idx, d);
  std::vector<double> sen = sinusoidal_pe(sen_idx, d);
  for (size_t i = 0; i < d; ++i) out[i] += sen[i];
  return out;
}

NodeFeatures init_node_features(const Document& doc, const HierGraph& g,
                                const Tensor& embedded) {
  const size_t n = g.n_sen, d = embedded.cols();
  if (embedded.rows() != n)
    throw DimensionMismatch("init_node_features: embedding rows != sentences");

  std::vector<double> pe(n * d);
  for (size_t i = 0; i < n; ++i) {
    auto v = hpe(doc.sentences[i].sec_idx, doc.sentences[i].sen_idx, d);
    std::copy(v.begin(), v.end(), pe.begin() + i * d);
  }
  Tensor hpe_mat = Tensor::from(n, d, std::move(pe));

  NodeFeatures f;
  f.h_sen = ops::add(embedded, hpe_mat);

  Tensor sec_rows;  // built section by section
  for (size_t j = 0; j < g.n_sec; ++j) {
    Tensor mean =
        ops::mean_rows(ops::select_rows(f.h_sen, doc.sections[j].sentence_ids));
    sec_rows = j == 0 ? mean : ops::concat_rows(sec_rows, mean);
  }
  Tensor doc_row = ops::mean_rows(sec_rows);  // supernode excludes itself
  f.h_sec = ops::concat_rows(sec_rows, doc_row);
  return f;
}

NodeFeatures init_node_features(const Document& doc, const HierGraph& g,
                                EmbeddingProvider& embedder) {
  return init_node_features(doc, g, embedder.embed(doc));
}

}  // namespace hiersum
