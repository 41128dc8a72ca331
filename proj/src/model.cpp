#include "hiersum/model.hpp"

#include <cmath>

namespace hiersum {

namespace {

Tensor xavier_fan(size_t rows, size_t cols, size_t fan_in, size_t fan_out,
                  Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.uniform(-a, a);
  return Tensor::from(rows, cols, std::move(v), /*requires_grad=*/true);
}

Tensor xavier(size_t rows, size_t cols, Rng& rng) {
  return xavier_fan(rows, cols, rows, cols, rng);
}

GatLayerParams init_gat(size_t d_in, size_t d_out, size_t heads, double slope,
                        Rng& rng) {
  if (heads == 0 || d_out % heads != 0)
    throw DimensionMismatch("gat init: head count must divide output dim");
  const size_t d_head = d_out / heads;
  GatLayerParams p;
  p.leaky_slope = slope;
  p.heads.reserve(heads);
  for (size_t t = 0; t < heads; ++t) {
    GatHeadParams h;
    h.w_in = xavier(d_in, d_head, rng);
    // The halves of one attention vector over [q_i || k_j]: fan-in 2*d_head.
    h.a_src = xavier_fan(d_head, 1, 2 * d_head, 1, rng);
    h.a_dst = xavier_fan(d_head, 1, 2 * d_head, 1, rng);
    h.w_v = xavier(d_in, d_head, rng);
    p.heads.push_back(std::move(h));
  }
  return p;
}

void add_gat_params(std::vector<std::pair<std::string, Tensor>>& out,
                    const std::string& prefix, const GatLayerParams& p) {
  for (size_t t = 0; t < p.heads.size(); ++t) {
    const std::string hp = prefix + ".h" + std::to_string(t);
    out.emplace_back(hp + ".w_in", p.heads[t].w_in);
    out.emplace_back(hp + ".a_src", p.heads[t].a_src);
    out.emplace_back(hp + ".a_dst", p.heads[t].a_dst);
    out.emplace_back(hp + ".w_v", p.heads[t].w_v);
  }
}

}  // namespace

ModelParams ModelParams::init(const ModelDims& dims, Rng& rng) {
  if (dims.heads == 0 || dims.d % dims.heads != 0)
    throw DimensionMismatch("model init: heads must divide d");
  ModelParams mp;
  mp.dims = dims;
  if (dims.embed_dim != 0 && dims.embed_dim != dims.d)
    mp.input_proj = xavier(dims.embed_dim, dims.d, rng);
  mp.gcl = init_gat(dims.d, dims.d, dims.heads, dims.leaky_slope, rng);
  mp.hier.reserve(dims.layers);
  for (size_t l = 0; l < dims.layers; ++l) {
    HierLayerParams hl;
    hl.intra = init_gat(dims.d, dims.d, dims.heads, dims.leaky_slope, rng);
    hl.sen2sec = init_gat(dims.d, dims.d, dims.heads, dims.leaky_slope, rng);
    hl.inter = init_gat(dims.d, dims.d, dims.heads, dims.leaky_slope, rng);
    hl.w_b = xavier(2 * dims.d, dims.d, rng);
    mp.hier.push_back(std::move(hl));
  }
  mp.w_o1 = xavier(2 * dims.d, dims.d_h, rng);
  mp.w_o2 = xavier(dims.d_h, 1, rng);
  return mp;
}

namespace {

Tensor clone_leaf(const Tensor& t) {
  return Tensor::from(t.rows(), t.cols(), t.val(), t.requires_grad());
}

GatLayerParams clone_gat(const GatLayerParams& p) {
  GatLayerParams out;
  out.leaky_slope = p.leaky_slope;
  out.heads.reserve(p.heads.size());
  for (const GatHeadParams& h : p.heads)
    out.heads.push_back({clone_leaf(h.w_in), clone_leaf(h.a_src),
                         clone_leaf(h.a_dst), clone_leaf(h.w_v)});
  return out;
}

}  // namespace

ModelParams ModelParams::clone() const {
  ModelParams out;
  out.dims = dims;
  if (input_proj.defined()) out.input_proj = clone_leaf(input_proj);
  out.gcl = clone_gat(gcl);
  out.hier.reserve(hier.size());
  for (const HierLayerParams& hl : hier)
    out.hier.push_back({clone_gat(hl.intra), clone_gat(hl.sen2sec),
                        clone_gat(hl.inter), clone_leaf(hl.w_b)});
  out.w_o1 = clone_leaf(w_o1);
  out.w_o2 = clone_leaf(w_o2);
  return out;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  if (input_proj.defined()) out.emplace_back("input_proj", input_proj);
  add_gat_params(out, "gcl", gcl);
  for (size_t l = 0; l < hier.size(); ++l) {
    const std::string lp = "hier" + std::to_string(l);
    add_gat_params(out, lp + ".intra", hier[l].intra);
    add_gat_params(out, lp + ".sen2sec", hier[l].sen2sec);
    add_gat_params(out, lp + ".inter", hier[l].inter);
    out.emplace_back(lp + ".w_b", hier[l].w_b);
  }
  out.emplace_back("head.w_o1", w_o1);
  out.emplace_back("head.w_o2", w_o2);
  return out;
}

std::vector<Tensor> ModelParams::tensors() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named()) {
    (void)name;
    out.push_back(t);
  }
  return out;
}

void ModelParams::zero_grad() {
  for (auto& t : tensors()) t.zero_grad();
}

Mask build_gcl_mask(const HierGraph& g) {
  const size_t n = g.n_nodes();
  Mask m(n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i);
  auto add = [&m](const std::vector<std::pair<size_t, size_t>>& edges) {
    for (auto [u, v] : edges) {
      m.set(u, v);
      m.set(v, u);
    }
  };
  add(g.e_sen);
  add(g.e_sec);
  add(g.e_cross);
  return m;
}

HierMasks build_hier_masks(const HierGraph& g) {
  HierMasks hm;
  hm.intra = Mask(g.n_sen, g.n_sen);
  for (size_t i = 0; i < g.n_sen; ++i) hm.intra.set(i, i);
  for (auto [u, v] : g.e_sen) {
    hm.intra.set(u, v);
    hm.intra.set(v, u);
  }

  // Section-level queries over keys [H_sen ; H_sec]; each section sees its
  // own sentences plus itself, the supernode only itself.
  const size_t rows = g.n_sec + 1;
  hm.sen2sec = Mask(rows, g.n_nodes());
  for (size_t j = 0; j < rows; ++j) hm.sen2sec.set(j, g.n_sen + j);
  for (size_t i = 0; i < g.n_sen; ++i) hm.sen2sec.set(g.sec_of[i], i);

  hm.inter = Mask(rows, rows);
  for (size_t p = 0; p < rows; ++p) hm.inter.set(p, p);
  for (auto [u, v] : g.e_sec) {
    hm.inter.set(u - g.n_sen, v - g.n_sen);
    hm.inter.set(v - g.n_sen, u - g.n_sen);
  }
  return hm;
}

Tensor gat_forward(const Tensor& queries, const Tensor& keys, const Mask& mask,
                   const GatLayerParams& p, double dropout, bool train,
                   Rng& rng) {
  if (queries.cols() != p.d_in() || keys.cols() != p.d_in())
    throw DimensionMismatch("gat_forward: feature dim does not match params");
  if (mask.rows != queries.rows() || mask.cols != keys.rows())
    throw ShapeMismatch("gat_forward: mask shape mismatch");
  for (size_t i = 0; i < mask.rows; ++i) {
    bool any = false;
    for (size_t j = 0; j < mask.cols && !any; ++j) any = mask.at(i, j) != 0;
    if (!any)
      throw EmptyNeighborhood("gat_forward: node " + std::to_string(i) +
                              " has an empty neighborhood");
  }

  Tensor out;
  for (const GatHeadParams& h : p.heads) {
    Tensor q = ops::matmul(queries, h.w_in);
    Tensor k = ops::matmul(keys, h.w_in);
    Tensor v = ops::matmul(keys, h.w_v);
    // e_ij = LeakyReLU(a_src . q_i + a_dst . k_j), the split form of the
    // attention vector applied to [q_i || k_j].
    Tensor scores = ops::add(ops::matmul(q, h.a_src),
                             ops::transpose(ops::matmul(k, h.a_dst)));
    Tensor alpha = ops::row_softmax_masked(
        ops::leaky_relu(scores, p.leaky_slope), mask);
    alpha = ops::dropout(alpha, dropout, train, rng);
    Tensor head_out = ops::elu(ops::matmul(alpha, v));
    out = out.defined() ? ops::concat_cols(out, head_out) : head_out;
  }
  return out;
}

GclOutput gcl_forward(const HierGraph& g, const NodeFeatures& feats,
                      const GatLayerParams& p, double dropout, bool train,
                      Rng& rng) {
  if (feats.h_sen.rows() != g.n_sen || feats.h_sec.rows() != g.n_sec + 1)
    throw ShapeMismatch("gcl_forward: features do not match graph");
  Tensor h_all = ops::concat_rows(feats.h_sen, feats.h_sec);
  Tensor updated =
      gat_forward(h_all, h_all, build_gcl_mask(g), p, dropout, train, rng);

  std::vector<size_t> sen_ids(g.n_sen), sec_ids(g.n_sec + 1);
  for (size_t i = 0; i < g.n_sen; ++i) sen_ids[i] = i;
  for (size_t j = 0; j <= g.n_sec; ++j) sec_ids[j] = g.n_sen + j;
  GclOutput out;
  out.h_sen = ops::select_rows(updated, sen_ids);
  out.h_sec = ops::select_rows(updated, sec_ids);
  out.h_doc = ops::select_rows(updated, {g.doc_node});
  return out;
}

Tensor contrastive_loss(const Tensor& h_doc, const Tensor& h_sen,
                        const std::vector<size_t>& positives, double tau) {
  if (positives.empty())
    throw NoPositives("contrastive_loss: positive set is empty");
  if (tau <= 0.0) throw LogicError("contrastive_loss: tau must be positive");
  Tensor sims = ops::cosine_rows(h_sen, h_doc);
  Tensor logits = ops::scale(sims, 1.0 / tau);
  // Cosine keeps logits in [-1/tau, 1/tau]; the plain log-sum-exp is safe.
  Tensor lse = ops::log(ops::sum(ops::exp(logits)));
  Tensor pos_mean = ops::scale(ops::sum(ops::select_rows(logits, positives)),
                               1.0 / static_cast<double>(positives.size()));
  return ops::add(lse, ops::scale(pos_mean, -1.0));
}

HierOutput hier_layer(const Tensor& h_sen, const Tensor& h_sec,
                      const HierGraph& g, const HierMasks& masks,
                      const HierLayerParams& p, double dropout, bool train,
                      Rng& rng) {
  Tensor h1 = gat_forward(h_sen, h_sen, masks.intra, p.intra, dropout, train,
                          rng);
  Tensor keys = ops::concat_rows(h1, h_sec);
  Tensor h_sec_mid =
      gat_forward(h_sec, keys, masks.sen2sec, p.sen2sec, dropout, train, rng);
  Tensor h_sec_next = gat_forward(h_sec_mid, h_sec_mid, masks.inter, p.inter,
                                  dropout, train, rng);
  Tensor gathered = ops::select_rows(h_sec_next, g.sec_of);
  HierOutput out;
  out.h_sen = ops::elu(ops::matmul(ops::concat_cols(h1, gathered), p.w_b));
  out.h_sec = h_sec_next;
  return out;
}

Tensor score_head(const Tensor& h_sen, const Tensor& h_sec,
                  const std::vector<size_t>& sec_of, const Tensor& w_o1,
                  const Tensor& w_o2, double leaky_slope) {
  Tensor gathered = ops::select_rows(h_sec, sec_of);
  Tensor z = ops::leaky_relu(
      ops::matmul(ops::concat_cols(h_sen, gathered), w_o1), leaky_slope);
  return ops::sigmoid(ops::matmul(z, w_o2));
}

Tensor weighted_bce(const Tensor& y_hat, const std::vector<int>& labels,
                    double eta) {
  const size_t n = y_hat.size();
  if (labels.size() != n)
    throw LengthMismatch("weighted_bce: labels length " +
                         std::to_string(labels.size()) + " != predictions " +
                         std::to_string(n));
  static constexpr double kEps = 1e-12;
  auto lab = std::make_shared<std::vector<int>>(labels);
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double y = std::min(1.0 - kEps, std::max(kEps, y_hat.val()[i]));
    loss -= labels[i] == 1 ? eta * std::log(y) : std::log(1.0 - y);
  }
  loss /= static_cast<double>(n);
  return make_op(1, 1, {loss}, {y_hat}, [lab, eta](TensorNode& self) {
    TensorNode* x = self.parents[0].node();
    if (!x->requires_grad) return;
    ensure_grad(*x);
    const double g = self.grad[0];
    const size_t n = x->val.size();
    for (size_t i = 0; i < n; ++i) {
      const double raw = x->val[i];
      if (raw <= kEps || raw >= 1.0 - kEps) continue;  // clamped: flat
      const double d = (*lab)[i] == 1 ? -eta / raw : 1.0 / (1.0 - raw);
      x->grad[i] += g * d / static_cast<double>(n);
    }
  });
}

Tensor total_loss(const Tensor& l_s, const Tensor& l_c, double lambda) {
  if (lambda < 0.0) throw LogicError("total_loss: lambda must be >= 0");
  if (lambda == 0.0) return l_s;
  if (!l_c.defined())
    throw LogicError("total_loss: lambda > 0 requires a contrastive term");
  return ops::add(l_s, ops::scale(l_c, lambda));
}

ModelOutput model_forward(const HierGraph& g, const NodeFeatures& feats,
                          const ModelParams& params,
                          const std::vector<size_t>& positives,
                          const ForwardOptions& opt, Rng& rng) {
  GclOutput gcl = gcl_forward(g, feats, params.gcl, opt.dropout, opt.train, rng);

  ModelOutput out;
  if (!positives.empty())
    out.contrastive =
        contrastive_loss(gcl.h_doc, gcl.h_sen, positives, opt.tau);

  Tensor h_sen = gcl.h_sen;
  Tensor h_sec = gcl.h_sec;
  if (opt.hierarchical) {
    HierMasks masks = build_hier_masks(g);
    for (const HierLayerParams& hl : params.hier) {
      HierOutput ho =
          hier_layer(h_sen, h_sec, g, masks, hl, opt.dropout, opt.train, rng);
      h_sen = ho.h_sen;
      h_sec = ho.h_sec;
    }
  }
  out.scores = score_head(h_sen, h_sec, g.sec_of, params.w_o1, params.w_o2,
                          params.dims.leaky_slope);
  return out;
}

NodeFeatures prepare_features(const Document& doc, const HierGraph& g,
                              const Tensor& raw_embedding,
                              const ModelParams& params) {
  Tensor x = raw_embedding;
  if (params.input_proj.defined()) {
    if (x.cols() != params.input_proj.rows())
      throw DimensionMismatch("prepare_features: embedding dim " +
                              std::to_string(x.cols()) +
                              " does not match projection");
    x = ops::matmul(x, params.input_proj);
  } else if (x.cols() != params.dims.d) {
    throw DimensionMismatch("prepare_features: embedding dim " +
                            std::to_string(x.cols()) + " != model d " +
                            std::to_string(params.dims.d));
  }
  return init_node_features(doc, g, x);
}

}  // namespace hiersum
