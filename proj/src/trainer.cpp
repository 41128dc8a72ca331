#include "hiersum/trainer.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "hiersum/adam.hpp"
#include "hiersum/extract.hpp"
#include "hiersum/model.hpp"
#include "hiersum/oracle.hpp"

namespace hiersum {

namespace {

struct DocState {
  const Document* doc = nullptr;
  HierGraph graph;
  Tensor raw_embed;  // constant leaf, shared across epochs
  std::vector<size_t> positives;
  double eta = 0.0;
};

ModelDims dims_for(const TrainConfig& cfg, size_t provider_dim) {
  ModelDims d;
  d.d = cfg.d;
  d.d_h = cfg.d_h;
  d.heads = cfg.heads;
  d.layers = cfg.layers;
  d.embed_dim = provider_dim;
  d.leaky_slope = cfg.leaky_slope;
  return d;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const TrainConfig& cfg) {
  if (cfg.provider == "file")
    return std::make_unique<FileEmbeddingProvider>(cfg.embeddings_path);
  return std::make_unique<HashEmbeddingProvider>(cfg.d, cfg.embed_seed);
}

std::vector<double> score_document(const Document& doc,
                                   const ModelParams& params,
                                   const TrainConfig& cfg,
                                   EmbeddingProvider& provider) {
  NoGradGuard no_grad;
  HierGraph g = build_hier_graph(doc);
  NodeFeatures feats = prepare_features(doc, g, provider.embed(doc), params);
  ForwardOptions opt;
  opt.train = false;
  opt.dropout = 0.0;
  opt.hierarchical = cfg.hierarchical;
  opt.tau = cfg.tau;
  Rng rng(0);  // unused: dropout is off
  ModelOutput out = model_forward(g, feats, params, {}, opt, rng);
  return out.scores.val();
}

RougeTriple validate(const std::vector<Document>& docs,
                     const ModelParams& params, const TrainConfig& cfg,
                     EmbeddingProvider& provider) {
  if (docs.empty()) throw EmptyCorpus("validate: empty corpus");
  std::vector<RougeTriple> per_doc(docs.size());
  std::exception_ptr eptr = nullptr;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(docs.size()); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const Document& doc = docs[i];
      if (!doc.has_abstract())
        throw MissingAbstract("validate: document '" + doc.id +
                              "' has no abstract");
      std::vector<double> scores = score_document(doc, params, cfg, provider);
      std::vector<size_t> sel = extract_topk(scores, cfg.k_extract);
      std::vector<TokenList> cand;
      for (size_t s : sel) cand.push_back(doc.sentences[s].tokens);
      per_doc[i] = score_summary(cand, doc.abstract);
    } catch (...) {
#pragma omp critical(hiersum_validate_err)
      if (!eptr) {
        eptr = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  }
  if (eptr) std::rethrow_exception(eptr);
  RougeTriple macro;
  for (const RougeTriple& t : per_doc) {
    macro.r1.f1 += t.r1.f1;
    macro.r1.precision += t.r1.precision;
    macro.r1.recall += t.r1.recall;
    macro.r2.f1 += t.r2.f1;
    macro.r2.precision += t.r2.precision;
    macro.r2.recall += t.r2.recall;
    macro.rl.f1 += t.rl.f1;
    macro.rl.precision += t.rl.precision;
    macro.rl.recall += t.rl.recall;
  }
  const double inv = 1.0 / static_cast<double>(docs.size());
  for (RougeScore* s : {&macro.r1, &macro.r2, &macro.rl}) {
    s->f1 *= inv;
    s->precision *= inv;
    s->recall *= inv;
  }
  return macro;
}

void write_metrics_csv(const std::vector<EpochMetrics>& log,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write metrics file: " + path);
  out << "epoch,train_ls,train_lc,val_r1,val_r2,val_rl\n";
  for (const EpochMetrics& m : log) {
    out << m.epoch << ',' << fmt17(m.train_ls) << ',' << fmt17(m.train_lc)
        << ',' << fmt17(m.val_r1) << ',' << fmt17(m.val_r2) << ','
        << fmt17(m.val_rl) << '\n';
  }
}

TrainResult train(const std::vector<Document>& train_docs,
                  const std::vector<Document>& val_docs,
                  const TrainConfig& cfg, const std::string& out_dir,
                  const Checkpoint* resume) {
  cfg.check();
  if (train_docs.empty()) throw EmptyCorpus("train: empty training corpus");
  if (val_docs.empty()) throw EmptyCorpus("train: empty validation corpus");

  auto provider = make_provider(cfg);

  // Cache per-document graphs, embeddings and label info; drop documents
  // the weighted loss cannot handle.
  std::vector<DocState> states;
  size_t dropped = 0;
  for (const Document& doc : train_docs) {
    if (!doc.has_labels()) {
      ++dropped;
      continue;
    }
    DocState st;
    st.doc = &doc;
    for (size_t i = 0; i < doc.labels.size(); ++i)
      if (doc.labels[i] == 1) st.positives.push_back(i);
    if (st.positives.empty()) {
      ++dropped;
      continue;
    }
    st.eta = imbalance_ratio(doc.labels);
    st.graph = build_hier_graph(doc);
    st.raw_embed = provider->embed(doc);
    states.push_back(std::move(st));
  }
  if (dropped > 0)
    std::cerr << "train: dropped " << dropped
              << " document(s) without positive labels\n";
  if (states.empty())
    throw NoLabeledDocuments("train: no usable labeled documents");

  ModelParams params;
  AdamState adam;
  size_t start_epoch = 1;
  EarlyStopper stopper(cfg.patience);
  std::optional<ModelParams> best_params;
  if (resume) {
    params = resume->params.clone();
    auto tensors = params.tensors();
    adam = resume->adam ? *resume->adam : AdamState::init(tensors);
    start_epoch = resume->epochs_done + 1;
    stopper = EarlyStopper(cfg.patience, resume->best_epoch,
                           resume->best_val_r1);
    if (resume->best_params) best_params = resume->best_params->clone();
  } else {
    Rng init_rng(mix_seed(cfg.seed, 0x1017));
    params = ModelParams::init(dims_for(cfg, provider->dim()), init_rng);
    adam = AdamState::init(params.tensors());
  }
  auto param_tensors = params.tensors();

  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  adam_cfg.weight_decay = cfg.weight_decay;

  TrainResult result;
  size_t epochs_done = start_epoch - 1;
  for (size_t epoch = start_epoch; epoch <= cfg.epochs; ++epoch) {
    // Per-epoch streams depend only on (seed, epoch): resumes reproduce the
    // uninterrupted run exactly.
    Rng shuffle_rng(mix_seed(mix_seed(cfg.seed, epoch), 0x5381));
    Rng dropout_rng(mix_seed(mix_seed(cfg.seed, epoch), 0xd309));

    std::vector<size_t> order(states.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) {
      size_t j = shuffle_rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }

    double sum_ls = 0.0, sum_lc = 0.0;
    for (size_t ix : order) {
      DocState& st = states[ix];
      NodeFeatures feats =
          prepare_features(*st.doc, st.graph, st.raw_embed, params);
      ForwardOptions opt;
      opt.train = true;
      opt.dropout = cfg.dropout;
      opt.hierarchical = cfg.hierarchical;
      opt.tau = cfg.tau;
      ModelOutput out =
          model_forward(st.graph, feats, params, st.positives, opt,
                        dropout_rng);
      Tensor l_s = weighted_bce(out.scores, st.doc->labels, st.eta);
      Tensor loss = total_loss(l_s, out.contrastive, cfg.lambda);
      params.zero_grad();
      backward(loss);
      clip_grad_norm(param_tensors, cfg.grad_clip);
      adam_step(param_tensors, adam, adam_cfg);
      sum_ls += l_s.item();
      sum_lc += out.contrastive.item();
    }

    RougeTriple val = validate(val_docs, params, cfg, *provider);
    EpochMetrics m;
    m.epoch = epoch;
    m.train_ls = sum_ls / static_cast<double>(states.size());
    m.train_lc = sum_lc / static_cast<double>(states.size());
    m.val_r1 = val.r1.f1;
    m.val_r2 = val.r2.f1;
    m.val_rl = val.rl.f1;
    result.log.push_back(m);
    epochs_done = epoch;

    if (stopper.observe(epoch, m.val_r1)) best_params = params.clone();
    if (stopper.should_stop(epoch)) break;
  }

  result.last.config = cfg;
  result.last.params = params.clone();
  result.last.adam = adam;
  result.last.epochs_done = epochs_done;
  result.last.best_epoch = stopper.best_epoch;
  result.last.best_val_r1 = stopper.best_score;
  if (best_params) result.last.best_params = best_params->clone();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_metrics_csv(result.log, out_dir + "/metrics.csv");
    result.last.save(out_dir + "/checkpoint_last.json");
    Checkpoint best;
    best.config = cfg;
    best.params = best_params ? best_params->clone() : params.clone();
    best.epochs_done = stopper.best_epoch;
    best.best_epoch = stopper.best_epoch;
    best.best_val_r1 = stopper.best_score;
    best.save(out_dir + "/checkpoint_best.json");
  }
  return result;
}

}  // namespace hiersum
