#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hiersum/checkpoint.hpp"
#include "hiersum/config.hpp"
#include "hiersum/corpus.hpp"
#include "hiersum/embeddings.hpp"
#include "hiersum/rouge.hpp"

namespace hiersum {

struct EpochMetrics {
  size_t epoch = 0;  // 1-based, global across resumes
  double train_ls = 0.0;
  double train_lc = 0.0;
  double val_r1 = 0.0;
  double val_r2 = 0.0;
  double val_rl = 0.0;
};

// Validation-improvement tracker: stop once `patience` epochs pass without a
// strict improvement of the best score.
struct EarlyStopper {
  size_t patience;
  size_t best_epoch = 0;
  double best_score = -1.0;

  explicit EarlyStopper(size_t patience, size_t best_epoch = 0,
                        double best_score = -1.0)
      : patience(patience), best_epoch(best_epoch), best_score(best_score) {}

  // Returns true when `score` improves on the best so far.
  bool observe(size_t epoch, double score) {
    if (score > best_score) {
      best_score = score;
      best_epoch = epoch;
      return true;
    }
    return false;
  }
  bool should_stop(size_t epoch) const {
    return best_epoch > 0 && epoch - best_epoch >= patience;
  }
};

struct TrainResult {
  Checkpoint last;                // resumable state after the final epoch
  std::vector<EpochMetrics> log;  // epochs run by this call
};

std::unique_ptr<EmbeddingProvider> make_provider(const TrainConfig& cfg);

// One Adam step per document (a document is one graph), seeded shuffling per
// epoch, validation ROUGE-1 early stopping. Training documents without a
// positive label are dropped with a warning; validation documents need
// abstracts. When out_dir is non-empty, writes metrics.csv,
// checkpoint_last.json and checkpoint_best.json there. `resume` continues
// from a saved state; the seed schedule is a pure function of (seed, epoch),
// so a resumed run reproduces the uninterrupted one bit for bit.
TrainResult train(const std::vector<Document>& train_docs,
                  const std::vector<Document>& val_docs,
                  const TrainConfig& cfg, const std::string& out_dir = "",
                  const Checkpoint* resume = nullptr);

// Macro-averaged ROUGE of top-k extraction against the abstracts.
RougeTriple validate(const std::vector<Document>& docs,
                     const ModelParams& params, const TrainConfig& cfg,
                     EmbeddingProvider& provider);

// Scores one document with the model (no-grad); returns the n raw
// confidences.
std::vector<double> score_document(const Document& doc,
                                   const ModelParams& params,
                                   const TrainConfig& cfg,
                                   EmbeddingProvider& provider);

void write_metrics_csv(const std::vector<EpochMetrics>& log,
                       const std::string& path);

}  // namespace hiersum
