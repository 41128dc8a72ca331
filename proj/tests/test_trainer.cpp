#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hiersum/trainer.hpp"

using namespace hiersum;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.d = 16;
  cfg.d_h = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.epochs = 2;
  cfg.k_extract = 5;
  cfg.dropout = 0.1;
  cfg.seed = 404;
  return cfg;
}

}  // namespace

TEST_CASE("early stopper traces the documented schedule") {
  // Scores per epoch: 40, 41, 40.5, 40.9, 40.3 with patience 3
  // -> best at epoch 2, stop after epoch 5.
  EarlyStopper st(3);
  const double scores[] = {40.0, 41.0, 40.5, 40.9, 40.3, 99.0};
  size_t stopped_after = 0;
  for (size_t e = 1; e <= 6; ++e) {
    st.observe(e, scores[e - 1]);
    if (st.should_stop(e)) {
      stopped_after = e;
      break;
    }
  }
  CHECK(stopped_after == 5);
  CHECK(st.best_epoch == 2);
  CHECK(st.best_score == 41.0);
}

TEST_CASE("train input validation") {
  TrainConfig cfg = tiny_config();
  auto docs = gen_synthetic(1, 3);
  SUBCASE("empty corpora") {
    CHECK_THROWS_AS(train({}, docs, cfg), EmptyCorpus);
    CHECK_THROWS_AS(train(docs, {}, cfg), EmptyCorpus);
  }
  SUBCASE("no labeled documents") {
    auto unlabeled = docs;
    for (auto& d : unlabeled) d.labels.clear();
    CHECK_THROWS_AS(train(unlabeled, docs, cfg), NoLabeledDocuments);
  }
  SUBCASE("validation documents need abstracts") {
    auto no_abs = docs;
    for (auto& d : no_abs) {
      d.abstract.clear();
      d.abstract_text.clear();
    }
    CHECK_THROWS_AS(train(docs, no_abs, cfg), MissingAbstract);
  }
}

TEST_CASE("identical runs produce byte-identical metrics and checkpoints") {
  auto docs = gen_synthetic(31, 6);
  std::vector<Document> tr(docs.begin(), docs.begin() + 4);
  std::vector<Document> va(docs.begin() + 4, docs.end());
  TrainConfig cfg = tiny_config();
  namespace fs = std::filesystem;
  fs::path dir_a = fs::temp_directory_path() / "hiersum_test_run_a";
  fs::path dir_b = fs::temp_directory_path() / "hiersum_test_run_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  train(tr, va, cfg, dir_a.string());
  train(tr, va, cfg, dir_b.string());
  CHECK(slurp((dir_a / "metrics.csv").string()) ==
        slurp((dir_b / "metrics.csv").string()));
  CHECK(slurp((dir_a / "checkpoint_last.json").string()) ==
        slurp((dir_b / "checkpoint_last.json").string()));
  CHECK(slurp((dir_a / "checkpoint_best.json").string()) ==
        slurp((dir_b / "checkpoint_best.json").string()));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("resume reproduces the uninterrupted run bit for bit") {
  auto docs = gen_synthetic(32, 6);
  std::vector<Document> tr(docs.begin(), docs.begin() + 4);
  std::vector<Document> va(docs.begin() + 4, docs.end());

  TrainConfig cfg3 = tiny_config();
  cfg3.epochs = 3;
  TrainResult full = train(tr, va, cfg3);
  REQUIRE(full.log.size() == 3);

  TrainConfig cfg2 = cfg3;
  cfg2.epochs = 2;
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "hiersum_test_resume";
  fs::remove_all(dir);
  train(tr, va, cfg2, dir.string());

  // Round-trip through the on-disk checkpoint, then continue to epoch 3.
  Checkpoint ck = Checkpoint::load((dir / "checkpoint_last.json").string());
  CHECK(ck.epochs_done == 2);
  TrainResult resumed = train(tr, va, cfg3, "", &ck);
  REQUIRE(resumed.log.size() == 1);
  CHECK(resumed.log[0].epoch == 3);
  CHECK(resumed.log[0].train_ls == full.log[2].train_ls);
  CHECK(resumed.log[0].train_lc == full.log[2].train_lc);
  CHECK(resumed.log[0].val_r1 == full.log[2].val_r1);
  CHECK(resumed.log[0].val_r2 == full.log[2].val_r2);
  CHECK(resumed.log[0].val_rl == full.log[2].val_rl);

  // Final parameters agree exactly too.
  auto a = full.last.params.named();
  auto b = resumed.last.params.named();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].second.val() == b[i].second.val());
  fs::remove_all(dir);
}

TEST_CASE("checkpoint rejects corrupt input") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "hiersum_bad_ckpt.json";
  {
    std::ofstream out(p);
    out << "{\"format\":\"something-else\"}\n";
  }
  CHECK_THROWS_AS(Checkpoint::load(p.string()), CheckpointLoadError);
  CHECK_THROWS_AS(Checkpoint::load("/nonexistent/path.json"),
                  CheckpointLoadError);
  fs::remove(p);
}

TEST_CASE("single-document overfit drives the loss down by 90 percent") {
  auto docs = gen_synthetic(33, 1);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 50;
  cfg.patience = 60;  // make sure early stopping cannot trigger
  cfg.lr = 0.02;
  cfg.dropout = 0.0;
  TrainResult res = train(docs, docs, cfg);
  REQUIRE(res.log.size() == 50);
  const double first = res.log.front().train_ls +
                       cfg.lambda * res.log.front().train_lc;
  const double last = res.log.back().train_ls +
                      cfg.lambda * res.log.back().train_lc;
  CHECK(last <= 0.1 * first);
}

TEST_CASE("best checkpoint is the argmax of the validation log") {
  auto docs = gen_synthetic(34, 6);
  std::vector<Document> tr(docs.begin(), docs.begin() + 4);
  std::vector<Document> va(docs.begin() + 4, docs.end());
  TrainConfig cfg = tiny_config();
  cfg.epochs = 4;
  TrainResult res = train(tr, va, cfg);
  double best = -1.0;
  size_t best_epoch = 0;
  for (const EpochMetrics& m : res.log)
    if (m.val_r1 > best) {
      best = m.val_r1;
      best_epoch = m.epoch;
    }
  CHECK(res.last.best_epoch == best_epoch);
  CHECK(res.last.best_val_r1 == best);
}
