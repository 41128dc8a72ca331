#include <doctest.h>

#include <sstream>

#include "hiersum/corpus.hpp"
#include "hiersum/oracle.hpp"
#include "hiersum/rng.hpp"
#include "hiersum/rouge.hpp"

using namespace hiersum;

namespace {

// One-section document from raw sentence strings.
Document make_doc(const std::vector<std::string>& sentences,
                  const std::vector<std::string>& abstract) {
  std::ostringstream line;
  line << R"({"id":"t","sections":[{"name":"s","sentences":[)";
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i) line << ',';
    line << '"' << sentences[i] << '"';
  }
  line << R"(]}],"abstract":[)";
  for (size_t i = 0; i < abstract.size(); ++i) {
    if (i) line << ',';
    line << '"' << abstract[i] << '"';
  }
  line << "]}";
  std::istringstream in(line.str());
  return load_corpus_stream(in)[0];
}

}  // namespace

TEST_CASE("greedy_oracle") {
  SUBCASE("abstract equal to one sentence selects exactly it") {
    Document doc = make_doc({"aa bb cc", "dd ee ff", "gg hh ii", "jj kk ll"},
                            {"gg hh ii"});
    CHECK(greedy_oracle(doc) == std::vector<int>{0, 0, 1, 0});
  }
  SUBCASE("disjoint sentences get all-zero labels") {
    Document doc = make_doc({"aa bb", "cc dd"}, {"xx yy zz"});
    CHECK(greedy_oracle(doc) == std::vector<int>{0, 0});
  }
  SUBCASE("duplicate best sentence: only the lower index is labeled") {
    Document doc = make_doc({"aa bb", "gg hh ii", "cc dd", "gg hh ii"},
                            {"gg hh ii"});
    CHECK(greedy_oracle(doc) == std::vector<int>{0, 1, 0, 0});
  }
  SUBCASE("missing abstract") {
    Document doc = make_doc({"aa bb"}, {});
    CHECK_THROWS_AS(greedy_oracle(doc), MissingAbstract);
  }
  SUBCASE("max_sents caps the selection") {
    Document doc =
        make_doc({"aa bb", "cc dd", "ee ff"}, {"aa bb", "cc dd", "ee ff"});
    auto labels = greedy_oracle(doc, 2);
    int total = 0;
    for (int v : labels) total += v;
    CHECK(total == 2);
  }
}

TEST_CASE("greedy first pick is the argmax single sentence") {
  Rng rng(41);
  const char* vocab[] = {"ba", "ce", "di", "fo", "gu", "ha"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> sents(4 + rng.next_below(6));
    for (auto& s : sents) {
      size_t len = 2 + rng.next_below(5);
      for (size_t i = 0; i < len; ++i) {
        if (i) s += ' ';
        s += vocab[rng.next_below(6)];
      }
    }
    std::vector<std::string> abs_sents = {sents[rng.next_below(sents.size())]};
    Document doc = make_doc(sents, abs_sents);

    auto labels = greedy_oracle(doc);
    // Brute force the best single sentence.
    double best = 0.0;
    size_t best_ix = doc.n_sentences();
    for (size_t i = 0; i < doc.n_sentences(); ++i) {
      double v =
          0.5 * (rouge_n(doc.sentences[i].tokens, doc.abstract[0], 1).f1 +
                 rouge_n(doc.sentences[i].tokens, doc.abstract[0], 2).f1);
      if (v > best + 1e-12) {
        best = v;
        best_ix = i;
      }
    }
    REQUIRE(best_ix < doc.n_sentences());
    CHECK(labels[best_ix] == 1);
  }
}

TEST_CASE("oracle recovery on planted-subset documents") {
  for (const Document& doc : gen_synthetic(55, 20)) {
    CHECK(greedy_oracle(doc, 10) == doc.labels);
  }
}

TEST_CASE("imbalance_ratio") {
  CHECK(imbalance_ratio({1, 0, 0, 0, 0, 0, 0, 0, 1, 0}) == doctest::Approx(4.0));
  CHECK(imbalance_ratio({1, 1, 1}) == 0.0);
  CHECK_THROWS_AS(imbalance_ratio({0, 0}), NoPositives);
}
