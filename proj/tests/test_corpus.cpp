#include <doctest.h>

#include <sstream>

#include "hiersum/corpus.hpp"
#include "hiersum/oracle.hpp"
#include "hiersum/rng.hpp"

using namespace hiersum;

TEST_CASE("tokenize") {
  CHECK(tokenize("The cat, sat.") ==
        std::vector<std::string>{"the", "cat", "sat"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("A1-b2") == std::vector<std::string>{"a1", "b2"});
  CHECK(tokenize("  --  ") == std::vector<std::string>{});
}

TEST_CASE("tokenize is idempotent on its own output") {
  Rng rng(3);
  const std::string pieces[] = {"Abc", "d3f", "x,y", "...", "Q9", " ", "-"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    for (int i = 0; i < 12; ++i) text += pieces[rng.next_below(7)];
    auto toks = tokenize(text);
    std::string joined;
    for (size_t i = 0; i < toks.size(); ++i) {
      if (i) joined += ' ';
      joined += toks[i];
    }
    CHECK(tokenize(joined) == toks);
  }
}

namespace {

std::string two_section_line() {
  return R"({"id":"d1","sections":[{"name":"intro","sentences":["One two.","Three four."]},{"name":"body","sentences":["Five six.","Seven eight.","Nine ten."]}],"abstract":["One two."]})";
}

}  // namespace

TEST_CASE("load_corpus basics") {
  SUBCASE("single document with two sections") {
    std::istringstream in(two_section_line());
    auto docs = load_corpus_stream(in);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].n_sentences() == 5);
    CHECK(docs[0].n_sections() == 2);
    CHECK(docs[0].sentences[2].sec_idx == 1);
    CHECK(docs[0].sentences[2].sen_idx == 0);
    CHECK(docs[0].abstract.size() == 1);
  }
  SUBCASE("labels length mismatch is a validation error") {
    std::istringstream in(
        R"({"id":"d","sections":[{"name":"s","sentences":["a b","c d"]}],"abstract":[],"labels":[1]})");
    CHECK_THROWS_AS(load_corpus_stream(in), ValidationError);
  }
  SUBCASE("empty section is a validation error") {
    std::istringstream in(
        R"({"id":"d","sections":[{"name":"s","sentences":[]}],"abstract":[]})");
    CHECK_THROWS_AS(load_corpus_stream(in), ValidationError);
  }
  SUBCASE("malformed line reports its line number") {
    std::istringstream in(two_section_line() + "\n{oops\n");
    try {
      load_corpus_stream(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("three valid lines load in order") {
    std::string line = two_section_line();
    std::istringstream in(line + "\n" + line + "\n" + line + "\n");
    auto docs = load_corpus_stream(in);
    CHECK(docs.size() == 3);
  }
}

TEST_CASE("corpus round-trips through serialization") {
  auto docs = gen_synthetic(99, 4);
  std::string serialized;
  for (const Document& d : docs) serialized += document_to_jsonl(d) + "\n";
  std::istringstream in(serialized);
  auto docs2 = load_corpus_stream(in);
  REQUIRE(docs2.size() == docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    CHECK(docs2[i].id == docs[i].id);
    REQUIRE(docs2[i].n_sentences() == docs[i].n_sentences());
    REQUIRE(docs2[i].n_sections() == docs[i].n_sections());
    for (size_t s = 0; s < docs[i].n_sentences(); ++s) {
      CHECK(docs2[i].sentences[s].text == docs[i].sentences[s].text);
      CHECK(docs2[i].sentences[s].tokens == docs[i].sentences[s].tokens);
    }
    CHECK(docs2[i].abstract_text == docs[i].abstract_text);
    CHECK(docs2[i].labels == docs[i].labels);
    for (size_t j = 0; j < docs[i].n_sections(); ++j)
      CHECK(docs2[i].sections[j].sentence_ids ==
            docs[i].sections[j].sentence_ids);
  }
}

TEST_CASE("global sentence index equals prefix sum of section sizes") {
  auto docs = gen_synthetic(5, 6);
  for (const Document& doc : docs) {
    size_t prefix = 0;
    for (size_t j = 0; j < doc.n_sections(); ++j) {
      for (size_t k = 0; k < doc.sections[j].sentence_ids.size(); ++k)
        CHECK(doc.sections[j].sentence_ids[k] == prefix + k);
      prefix += doc.sections[j].sentence_ids.size();
    }
  }
}

TEST_CASE("gen_synthetic") {
  SUBCASE("byte-identical for equal seeds") {
    auto a = gen_synthetic(7, 5);
    auto b = gen_synthetic(7, 5);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i)
      CHECK(document_to_jsonl(a[i]) == document_to_jsonl(b[i]));
  }
  SUBCASE("different seeds differ") {
    auto a = gen_synthetic(7, 1);
    auto b = gen_synthetic(8, 1);
    CHECK(document_to_jsonl(a[0]) != document_to_jsonl(b[0]));
  }
  SUBCASE("zero documents") { CHECK(gen_synthetic(1, 0).empty()); }
  SUBCASE("oracle marks the planted sentence in a tiny layout") {
    SynthSpec spec;
    spec.min_sections = spec.max_sections = 1;
    spec.min_sents = spec.max_sents = 3;
    spec.min_summary = spec.max_summary = 1;
    auto docs = gen_synthetic(3, 1, spec);
    REQUIRE(docs.size() == 1);
    auto labels = greedy_oracle(docs[0], 10);
    CHECK(labels == docs[0].labels);
  }
  SUBCASE("planted labels match the abstract verbatim") {
    for (const Document& doc : gen_synthetic(21, 10)) {
      size_t planted = 0;
      for (size_t i = 0; i < doc.n_sentences(); ++i)
        if (doc.labels[i] == 1) {
          CHECK(doc.abstract_text[planted] == doc.sentences[i].text);
          ++planted;
        }
      CHECK(planted == doc.abstract.size());
    }
  }
}
