#include <doctest.h>

#include <sstream>

#include "hiersum/extract.hpp"
#include "hiersum/oracle.hpp"
#include "hiersum/rng.hpp"

using namespace hiersum;

TEST_CASE("extract_topk") {
  SUBCASE("documented tie case") {
    CHECK(extract_topk({0.1, 0.9, 0.9, 0.2}, 2) ==
          std::vector<size_t>{1, 2});
  }
  SUBCASE("k >= n returns everything") {
    CHECK(extract_topk({0.3, 0.1}, 10) == std::vector<size_t>{0, 1});
  }
  SUBCASE("k = 1 is the argmax") {
    CHECK(extract_topk({0.3, 0.8, 0.5}, 1) == std::vector<size_t>{1});
  }
  SUBCASE("k = 0 is rejected") {
    CHECK_THROWS_AS(extract_topk({0.5}, 0), LogicError);
  }
  SUBCASE("output is strictly ascending and duplicate-free") {
    Rng rng(61);
    for (int trial = 0; trial < 100; ++trial) {
      size_t n = 1 + rng.next_below(30);
      std::vector<double> scores(n);
      for (double& s : scores) s = rng.next_below(5) * 0.1;  // force ties
      auto sel = extract_topk(scores, 1 + rng.next_below(n));
      for (size_t i = 1; i < sel.size(); ++i) CHECK(sel[i] > sel[i - 1]);
    }
  }
}

TEST_CASE("lead") {
  auto docs = gen_synthetic(71, 1);
  SUBCASE("k larger than n") {
    SynthSpec spec;
    spec.min_sections = spec.max_sections = 1;
    spec.min_sents = spec.max_sents = 3;
    spec.min_summary = spec.max_summary = 1;
    Document d3 = gen_synthetic(72, 1, spec)[0];
    CHECK(lead(d3, 10) == std::vector<size_t>{0, 1, 2});
  }
  SUBCASE("first k") {
    CHECK(lead(docs[0], 2) == std::vector<size_t>{0, 1});
  }
}

TEST_CASE("evaluate report") {
  // Mixed section counts to populate several buckets.
  SynthSpec wide;
  wide.min_sections = 1;
  wide.max_sections = 8;
  auto docs = gen_synthetic(73, 24, wide);

  EvalReport rep = evaluate(docs, [&](const Document& doc) {
    return lead(doc, 5);
  });

  SUBCASE("bucket counts partition the corpus") {
    size_t sec_total = 0;
    for (const BucketRow& r : rep.by_sections) sec_total += r.n_docs;
    CHECK(sec_total == docs.size());
    size_t len_total = 0;
    for (const BucketRow& r : rep.by_length) len_total += r.n_docs;
    CHECK(len_total == docs.size());
    CHECK(rep.n_docs == docs.size());
  }

  SUBCASE("TSV round-trips to the same numbers") {
    std::ostringstream out;
    render_report_tsv(rep, out);
    std::istringstream in(out.str());
    EvalReport back = parse_report_tsv(in);
    CHECK(back.n_docs == rep.n_docs);
    CHECK(back.macro.r1.f1 == rep.macro.r1.f1);
    CHECK(back.macro.r2.precision == rep.macro.r2.precision);
    CHECK(back.macro.rl.recall == rep.macro.rl.recall);
    REQUIRE(back.by_sections.size() == rep.by_sections.size());
    REQUIRE(back.by_length.size() == rep.by_length.size());
    for (size_t i = 0; i < rep.by_sections.size(); ++i) {
      CHECK(back.by_sections[i].bucket == rep.by_sections[i].bucket);
      CHECK(back.by_sections[i].n_docs == rep.by_sections[i].n_docs);
      CHECK(back.by_sections[i].rouge.r1.f1 == rep.by_sections[i].rouge.r1.f1);
    }
    for (size_t i = 0; i < rep.by_length.size(); ++i)
      CHECK(back.by_length[i].rouge.rl.f1 == rep.by_length[i].rouge.rl.f1);
  }
}

TEST_CASE("macro average over two documents is the mean") {
  // First k sentences equal the abstract in doc A (lead f1 = 1); doc B's
  // abstract is disjoint from every sentence (lead f1 = 0) => macro 0.5.
  std::string a =
      R"({"id":"a","sections":[{"name":"s","sentences":["aa bb cc","dd ee"]}],"abstract":["aa bb cc","dd ee"]})";
  std::string b =
      R"({"id":"b","sections":[{"name":"s","sentences":["aa bb cc","dd ee"]}],"abstract":["zz yy"]})";
  std::istringstream in(a + "\n" + b + "\n");
  auto docs = load_corpus_stream(in);
  EvalReport rep =
      evaluate(docs, [](const Document& d) { return lead(d, 2); });
  CHECK(rep.macro.r1.f1 == doctest::Approx(0.5));
  CHECK(rep.macro.rl.f1 == doctest::Approx(0.5));
}

TEST_CASE("verbatim-abstract selection scores ROUGE-1 f1 = 1") {
  auto docs = gen_synthetic(74, 5);
  EvalReport rep = evaluate(docs, [&](const Document& doc) {
    std::vector<size_t> sel;
    for (size_t i = 0; i < doc.n_sentences(); ++i)
      if (doc.labels[i] == 1) sel.push_back(i);
    return sel;
  });
  CHECK(rep.macro.r1.f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.macro.r2.f1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.macro.rl.f1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oracle first pick wins the k=1 objective against any selector") {
  auto docs = gen_synthetic(75, 8);
  for (const Document& doc : docs) {
    auto order = greedy_oracle_selection(doc, 10);
    REQUIRE(!order.empty());
    auto obj = [&doc](size_t g) {
      TokenList ref;
      for (const auto& s : doc.abstract) ref.insert(ref.end(), s.begin(), s.end());
      return 0.5 * (rouge_n(doc.sentences[g].tokens, ref, 1).f1 +
                    rouge_n(doc.sentences[g].tokens, ref, 2).f1);
    };
    const double best = obj(order[0]);
    for (size_t g = 0; g < doc.n_sentences(); ++g)
      CHECK(obj(g) <= best + 1e-12);
  }
}
