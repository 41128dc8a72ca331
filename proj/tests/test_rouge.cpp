#include <doctest.h>

#include <algorithm>

#include "hiersum/rng.hpp"
#include "hiersum/rouge.hpp"

using namespace hiersum;

namespace {

TokenList random_tokens(Rng& rng, size_t max_len, size_t vocab = 4) {
  TokenList out(rng.next_below(max_len + 1));
  for (auto& t : out) t = std::string(1, static_cast<char>('a' + rng.next_below(vocab)));
  return out;
}

// Exponential-time LCS by subset enumeration; the independent oracle for
// lists up to length 8.
size_t brute_lcs(const TokenList& a, const TokenList& b) {
  size_t best = 0;
  for (size_t mask = 0; mask < (1u << a.size()); ++mask) {
    TokenList sub;
    for (size_t i = 0; i < a.size(); ++i)
      if (mask & (1u << i)) sub.push_back(a[i]);
    // is sub a subsequence of b?
    size_t j = 0;
    for (const auto& t : b) {
      if (j < sub.size() && t == sub[j]) ++j;
    }
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

}  // namespace

TEST_CASE("ngram_counts") {
  TokenList aba = {"a", "b", "a"};
  auto uni = ngram_counts(aba, 1);
  CHECK(uni.size() == 2);
  CHECK(uni.at("a") == 2);
  CHECK(uni.at("b") == 1);
  auto bi = ngram_counts(aba, 2);
  CHECK(bi.size() == 2);
  CHECK(bi.at(std::string("a") + '\x1f' + "b") == 1);
  CHECK(bi.at(std::string("b") + '\x1f' + "a") == 1);
  CHECK(ngram_counts({"a"}, 2).empty());
}

TEST_CASE("ngram multiset size is max(0, len - n + 1)") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    TokenList toks = random_tokens(rng, 10);
    for (size_t n = 1; n <= 3; ++n) {
      size_t total = 0;
      for (auto& [g, c] : ngram_counts(toks, n)) total += c;
      size_t expect = toks.size() + 1 >= n ? toks.size() + 1 - n : 0;
      CHECK(total == expect);
    }
  }
}

TEST_CASE("rouge_n hand-worked examples") {
  SUBCASE("clipped overlap") {
    RougeScore s = rouge_n({"the", "cat", "sat"}, {"the", "cat"}, 1);
    CHECK(s.precision == doctest::Approx(2.0 / 3.0));
    CHECK(s.recall == doctest::Approx(1.0));
    CHECK(s.f1 == doctest::Approx(0.8));
  }
  SUBCASE("identical lists") {
    RougeScore s = rouge_n({"x", "y"}, {"x", "y"}, 2);
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
  }
  SUBCASE("disjoint vocabulary") {
    RougeScore s = rouge_n({"a", "b"}, {"c", "d"}, 1);
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
  }
  SUBCASE("empty candidate yields zeros, not NaN") {
    RougeScore s = rouge_n({}, {"a"}, 1);
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
  }
}

TEST_CASE("swap symmetry: precision(a,b) == recall(b,a)") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    TokenList a = random_tokens(rng, 9);
    TokenList b = random_tokens(rng, 9);
    for (size_t n = 1; n <= 2; ++n) {
      CHECK(rouge_n(a, b, n).precision ==
            doctest::Approx(rouge_n(b, a, n).recall).epsilon(1e-12));
    }
  }
}

TEST_CASE("appending a reference token never lowers ROUGE-1 recall") {
  Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    TokenList a = random_tokens(rng, 8);
    TokenList b = random_tokens(rng, 8);
    if (b.empty()) continue;
    double before = rouge_n(a, b, 1).recall;
    TokenList a2 = a;
    a2.push_back(b[rng.next_below(b.size())]);
    CHECK(rouge_n(a2, b, 1).recall >= before - 1e-12);
  }
}

TEST_CASE("lcs_length") {
  CHECK(lcs_length({"a", "b", "c"}, {"a", "c"}) == 2);
  TokenList x = {"p", "q", "r", "r"};
  CHECK(lcs_length(x, x) == x.size());
  CHECK(lcs_length({"a", "b"}, {"c", "d"}) == 0);
  CHECK(lcs_length({}, {"a"}) == 0);
}

TEST_CASE("lcs properties against the brute-force oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    TokenList a = random_tokens(rng, 8);
    TokenList b = random_tokens(rng, 8);
    size_t l = lcs_length(a, b);
    CHECK(l == brute_lcs(a, b));
    CHECK(l <= std::min(a.size(), b.size()));
  }
  // Equality when one is a subsequence of the other.
  TokenList big = {"a", "b", "c", "d", "e"};
  TokenList sub = {"b", "d"};
  CHECK(lcs_length(sub, big) == sub.size());
}

TEST_CASE("rouge_l") {
  SUBCASE("identical single sentences") {
    RougeScore s = rouge_l({{"a", "b", "c"}}, {{"a", "b", "c"}});
    CHECK(s.f1 == doctest::Approx(1.0));
  }
  SUBCASE("hand-worked LCS case") {
    RougeScore s = rouge_l({{"a", "x", "b"}}, {{"a", "b"}});
    CHECK(s.precision == doctest::Approx(2.0 / 3.0));
    CHECK(s.recall == doctest::Approx(1.0));
    CHECK(s.f1 == doctest::Approx(0.8));
  }
  SUBCASE("empty candidate") {
    RougeScore s = rouge_l({}, {{"a", "b"}});
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
  }
  SUBCASE("union across candidate sentences") {
    // Each candidate sentence covers a different part of the reference.
    RougeScore s = rouge_l({{"a", "b"}, {"c", "d"}}, {{"a", "b", "c", "d"}});
    CHECK(s.recall == doctest::Approx(1.0));
    CHECK(s.precision == doctest::Approx(1.0));
  }
  SUBCASE("single-pair rouge_l agrees with brute-force LCS counts") {
    Rng rng(37);
    for (int trial = 0; trial < 200; ++trial) {
      TokenList a = random_tokens(rng, 8);
      TokenList b = random_tokens(rng, 8);
      if (a.empty() || b.empty()) continue;
      size_t l = brute_lcs(a, b);
      RougeScore s = rouge_l({a}, {b});
      CHECK(s.precision ==
            doctest::Approx(static_cast<double>(l) / a.size()).epsilon(1e-12));
      CHECK(s.recall ==
            doctest::Approx(static_cast<double>(l) / b.size()).epsilon(1e-12));
    }
  }
}
