#include "hiersum/rouge.hpp"

#include <algorithm>

namespace hiersum {

RougeScore rouge_from_counts(double overlap, double cand_total,
                             double ref_total) {
  RougeScore s;
  s.precision = cand_total > 0.0 ? overlap / cand_total : 0.0;
  s.recall = ref_total > 0.0 ? overlap / ref_total : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

std::unordered_map<std::string, int> ngram_counts(const TokenList& tokens,
                                                  size_t n) {
  std::unordered_map<std::string, int> counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (size_t j = 1; j < n; ++j) {
      key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

RougeScore rouge_n(const TokenList& candidate, const TokenList& reference,
                   size_t n) {
  auto cand = ngram_counts(candidate, n);
  auto ref = ngram_counts(reference, n);
  double cand_total = 0.0, ref_total = 0.0, overlap = 0.0;
  for (auto& [g, c] : cand) cand_total += c;
  for (auto& [g, c] : ref) ref_total += c;
  for (auto& [g, c] : cand) {
    auto it = ref.find(g);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  return rouge_from_counts(overlap, cand_total, ref_total);
}

namespace {

// LCS table; dp[(i, j)] = LCS of a[0..i), b[0..j).
std::vector<int> lcs_table(const TokenList& a, const TokenList& b) {
  const size_t na = a.size(), nb = b.size();
  std::vector<int> dp((na + 1) * (nb + 1), 0);
  auto at = [nb](size_t i, size_t j) { return i * (nb + 1) + j; };
  for (size_t i = 1; i <= na; ++i)
    for (size_t j = 1; j <= nb; ++j)
      dp[at(i, j)] = a[i - 1] == b[j - 1]
                         ? dp[at(i - 1, j - 1)] + 1
                         : std::max(dp[at(i - 1, j)], dp[at(i, j - 1)]);
  return dp;
}

// Marks reference positions on one deterministic optimal LCS traceback.
void mark_lcs_positions(const TokenList& cand, const TokenList& ref,
                        std::vector<char>& ref_hit) {
  if (cand.empty() || ref.empty()) return;
  auto dp = lcs_table(cand, ref);
  const size_t nb = ref.size();
  auto at = [nb](size_t i, size_t j) { return i * (nb + 1) + j; };
  size_t i = cand.size(), j = ref.size();
  while (i > 0 && j > 0) {
    if (cand[i - 1] == ref[j - 1]) {
      ref_hit[j - 1] = 1;
      --i;
      --j;
    } else if (dp[at(i - 1, j)] >= dp[at(i, j - 1)]) {
      --i;
    } else {
      --j;
    }
  }
}

}  // namespace

size_t lcs_length(const TokenList& a, const TokenList& b) {
  if (a.empty() || b.empty()) return 0;
  return static_cast<size_t>(lcs_table(a, b)[(a.size() + 1) * (b.size() + 1) - 1]);
}

RougeScore rouge_l(const std::vector<TokenList>& candidate_sents,
                   const std::vector<TokenList>& reference_sents) {
  double cand_total = 0.0, ref_total = 0.0;
  for (const TokenList& c : candidate_sents) cand_total += c.size();
  for (const TokenList& r : reference_sents) ref_total += r.size();
  double hits = 0.0;
  for (const TokenList& r : reference_sents) {
    std::vector<char> hit(r.size(), 0);
    for (const TokenList& c : candidate_sents) mark_lcs_positions(c, r, hit);
    for (char h : hit) hits += h;
  }
  return rouge_from_counts(hits, cand_total, ref_total);
}

RougeTriple score_summary(const std::vector<TokenList>& candidate_sents,
                          const std::vector<TokenList>& reference_sents) {
  TokenList cand_flat, ref_flat;
  for (const TokenList& c : candidate_sents)
    cand_flat.insert(cand_flat.end(), c.begin(), c.end());
  for (const TokenList& r : reference_sents)
    ref_flat.insert(ref_flat.end(), r.begin(), r.end());
  RougeTriple t;
  t.r1 = rouge_n(cand_flat, ref_flat, 1);
  t.r2 = rouge_n(cand_flat, ref_flat, 2);
  t.rl = rouge_l(candidate_sents, reference_sents);
  return t;
}

}  // namespace hiersum
