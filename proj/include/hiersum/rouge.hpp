#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace hiersum {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// p/r -> f1 with the 0/0 = 0 convention.
RougeScore rouge_from_counts(double overlap, double cand_total,
                             double ref_total);

using TokenList = std::vector<std::string>;

// N-gram multiset; key is the n-gram joined with '\x1f', value its count.
std::unordered_map<std::string, int> ngram_counts(const TokenList& tokens,
                                                  size_t n);

// ROUGE-N with clipped overlap counts.
RougeScore rouge_n(const TokenList& candidate, const TokenList& reference,
                   size_t n);

size_t lcs_length(const TokenList& a, const TokenList& b);

// Summary-level ROUGE-L with union-LCS: for each reference sentence, the
// union of LCS-matched token positions against all candidate sentences;
// recall over total reference tokens, precision over total candidate tokens.
RougeScore rouge_l(const std::vector<TokenList>& candidate_sents,
                   const std::vector<TokenList>& reference_sents);

struct RougeTriple {
  RougeScore r1, r2, rl;
};

// R1/R2 on concatenated tokens, RL summary-level. The shared entry point for
// oracle labeling, validation, and evaluation.
RougeTriple score_summary(const std::vector<TokenList>& candidate_sents,
                          const std::vector<TokenList>& reference_sents);

}  // namespace hiersum
