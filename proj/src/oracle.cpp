#include "hiersum/oracle.hpp"

#include <algorithm>

#include "hiersum/rouge.hpp"

namespace hiersum {

namespace {

constexpr double kGainTol = 1e-12;

// mean(R1 f1, R2 f1) of the selected sentences (document order) vs abstract.
double objective_value(const Document& doc, const std::vector<size_t>& selected) {
  TokenList cand;
  for (size_t g : selected)
    cand.insert(cand.end(), doc.sentences[g].tokens.begin(),
                doc.sentences[g].tokens.end());
  TokenList ref;
  for (const TokenList& a : doc.abstract)
    ref.insert(ref.end(), a.begin(), a.end());
  return 0.5 * (rouge_n(cand, ref, 1).f1 + rouge_n(cand, ref, 2).f1);
}

}  // namespace

std::vector<size_t> greedy_oracle_selection(const Document& doc,
                                            size_t max_sents,
                                            OracleObjective objective) {
  (void)objective;  // MeanR1R2 is the only objective
  if (!doc.has_abstract())
    throw MissingAbstract("greedy_oracle: document '" + doc.id +
                          "' has no abstract");
  if (max_sents < 1)
    throw LogicError("greedy_oracle: max_sents must be >= 1");

  const size_t n = doc.n_sentences();
  std::vector<char> taken(n, 0);
  std::vector<size_t> chosen;    // selection order
  std::vector<size_t> selected;  // ascending, for candidate concatenation
  double current = 0.0;

  while (chosen.size() < std::min(n, max_sents)) {
    std::vector<double> score(n, -1.0);
#pragma omp parallel for schedule(static) if (n >= 64)
    for (long g = 0; g < static_cast<long>(n); ++g) {
      if (taken[g]) continue;
      std::vector<size_t> trial = selected;
      trial.insert(std::lower_bound(trial.begin(), trial.end(),
                                    static_cast<size_t>(g)),
                   static_cast<size_t>(g));
      score[g] = objective_value(doc, trial);
    }
    size_t best = n;
    double best_score = current + kGainTol;
    for (size_t g = 0; g < n; ++g) {
      if (taken[g]) continue;
      if (score[g] > best_score) {  // strict > keeps the lowest-index tie
        best_score = score[g];
        best = g;
      }
    }
    if (best == n) break;
    taken[best] = 1;
    chosen.push_back(best);
    selected.insert(std::lower_bound(selected.begin(), selected.end(), best),
                    best);
    current = best_score;
  }
  return chosen;
}

std::vector<int> greedy_oracle(const Document& doc, size_t max_sents,
                               OracleObjective objective) {
  std::vector<int> labels(doc.n_sentences(), 0);
  for (size_t g : greedy_oracle_selection(doc, max_sents, objective))
    labels[g] = 1;
  return labels;
}

double imbalance_ratio(const std::vector<int>& labels) {
  size_t pos = 0;
  for (int v : labels) pos += v == 1;
  if (pos == 0)
    throw NoPositives("imbalance_ratio: label vector has no positives");
  return static_cast<double>(labels.size() - pos) / static_cast<double>(pos);
}

}  // namespace hiersum
