#pragma once

#include <vector>

#include "hiersum/corpus.hpp"

namespace hiersum {

enum class OracleObjective { MeanR1R2 };

// Greedy extractive labeling: repeatedly add the sentence that most improves
// mean(ROUGE-1 f1, ROUGE-2 f1) of the selected set against the abstract.
// Stops at max_sents or when no sentence improves the objective by more than
// 1e-12. Ties break toward the lowest global sentence index. Returns a 0/1
// vector of length n.
std::vector<int> greedy_oracle(const Document& doc, size_t max_sents = 10,
                               OracleObjective objective = OracleObjective::MeanR1R2);

// Same procedure, but returns the chosen indices in selection order (the
// first element is the best single sentence). greedy_oracle is this with the
// result scattered into a 0/1 vector.
std::vector<size_t> greedy_oracle_selection(
    const Document& doc, size_t max_sents = 10,
    OracleObjective objective = OracleObjective::MeanR1R2);

// eta = #negatives / #positives, the class-imbalance weight used by the
// scoring loss. Throws NoPositives when the label vector has no 1s.
double imbalance_ratio(const std::vector<int>& labels);

}  // namespace hiersum
