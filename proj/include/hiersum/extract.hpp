#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hiersum/corpus.hpp"
#include "hiersum/rouge.hpp"

namespace hiersum {

// Indices of the min(k, n) largest scores, ties broken toward the lower
// index, returned in ascending document order.
std::vector<size_t> extract_topk(const std::vector<double>& scores, size_t k);

// First min(k, n) sentence indices.
std::vector<size_t> lead(const Document& doc, size_t k);

// Per-document sentence selection used by evaluation. Implementations:
// model checkpoint, lead, oracle labels.
using SelectFn = std::function<std::vector<size_t>(const Document&)>;

struct BucketRow {
  std::string bucket;
  size_t n_docs = 0;
  RougeTriple rouge;  // macro over the bucket
};

struct EvalReport {
  size_t n_docs = 0;
  RougeTriple macro;
  std::vector<BucketRow> by_sections;  // {1-3, 4-6, 7+}
  std::vector<BucketRow> by_length;    // word-count quartiles of the corpus
};

// Runs the selector over the corpus and aggregates macro plus per-bucket
// ROUGE. Documents without abstracts are a MissingAbstract error.
EvalReport evaluate(const std::vector<Document>& docs, const SelectFn& select);

// Tab-separated rendering: one header, then rows
// (table, bucket, n_docs, nine rouge columns). Parses back exactly.
void render_report_tsv(const EvalReport& report, std::ostream& out);
EvalReport parse_report_tsv(std::istream& in);

}  // namespace hiersum
