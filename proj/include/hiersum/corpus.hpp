#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hiersum/errors.hpp"

namespace hiersum {

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;  // lowercased, non-empty after ingestion
  size_t sec_idx = 0;               // 0-based section index
  size_t sen_idx = 0;               // 0-based position within the section
};

struct Section {
  std::string name;
  std::vector<size_t> sentence_ids;  // global indices, ascending
};

struct Document {
  std::string id;
  std::vector<Section> sections;
  std::vector<Sentence> sentences;  // global order: by section, then position
  std::vector<std::string> abstract_text;
  std::vector<std::vector<std::string>> abstract;  // tokenized abstract
  std::vector<int> labels;                         // empty or length n of 0/1

  size_t n_sentences() const { return sentences.size(); }
  size_t n_sections() const { return sections.size(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_abstract() const { return !abstract.empty(); }
  size_t word_count() const;
};

// Lowercase and split on any non-alphanumeric run. Empty input gives an
// empty list. This intentionally diverges from ROUGE-155 preprocessing
// (no stemming, byte-level ASCII classes) to stay deterministic and
// dependency-free.
std::vector<std::string> tokenize(const std::string& text);

// JSONL corpus, one document per line:
// {"id": str, "sections": [{"name": str, "sentences": [str]}],
//  "abstract": [str], "labels": [0|1]?}
std::vector<Document> load_corpus(const std::string& path);
std::vector<Document> load_corpus_stream(std::istream& in);
void save_corpus(const std::vector<Document>& docs, const std::string& path);
std::string document_to_jsonl(const Document& doc);

// Checks Document invariants; throws ValidationError. `line` is used in
// error messages (0 = not from a file).
void validate_document(const Document& doc, size_t line = 0);

// Shape knobs for the synthetic corpus generator. Token vocabulary is a
// fixed pseudo-word list partitioned into disjoint per-topic pools, so that
// independently generated corpora share a vocabulary. Every document gets a
// theme topic; its planted summary sentences draw from the theme pool and
// each filler sentence draws from some other topic's pool, which keeps
// filler vocabulary disjoint from the abstract.
struct SynthSpec {
  size_t min_sections = 2, max_sections = 4;
  size_t min_sents = 4, max_sents = 8;      // sentences per section
  size_t min_tokens = 8, max_tokens = 14;   // tokens per sentence
  size_t min_summary = 5, max_summary = 5;  // planted abstract sentences
  size_t topics = 8;
  size_t topic_vocab = 40;  // tokens per topic pool

  void check() const;
};

// Deterministic per (seed, index): documents carry the planted subset as
// labels and the planted sentences verbatim as the abstract.
std::vector<Document> gen_synthetic(uint64_t seed, size_t n_docs,
                                    const SynthSpec& spec = {});

}  // namespace hiersum
