#include "hiersum/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hiersum/rng.hpp"

namespace hiersum {

using nlohmann::json;

size_t Document::word_count() const {
  size_t n = 0;
  for (const Sentence& s : sentences) n += s.tokens.size();
  return n;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void validate_document(const Document& doc, size_t line) {
  auto fail = [line](const std::string& msg) {
    if (line)
      throw ValidationError(msg + " (line " + std::to_string(line) + ")");
    throw ValidationError(msg);
  };
  if (doc.sections.empty()) fail("document '" + doc.id + "' has no sections");
  if (doc.sentences.empty())
    fail("document '" + doc.id + "' has no sentences");
  size_t expect = 0;
  for (size_t j = 0; j < doc.sections.size(); ++j) {
    const Section& sec = doc.sections[j];
    if (sec.sentence_ids.empty())
      fail("document '" + doc.id + "' section " + std::to_string(j) +
           " is empty");
    for (size_t k = 0; k < sec.sentence_ids.size(); ++k) {
      size_t g = sec.sentence_ids[k];
      if (g != expect)
        fail("document '" + doc.id + "' sentence ids are not a contiguous "
             "partition");
      const Sentence& s = doc.sentences[g];
      if (s.sec_idx != j || s.sen_idx != k)
        fail("document '" + doc.id + "' sentence position fields are "
             "inconsistent");
      if (s.tokens.empty())
        fail("document '" + doc.id + "' sentence " + std::to_string(g) +
             " has no tokens");
      ++expect;
    }
  }
  if (expect != doc.sentences.size())
    fail("document '" + doc.id + "' sentence count mismatch");
  if (!doc.labels.empty()) {
    if (doc.labels.size() != doc.sentences.size())
      fail("document '" + doc.id + "' labels length " +
           std::to_string(doc.labels.size()) + " != n sentences " +
           std::to_string(doc.sentences.size()));
    for (int v : doc.labels)
      if (v != 0 && v != 1)
        fail("document '" + doc.id + "' labels must be 0 or 1");
  }
}

namespace {

Document document_from_json(const json& j, size_t line) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  size_t global = 0;
  for (const json& sec_j : j.at("sections")) {
    Section sec;
    sec.name = sec_j.value("name", "");
    const json& sents = sec_j.at("sentences");
    size_t pos = 0;
    for (const json& s_j : sents) {
      Sentence s;
      s.text = s_j.get<std::string>();
      s.tokens = tokenize(s.text);
      if (s.tokens.empty())
        throw ValidationError("document '" + doc.id +
                              "' has a sentence with no tokens (line " +
                              std::to_string(line) + ")");
      s.sec_idx = doc.sections.size();
      s.sen_idx = pos++;
      sec.sentence_ids.push_back(global++);
      doc.sentences.push_back(std::move(s));
    }
    doc.sections.push_back(std::move(sec));
  }
  if (j.contains("abstract")) {
    for (const json& a_j : j.at("abstract")) {
      std::string text = a_j.get<std::string>();
      doc.abstract.push_back(tokenize(text));
      doc.abstract_text.push_back(std::move(text));
    }
  }
  if (j.contains("labels")) {
    for (const json& l_j : j.at("labels")) doc.labels.push_back(l_j.get<int>());
  }
  validate_document(doc, line);
  return doc;
}

}  // namespace

std::vector<Document> load_corpus_stream(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    try {
      docs.push_back(document_from_json(j, lineno));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad document object: ") + e.what(),
                       lineno);
    }
  }
  return docs;
}

std::vector<Document> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return load_corpus_stream(in);
}

std::string document_to_jsonl(const Document& doc) {
  json j;
  j["id"] = doc.id;
  json sections = json::array();
  for (const Section& sec : doc.sections) {
    json s;
    s["name"] = sec.name;
    json sents = json::array();
    for (size_t g : sec.sentence_ids) sents.push_back(doc.sentences[g].text);
    s["sentences"] = std::move(sents);
    sections.push_back(std::move(s));
  }
  j["sections"] = std::move(sections);
  j["abstract"] = doc.abstract_text;
  if (!doc.labels.empty()) j["labels"] = doc.labels;
  return j.dump();
}

void save_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const Document& doc : docs) out << document_to_jsonl(doc) << '\n';
}

void SynthSpec::check() const {
  auto range_ok = [](size_t lo, size_t hi) { return lo >= 1 && lo <= hi; };
  if (!range_ok(min_sections, max_sections) || !range_ok(min_sents, max_sents) ||
      !range_ok(min_tokens, max_tokens) || !range_ok(min_summary, max_summary))
    throw LogicError("gen_synthetic: size ranges must be positive and ordered");
  if (topics < 2) throw LogicError("gen_synthetic: need at least 2 topics");
  if (topics * topic_vocab > 8000)
    throw LogicError("gen_synthetic: vocabulary too large (topics*topic_vocab "
                     "must be <= 8000)");
}

namespace {

const char* kSyllables[20] = {"ba", "ce", "di", "fo", "gu", "ha", "ki",
                              "lo", "mu", "ne", "po", "ra", "su", "ta",
                              "vi", "wo", "xe", "yu", "za", "qi"};

// Fixed pseudo-word for pool slot (topic, s): unique for index < 8000 and
// independent of the generator seed, so separately seeded corpora share
// their vocabulary.
std::string pool_word(size_t topic, size_t topic_vocab, size_t s) {
  size_t ix = topic * topic_vocab + s;
  std::string w;
  w += kSyllables[(ix / 400) % 20];
  w += kSyllables[(ix / 20) % 20];
  w += kSyllables[ix % 20];
  return w;
}

const char* kSectionNames[] = {"introduction", "background", "methods",
                               "results",      "analysis",   "discussion",
                               "conclusion"};

size_t draw_range(Rng& rng, size_t lo, size_t hi) {
  return lo + rng.next_below(hi - lo + 1);
}

}  // namespace

std::vector<Document> gen_synthetic(uint64_t seed, size_t n_docs,
                                    const SynthSpec& spec) {
  spec.check();
  std::vector<Document> docs(n_docs);
  for (size_t dix = 0; dix < n_docs; ++dix) {
    Rng rng(mix_seed(seed, dix));
    Document& doc = docs[dix];
    {
      std::ostringstream id;
      id << "synth-" << seed << "-" << dix;
      doc.id = id.str();
    }

    const size_t m = draw_range(rng, spec.min_sections, spec.max_sections);
    std::vector<size_t> sec_sizes(m);
    size_t n = 0;
    for (size_t j = 0; j < m; ++j) {
      sec_sizes[j] = draw_range(rng, spec.min_sents, spec.max_sents);
      n += sec_sizes[j];
    }

    const size_t theme = rng.next_below(spec.topics);
    size_t k = draw_range(rng, spec.min_summary, spec.max_summary);
    if (k > n) k = n;

    // Planted summary positions: a seeded shuffle's prefix, sorted.
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    for (size_t i = n; i > 1; --i) {
      size_t j = rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }
    std::vector<size_t> planted(order.begin(), order.begin() + k);
    std::sort(planted.begin(), planted.end());

    doc.labels.assign(n, 0);
    for (size_t g : planted) doc.labels[g] = 1;

    size_t global = 0;
    for (size_t j = 0; j < m; ++j) {
      Section sec;
      sec.name = kSectionNames[j % (sizeof(kSectionNames) /
                                    sizeof(kSectionNames[0]))];
      for (size_t pos = 0; pos < sec_sizes[j]; ++pos) {
        const bool salient = doc.labels[global] == 1;
        size_t topic = theme;
        if (!salient) {
          // Any topic except the theme keeps fillers disjoint from the
          // abstract vocabulary.
          topic = rng.next_below(spec.topics - 1);
          if (topic >= theme) ++topic;
        }
        const size_t len = draw_range(rng, spec.min_tokens, spec.max_tokens);
        Sentence s;
        s.sec_idx = j;
        s.sen_idx = pos;
        for (size_t w = 0; w < len; ++w) {
          if (w) s.text += ' ';
          s.text += pool_word(topic, spec.topic_vocab,
                              rng.next_below(spec.topic_vocab));
        }
        s.tokens = tokenize(s.text);
        sec.sentence_ids.push_back(global++);
        doc.sentences.push_back(std::move(s));
      }
      doc.sections.push_back(std::move(sec));
    }

    for (size_t g : planted) {
      doc.abstract_text.push_back(doc.sentences[g].text);
      doc.abstract.push_back(doc.sentences[g].tokens);
    }
    validate_document(doc);
  }
  return docs;
}

}  // namespace hiersum
