#include "hiersum/extract.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hiersum {

std::vector<size_t> extract_topk(const std::vector<double>& scores, size_t k) {
  if (k < 1) throw LogicError("extract_topk: k must be >= 1");
  const size_t n = scores.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&scores](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  idx.resize(std::min(k, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<size_t> lead(const Document& doc, size_t k) {
  if (k < 1) throw LogicError("lead: k must be >= 1");
  std::vector<size_t> out(std::min(k, doc.n_sentences()));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

namespace {

RougeTriple macro_mean(const std::vector<RougeTriple>& triples,
                       const std::vector<size_t>& members) {
  RougeTriple acc;
  for (size_t i : members) {
    const RougeTriple& t = triples[i];
    acc.r1.f1 += t.r1.f1;
    acc.r1.precision += t.r1.precision;
    acc.r1.recall += t.r1.recall;
    acc.r2.f1 += t.r2.f1;
    acc.r2.precision += t.r2.precision;
    acc.r2.recall += t.r2.recall;
    acc.rl.f1 += t.rl.f1;
    acc.rl.precision += t.rl.precision;
    acc.rl.recall += t.rl.recall;
  }
  if (!members.empty()) {
    const double inv = 1.0 / static_cast<double>(members.size());
    for (RougeScore* s : {&acc.r1, &acc.r2, &acc.rl}) {
      s->f1 *= inv;
      s->precision *= inv;
      s->recall *= inv;
    }
  }
  return acc;
}

// Nearest-rank percentile on a sorted copy.
size_t percentile_value(std::vector<size_t> sorted, double q) {
  const size_t n = sorted.size();
  size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

EvalReport evaluate(const std::vector<Document>& docs, const SelectFn& select) {
  if (docs.empty()) throw EmptyCorpus("evaluate: empty corpus");
  const size_t n = docs.size();
  std::vector<RougeTriple> triples(n);
  std::exception_ptr eptr = nullptr;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const Document& doc = docs[i];
      if (!doc.has_abstract())
        throw MissingAbstract("evaluate: document '" + doc.id +
                              "' has no abstract");
      std::vector<size_t> sel = select(doc);
      std::vector<TokenList> cand;
      for (size_t s : sel) cand.push_back(doc.sentences[s].tokens);
      triples[i] = score_summary(cand, doc.abstract);
    } catch (...) {
#pragma omp critical(hiersum_evaluate_err)
      if (!eptr) {
        eptr = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  }
  if (eptr) std::rethrow_exception(eptr);

  EvalReport rep;
  rep.n_docs = n;
  std::vector<size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  rep.macro = macro_mean(triples, all);

  // Section-count buckets.
  const std::vector<std::pair<std::string, std::pair<size_t, size_t>>>
      sec_buckets = {{"1-3", {1, 3}}, {"4-6", {4, 6}}, {"7+", {7, SIZE_MAX}}};
  for (auto& [name, range] : sec_buckets) {
    BucketRow row;
    row.bucket = name;
    std::vector<size_t> members;
    for (size_t i = 0; i < n; ++i) {
      size_t m = docs[i].n_sections();
      if (m >= range.first && m <= range.second) members.push_back(i);
    }
    row.n_docs = members.size();
    row.rouge = macro_mean(triples, members);
    rep.by_sections.push_back(std::move(row));
  }

  // Word-length quartiles computed from this corpus.
  std::vector<size_t> lengths(n);
  for (size_t i = 0; i < n; ++i) lengths[i] = docs[i].word_count();
  std::vector<size_t> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  const size_t q1 = percentile_value(sorted, 0.25);
  const size_t q2 = percentile_value(sorted, 0.50);
  const size_t q3 = percentile_value(sorted, 0.75);
  const std::vector<std::pair<std::string, std::pair<size_t, size_t>>>
      len_buckets = {{"q1", {0, q1}},
                     {"q2", {q1 + 1, q2}},
                     {"q3", {q2 + 1, q3}},
                     {"q4", {q3 + 1, SIZE_MAX}}};
  for (auto& [name, range] : len_buckets) {
    BucketRow row;
    row.bucket = name;
    std::vector<size_t> members;
    for (size_t i = 0; i < n; ++i)
      if (lengths[i] >= range.first && lengths[i] <= range.second)
        members.push_back(i);
    row.n_docs = members.size();
    row.rouge = macro_mean(triples, members);
    rep.by_length.push_back(std::move(row));
  }
  return rep;
}

namespace {

void render_row(std::ostream& out, const std::string& table,
                const std::string& bucket, size_t n_docs,
                const RougeTriple& t) {
  out << table << '\t' << bucket << '\t' << n_docs;
  for (const RougeScore* s : {&t.r1, &t.r2, &t.rl})
    out << '\t' << fmt17(s->f1) << '\t' << fmt17(s->precision) << '\t'
        << fmt17(s->recall);
  out << '\n';
}

}  // namespace

void render_report_tsv(const EvalReport& rep, std::ostream& out) {
  out << "table\tbucket\tn_docs\tr1_f1\tr1_p\tr1_r\tr2_f1\tr2_p\tr2_r\t"
         "rl_f1\trl_p\trl_r\n";
  render_row(out, "macro", "all", rep.n_docs, rep.macro);
  for (const BucketRow& r : rep.by_sections)
    render_row(out, "sections", r.bucket, r.n_docs, r.rouge);
  for (const BucketRow& r : rep.by_length)
    render_row(out, "length", r.bucket, r.n_docs, r.rouge);
}

EvalReport parse_report_tsv(std::istream& in) {
  EvalReport rep;
  std::string line;
  if (!std::getline(in, line)) throw DataError("report: missing header");
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    if (fields.size() != 12)
      throw ParseError("report: expected 12 columns", lineno);
    BucketRow row;
    row.bucket = fields[1];
    row.n_docs = std::stoull(fields[2]);
    RougeTriple& t = row.rouge;
    RougeScore* scores[3] = {&t.r1, &t.r2, &t.rl};
    for (size_t s = 0; s < 3; ++s) {
      scores[s]->f1 = std::stod(fields[3 + 3 * s]);
      scores[s]->precision = std::stod(fields[4 + 3 * s]);
      scores[s]->recall = std::stod(fields[5 + 3 * s]);
    }
    if (fields[0] == "macro") {
      rep.n_docs = row.n_docs;
      rep.macro = row.rouge;
    } else if (fields[0] == "sections") {
      rep.by_sections.push_back(std::move(row));
    } else if (fields[0] == "length") {
      rep.by_length.push_back(std::move(row));
    } else {
      throw ParseError("report: unknown table '" + fields[0] + "'", lineno);
    }
  }
  return rep;
}

}  // namespace hiersum
