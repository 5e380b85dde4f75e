#include "support/fixtures.hpp"

#include <algorithm>
#include <array>

namespace bicot::testing {

namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string tagged(SegmentKind kind, const std::string& text) {
  return "<" + std::string(tag_name(kind)) + ">" + text + "</" +
         std::string(tag_name(kind)) + ">";
}

std::string full_doc(const std::string& fw, const std::string& rq,
                     const std::string& rr, const std::string& fa) {
  return tagged(SegmentKind::ForwardReasoning, fw) +
         tagged(SegmentKind::ReverseQuestion, rq) +
         tagged(SegmentKind::ReverseReasoning, rr) +
         tagged(SegmentKind::FinalAnswer, fa);
}

BiCotDocument plain_reference(const std::string& fw, const std::string& rq,
                              const std::string& rr, const std::string& fa) {
  BiCotDocument doc;
  doc.segments[SegmentKind::ForwardReasoning] = fw;
  doc.segments[SegmentKind::ReverseQuestion] = rq;
  doc.segments[SegmentKind::ReverseReasoning] = rr;
  doc.segments[SegmentKind::FinalAnswer] = fa;
  doc.raw_order = {kCanonicalOrder.begin(), kCanonicalOrder.end()};
  return doc;
}

}  // namespace

CompositionFixture make_composition_fixture() {
  // Reference reverse question: 200 distinct tokens so a 93-token shared
  // prefix yields Rouge-L F = 2*93/400 = 0.465 exactly.
  std::vector<std::string> ref_rq;
  for (int i = 0; i < 200; ++i) ref_rq.push_back("rq" + std::to_string(i));

  const std::string ref_fw = "KW1 KW2 KW3 KW4 KW5 context tokens";
  const std::string ref_fa = "s1 s2 s3 t1";

  CompositionFixture fx;
  fx.record.id = "fig-shape";
  fx.record.question = "which components compose the total?";
  fx.record.reference =
      plain_reference(ref_fw, join(ref_rq), "rr1 rr2", ref_fa);
  fx.record.expected_keywords = {"KW1", "KW2", "KW3", "KW4", "KW5"};

  // format 1.0; rouge 0.2 (fw) + 0.3 (fa, F = 2*3/8) = 0.5; keyword 1.25.
  fx.high_completion =
      full_doc(ref_fw, "zq", "zr", "KW1KW2KW3KW4KW5 s1 s2 s3");

  // format 1.0; rouge 0.2 (fw) + 0.093 (rq, F = 0.465) = 0.293; keyword 0.5.
  std::vector<std::string> low_rq(ref_rq.begin(), ref_rq.begin() + 93);
  for (int i = 0; i < 107; ++i) low_rq.push_back("x" + std::to_string(i));
  fx.low_completion =
      full_doc(ref_fw, join(low_rq), "zzz", "aKW1a bKW2b cc dd");
  return fx;
}

BankFixture make_standard_bank() {
  BankFixture fx;
  for (int i = 0; i < 5; ++i) {
    const std::string n = std::to_string(i);
    const std::string fw =
        "topic" + n + " alpha" + n + " keyA" + n + " keyB" + n + " gamma" + n;
    const std::string rq = "why" + n + " question" + n + " tokens" + n;
    const std::string rr = "reverse" + n + " reasoning" + n + " text" + n;
    const std::string fa = "answer" + n + " keyA" + n + " keyB" + n +
                           " final" + n;

    QARecord record;
    record.id = "q" + n;
    record.question = "question about topic" + n + "?";
    record.reference = plain_reference(fw, rq, rr, fa);
    record.expected_keywords = {"keyA" + n, "keyB" + n};
    fx.dataset.push_back(record);

    const std::string junk_fa = "junkA junkB junkC junkD";
    std::vector<std::string> templates;
    // t0: the reference itself.
    templates.push_back(full_doc(fw, rq, rr, fa));
    // t1: one final-answer token off.
    templates.push_back(full_doc(
        fw, rq, rr, "answer" + n + " keyA" + n + " keyB" + n + " wrong" + n));
    // t2: duplicated final answer tag (format 0.75) + broken rr.
    templates.push_back(full_doc(fw, rq, "broken", "answer" + n + " keyA" + n +
                                                       " keyB" + n + " wrong" +
                                                       n) +
                        tagged(SegmentKind::FinalAnswer, "dup"));
    // t3: duplicated final answer tag, partial fa.
    templates.push_back(
        full_doc(fw, rq, "broken", "keyA" + n + " keyB" + n + " j1 j2") +
        tagged(SegmentKind::FinalAnswer, "dup"));
    // t4: missing reverse reasoning.
    templates.push_back(tagged(SegmentKind::ForwardReasoning, fw) +
                        tagged(SegmentKind::ReverseQuestion, rq) +
                        tagged(SegmentKind::FinalAnswer, fa));
    // t5: right content, wrong order.
    templates.push_back(tagged(SegmentKind::FinalAnswer, fa) +
                        tagged(SegmentKind::ForwardReasoning, fw));
    // t6: a single tag with junk.
    templates.push_back(tagged(SegmentKind::FinalAnswer, junk_fa));
    // t7: no tags at all.
    templates.push_back("no structure here at all");
    fx.bank.templates[record.id] = std::move(templates);
  }
  return fx;
}

std::vector<QARecord> make_synthetic_dataset(std::size_t n) {
  std::vector<QARecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string s = std::to_string(i);
    QARecord record;
    record.id = "item-" + std::string(3 - std::min<std::size_t>(3, s.size()),
                                      '0') +
                s;
    record.question = "what is known about subject " + s + "?";
    record.reference = plain_reference(
        "fw" + s + " keyA" + s + "x keyB" + s + "x detail" + s,
        "rq" + s + " question words", "rr" + s + " because reasons",
        "answer" + s + " keyA" + s + "x keyB" + s + "x done" + s);
    record.expected_keywords = {"keyA" + s + "x", "keyB" + s + "x"};
    records.push_back(std::move(record));
  }
  return records;
}

BiCotDocument random_document(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {
      "alpha", "beta", "gamma", "delta", "西汉", "皮影", "工艺", "origin",
      "craft", "period"};
  std::uniform_int_distribution<int> word_pick(0, int(words.size()) - 1);
  std::uniform_int_distribution<int> len_pick(1, 8);
  std::uniform_int_distribution<int> coin(0, 1);

  BiCotDocument doc;
  std::array<bool, 4> include{};
  bool any = false;
  for (auto& flag : include) {
    flag = coin(rng) == 1;
    any = any || flag;
  }
  if (!any) include[3] = true;  // keep at least one segment
  for (std::size_t k = 0; k < kCanonicalOrder.size(); ++k) {
    const SegmentKind kind = kCanonicalOrder[k];
    if (!include[k]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> token_spans;
    std::string text;
    const int len = len_pick(rng);
    for (int t = 0; t < len; ++t) {
      if (!text.empty()) text += ' ';
      const auto& w = words[std::size_t(word_pick(rng))];
      token_spans.emplace_back(text.size(), w.size());
      text += w;
    }
    doc.segments[kind] = text;
    doc.raw_order.push_back(kind);
    // annotate a sparse, non-overlapping subset of whole tokens
    for (const auto& [offset, size] : token_spans) {
      if (coin(rng) == 0 && coin(rng) == 0) {
        doc.keyword_annotations.push_back(
            {kind, offset, doc.segments[kind].substr(offset, size)});
      }
    }
  }
  return doc;
}

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len_pick(0, max_len);
  std::uniform_int_distribution<int> byte_pick(0, 255);
  // Bias toward tag-ish characters so the parser's tag paths get exercised.
  static const std::string tagish = "<>/forward reasning finl aswer<><>";
  std::uniform_int_distribution<std::size_t> tag_pick(0, tagish.size() - 1);
  std::uniform_int_distribution<int> mode_pick(0, 2);
  std::string out;
  const std::size_t len = len_pick(rng);
  for (std::size_t i = 0; i < len; ++i) {
    if (mode_pick(rng) == 0)
      out += char(byte_pick(rng));
    else
      out += tagish[tag_pick(rng)];
  }
  return out;
}

std::size_t lcs_oracle(const std::vector<std::uint8_t>& a,
                       const std::vector<std::uint8_t>& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto bits = std::size_t(__builtin_popcount(mask));
    if (bits <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size())
        ok = false;
      else
        ++j;
    }
    if (ok) best = bits;
  }
  return best;
}

}  // namespace bicot::testing
