#include "bicot/cot_document.hpp"

#include <algorithm>

#include "bicot/errors.hpp"

namespace bicot {

namespace {

bool starts_at(std::string_view text, std::size_t pos, std::string_view token) {
  return text.size() - pos >= token.size() &&
         text.compare(pos, token.size(), token) == 0;
}

std::string open_tag(std::string_view name) {
  return "<" + std::string(name) + ">";
}

std::string close_tag(std::string_view name) {
  return "</" + std::string(name) + ">";
}

// True for strings that plausibly name a tag; keeps the unknown-tag
// diagnostic quiet on arbitrary '<' characters in prose.
bool looks_like_tag_name(std::string_view body) {
  if (body.empty() || body.size() > 32) return false;
  std::size_t start = body.front() == '/' ? 1 : 0;
  if (start == body.size()) return false;
  for (std::size_t i = start; i < body.size(); ++i) {
    const char c = body[i];
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == ' ' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

// Removes well-formed <keywords>...</keywords> pairs from `inner`, recording
// each span at its offset in the stripped output. Unclosed markers stay in
// the text verbatim and produce a defect.
std::string strip_keyword_spans(std::string_view inner, SegmentKind kind,
                                std::vector<KeywordAnnotation>& annotations,
                                std::vector<Defect>& defects) {
  const std::string open = open_tag(kKeywordsTag);
  const std::string close = close_tag(kKeywordsTag);
  std::string stripped;
  stripped.reserve(inner.size());
  std::size_t i = 0;
  while (i < inner.size()) {
    const auto lt = inner.find(open, i);
    if (lt == std::string_view::npos) {
      stripped.append(inner.substr(i));
      break;
    }
    const auto end = inner.find(close, lt + open.size());
    if (end == std::string_view::npos) {
      defects.push_back({DefectKind::UnclosedTag,
                         std::string(kKeywordsTag) + " in " +
                             std::string(tag_name(kind))});
      stripped.append(inner.substr(i));
      break;
    }
    stripped.append(inner.substr(i, lt - i));
    const auto span = inner.substr(lt + open.size(), end - lt - open.size());
    annotations.push_back(
        {kind, stripped.size(), std::string(span)});
    stripped.append(span);
    i = end + close.size();
  }
  return stripped;
}

bool is_canonical_order(const std::vector<SegmentKind>& order) {
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (static_cast<int>(order[i]) <= static_cast<int>(order[i - 1]))
      return false;
  }
  return true;
}

}  // namespace

std::string_view tag_name(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::ForwardReasoning: return "forward reasoning";
    case SegmentKind::ReverseQuestion: return "reverse question";
    case SegmentKind::ReverseReasoning: return "reverse reasoning";
    case SegmentKind::FinalAnswer: return "final answer";
  }
  return "";
}

std::string_view segment_key(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::ForwardReasoning: return "forward_reasoning";
    case SegmentKind::ReverseQuestion: return "reverse_question";
    case SegmentKind::ReverseReasoning: return "reverse_reasoning";
    case SegmentKind::FinalAnswer: return "final_answer";
  }
  return "";
}

std::string_view BiCotDocument::segment_text(SegmentKind kind) const {
  const auto it = segments.find(kind);
  return it == segments.end() ? std::string_view{} : std::string_view(it->second);
}

ParseResult parse_bicot(std::string_view text) {
  ParseResult out;
  auto& doc = out.document;
  auto& rep = out.report;

  std::size_t i = 0;
  while (i < text.size()) {
    const auto lt = text.find('<', i);
    if (lt == std::string_view::npos) break;
    if (starts_at(text, lt, "<p>")) {
      i = lt + 3;
      continue;
    }
    if (starts_at(text, lt, "</p>")) {
      i = lt + 4;
      continue;
    }
    bool matched = false;
    for (const SegmentKind kind : kCanonicalOrder) {
      const std::string open = open_tag(tag_name(kind));
      if (!starts_at(text, lt, open)) continue;
      matched = true;
      const std::string close = close_tag(tag_name(kind));
      const auto end = text.find(close, lt + open.size());
      if (end == std::string_view::npos) {
        rep.malformed.push_back(
            {DefectKind::UnclosedTag, std::string(tag_name(kind))});
        i = lt + open.size();
        break;
      }
      const auto inner = text.substr(lt + open.size(), end - lt - open.size());
      for (const SegmentKind other : kCanonicalOrder) {
        if (inner.find(open_tag(tag_name(other))) != std::string_view::npos) {
          rep.malformed.push_back(
              {DefectKind::InterleavedTags,
               std::string(tag_name(other)) + " inside " +
                   std::string(tag_name(kind))});
        }
      }
      if (doc.has(kind)) {
        // First occurrence wins; the duplicate only produces a defect.
        rep.malformed.push_back(
            {DefectKind::DuplicateSegment, std::string(tag_name(kind))});
        rep.duplicated_tags.insert(kind);
        std::vector<KeywordAnnotation> ignored;
        strip_keyword_spans(inner, kind, ignored, rep.malformed);
      } else {
        doc.segments[kind] =
            strip_keyword_spans(inner, kind, doc.keyword_annotations,
                                rep.malformed);
        doc.raw_order.push_back(kind);
        rep.found_tags.insert(kind);
      }
      i = end + close.size();
      break;
    }
    if (!matched) {
      const auto gt = text.find('>', lt + 1);
      if (gt != std::string_view::npos &&
          looks_like_tag_name(text.substr(lt + 1, gt - lt - 1))) {
        rep.malformed.push_back(
            {DefectKind::UnknownTag,
             std::string(text.substr(lt, gt - lt + 1))});
      }
      i = lt + 1;
    }
  }
  rep.ordered_correctly = is_canonical_order(doc.raw_order);
  return out;
}

std::string render_bicot(const BiCotDocument& doc) {
  std::string out;
  for (const SegmentKind kind : kCanonicalOrder) {
    const auto it = doc.segments.find(kind);
    if (it == doc.segments.end()) continue;
    const std::string& seg = it->second;

    std::vector<KeywordAnnotation> anns;
    for (const auto& a : doc.keyword_annotations) {
      if (a.segment == kind) anns.push_back(a);
    }
    std::sort(anns.begin(), anns.end(), [](const auto& a, const auto& b) {
      return a.offset < b.offset;
    });
    std::size_t prev_end = 0;
    for (const auto& a : anns) {
      if (a.offset < prev_end)
        throw ValidationError("overlapping keyword annotations in " +
                              std::string(tag_name(kind)));
      if (a.offset + a.text.size() > seg.size() ||
          seg.compare(a.offset, a.text.size(), a.text) != 0)
        throw ValidationError("keyword annotation \"" + a.text +
                              "\" does not match segment " +
                              std::string(tag_name(kind)));
      prev_end = a.offset + a.text.size();
    }

    out += open_tag(tag_name(kind));
    std::size_t pos = 0;
    for (const auto& a : anns) {
      out.append(seg, pos, a.offset - pos);
      out += open_tag(kKeywordsTag);
      out += a.text;
      out += close_tag(kKeywordsTag);
      pos = a.offset + a.text.size();
    }
    out.append(seg, pos, seg.size() - pos);
    out += close_tag(tag_name(kind));
  }
  return out;
}

std::vector<std::string> validate_record(const QARecord& record) {
  std::vector<std::string> violations;
  if (record.id.empty()) violations.push_back("id: must be non-empty");
  if (record.question.empty())
    violations.push_back("question: must be non-empty");
  for (const SegmentKind kind : kCanonicalOrder) {
    if (!record.reference.has(kind))
      violations.push_back("reference: missing segment " +
                           std::string(tag_name(kind)));
  }
  for (const auto& a : record.reference.keyword_annotations) {
    const auto seg = record.reference.segment_text(a.segment);
    if (a.offset + a.text.size() > seg.size() ||
        seg.compare(a.offset, a.text.size(), a.text) != 0)
      violations.push_back("reference: annotation \"" + a.text +
                           "\" is not a span of segment " +
                           std::string(tag_name(a.segment)));
  }
  if (record.expected_keywords.empty())
    violations.push_back("expected_keywords: must be non-empty");
  std::set<std::string> seen;
  for (const auto& kw : record.expected_keywords) {
    if (kw.empty()) {
      violations.push_back("expected_keywords: empty string");
      continue;
    }
    if (!seen.insert(kw).second)
      violations.push_back("expected_keywords: duplicate \"" + kw + "\"");
  }
  return violations;
}

}  // namespace bicot
