#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bicot {

enum class SegmentKind {
  ForwardReasoning,
  ReverseQuestion,
  ReverseReasoning,
  FinalAnswer,
};

inline constexpr std::array<SegmentKind, 4> kCanonicalOrder = {
    SegmentKind::ForwardReasoning,
    SegmentKind::ReverseQuestion,
    SegmentKind::ReverseReasoning,
    SegmentKind::FinalAnswer,
};

// Tag name as it appears in the text, e.g. "forward reasoning".
std::string_view tag_name(SegmentKind kind);

// Stable snake_case key used in JSON files, e.g. "forward_reasoning".
std::string_view segment_key(SegmentKind kind);

inline constexpr std::string_view kKeywordsTag = "keywords";

struct KeywordAnnotation {
  SegmentKind segment;
  std::size_t offset;  // byte offset into the segment's stripped text
  std::string text;

  bool operator==(const KeywordAnnotation&) const = default;
};

struct BiCotDocument {
  // Segment text with <keywords> markers stripped.
  std::map<SegmentKind, std::string> segments;
  std::vector<KeywordAnnotation> keyword_annotations;
  std::vector<SegmentKind> raw_order;  // first occurrences, encounter order

  bool operator==(const BiCotDocument&) const = default;

  bool has(SegmentKind kind) const { return segments.count(kind) > 0; }
  // Returns the stripped text, or "" when the segment is absent.
  std::string_view segment_text(SegmentKind kind) const;
};

enum class DefectKind {
  UnclosedTag,
  DuplicateSegment,
  InterleavedTags,
  UnknownTag,
};

struct Defect {
  DefectKind kind;
  std::string detail;
};

struct ParseReport {
  std::set<SegmentKind> found_tags;       // well-formed pairs only
  std::set<SegmentKind> duplicated_tags;  // kinds that appeared more than once
  bool ordered_correctly = true;
  std::vector<Defect> malformed;
};

struct ParseResult {
  BiCotDocument document;
  ParseReport report;
};

// Total: never throws, any byte string yields a (possibly empty) document
// plus a defect report. An enclosing <p>...</p> wrapper is ignored.
ParseResult parse_bicot(std::string_view text);

// Canonical order, keyword annotations re-emitted as nested <keywords> tags.
// Throws ValidationError when an annotation does not match its segment text
// or annotations overlap.
std::string render_bicot(const BiCotDocument& doc);

struct QARecord {
  std::string id;
  std::string question;
  BiCotDocument reference;
  std::vector<std::string> expected_keywords;
};

// Empty result iff the record satisfies all invariants; each entry names
// the offending field and rule.
std::vector<std::string> validate_record(const QARecord& record);

}  // namespace bicot
