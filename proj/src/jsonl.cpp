#include "bicot/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "bicot/errors.hpp"
#include "bicot/reward.hpp"
#include "bicot/unicode.hpp"

namespace bicot {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<nlohmann::json> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    auto nl = content.find('\n', pos);
    const bool has_newline = nl != std::string::npos;
    if (!has_newline) nl = content.size();
    std::string_view line(content.data() + pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    if (line.empty()) continue;
    if (!is_valid_utf8(line))
      throw ValidationError(path + ": line " + std::to_string(line_no) +
                            ": invalid UTF-8");
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ": line " + std::to_string(line_no) +
                            ": bad JSON: " + e.what());
    }
  }
  return out;
}

namespace {

// Parses a single segment string that may carry inline <keywords> markers.
void fill_segment(BiCotDocument& doc, SegmentKind kind,
                  const std::string& raw) {
  const std::string tagged = "<" + std::string(tag_name(kind)) + ">" + raw +
                             "</" + std::string(tag_name(kind)) + ">";
  const auto parsed = parse_bicot(tagged);
  doc.segments[kind] = std::string(parsed.document.segment_text(kind));
  for (const auto& a : parsed.document.keyword_annotations)
    doc.keyword_annotations.push_back(a);
  doc.raw_order.push_back(kind);
}

std::string segment_with_markers(const BiCotDocument& doc, SegmentKind kind) {
  const std::string rendered = render_bicot(doc);
  const std::string open = "<" + std::string(tag_name(kind)) + ">";
  const std::string close = "</" + std::string(tag_name(kind)) + ">";
  const auto b = rendered.find(open);
  if (b == std::string::npos) return "";
  const auto e = rendered.find(close, b);
  return rendered.substr(b + open.size(), e - b - open.size());
}

}  // namespace

QARecord record_from_json(const nlohmann::json& j) {
  QARecord record;
  try {
    record.id = j.at("id").get<std::string>();
    record.question = j.at("question").get<std::string>();
    for (const SegmentKind kind : kCanonicalOrder) {
      const std::string key(segment_key(kind));
      if (j.contains(key))
        fill_segment(record.reference, kind, j.at(key).get<std::string>());
    }
    record.expected_keywords =
        j.at("keywords").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad record: ") + e.what());
  }
  return record;
}

nlohmann::json record_to_json(const QARecord& record) {
  nlohmann::json j;
  j["id"] = record.id;
  j["question"] = record.question;
  for (const SegmentKind kind : kCanonicalOrder) {
    if (record.reference.has(kind))
      j[std::string(segment_key(kind))] =
          segment_with_markers(record.reference, kind);
  }
  j["keywords"] = record.expected_keywords;
  return j;
}

std::vector<QARecord> load_dataset(const std::string& path) {
  std::vector<QARecord> records;
  for (const auto& j : read_jsonl(path)) records.push_back(record_from_json(j));
  return records;
}

void save_dataset(const std::string& path,
                  const std::vector<QARecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  write_file(path, out);
}

TemplateBank load_bank(const std::string& path) {
  TemplateBank bank;
  for (const auto& j : read_jsonl(path)) {
    try {
      const auto qid = j.at("question_id").get<std::string>();
      if (bank.templates.count(qid))
        throw ValidationError("duplicate bank question id: " + qid);
      bank.templates[qid] = j.at("templates").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ": bad bank entry: " + e.what());
    }
  }
  return bank;
}

std::map<std::string, std::string> load_outputs(const std::string& path) {
  std::map<std::string, std::string> outputs;
  for (const auto& j : read_jsonl(path)) {
    try {
      const auto id = j.at("id").get<std::string>();
      if (!outputs.emplace(id, j.at("output").get<std::string>()).second)
        throw ValidationError("duplicate output id: " + id);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ": bad output entry: " + e.what());
    }
  }
  return outputs;
}

nlohmann::json breakdown_to_json(const RewardBreakdown& breakdown) {
  nlohmann::json j;
  j["format"] = breakdown.format;
  j["rouge"] = breakdown.rouge;
  j["keyword"] = breakdown.keyword;
  j["total"] = breakdown.total;
  nlohmann::json parts;
  for (const auto& [kind, f] : breakdown.per_part_rouge)
    parts[std::string(segment_key(kind))] = f;
  j["per_part_rouge"] = parts;
  j["matched_keywords"] = breakdown.matched_keywords;
  return j;
}

}  // namespace bicot
