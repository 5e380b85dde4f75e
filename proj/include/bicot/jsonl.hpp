#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bicot/cot_document.hpp"
#include "bicot/toy_lab.hpp"

namespace bicot {

// One parsed object per line; empty lines are rejected. Throws IoError on
// unreadable files and ValidationError with the line number on bad JSON or
// invalid UTF-8.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Dataset schema: id, question, forward_reasoning, reverse_question,
// reverse_reasoning, final_answer, keywords. Segment strings may carry
// inline <keywords> markers; they are stripped into annotations.
QARecord record_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const QARecord& record);

std::vector<QARecord> load_dataset(const std::string& path);
void save_dataset(const std::string& path,
                  const std::vector<QARecord>& records);

// Template bank schema: question_id, templates (array of tagged strings).
TemplateBank load_bank(const std::string& path);

// Outputs schema: id, output. Throws ValidationError on duplicate ids.
std::map<std::string, std::string> load_outputs(const std::string& path);

nlohmann::json breakdown_to_json(const RewardBreakdown& breakdown);

}  // namespace bicot
