#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bicot/cot_document.hpp"

namespace bicot {

struct AugmentationPrompts {
  std::string system;
  std::string forward_prompt;
  std::string reverse_question_prompt;
  std::string reverse_reasoning_prompt;  // the reverse question is appended
};

// The three staged generation prompts with question/answer interpolated.
// Throws ValidationError on empty inputs.
AugmentationPrompts build_prompts(const std::string& question,
                                  const std::string& answer);

class TeacherClient {
 public:
  virtual ~TeacherClient() = default;
  virtual std::string send(const std::string& system,
                           const std::string& prompt) = 0;
};

// Chat-completion POST against an OpenAI-shaped endpoint. Endpoint URL and
// auth token come from BICOT_TEACHER_ENDPOINT / BICOT_TEACHER_TOKEN unless
// given explicitly.
class HttpTeacherClient : public TeacherClient {
 public:
  HttpTeacherClient(std::string endpoint, std::string token,
                    std::string model = "teacher", double temperature = 0.7,
                    int timeout_seconds = 60, int transport_retries = 2);
  static HttpTeacherClient from_environment();

  std::string send(const std::string& system,
                   const std::string& prompt) override;

 private:
  std::string endpoint_;
  std::string token_;
  std::string model_;
  double temperature_;
  int timeout_seconds_;
  int transport_retries_;
};

// Byte-deterministic replay from a directory of recorded responses, one
// file per request key.
class FixtureTeacherClient : public TeacherClient {
 public:
  explicit FixtureTeacherClient(std::string directory);

  std::string send(const std::string& system,
                   const std::string& prompt) override;

  static std::string request_key(const std::string& system,
                                 const std::string& prompt);
  // Records a canned response under the key send() will look up.
  static void store_fixture(const std::string& directory,
                            const std::string& system,
                            const std::string& prompt,
                            const std::string& response);

 private:
  std::string directory_;
};

struct AugmentationOutcome {
  std::optional<QARecord> record;  // empty on rejection
  int attempts = 0;                // total teacher calls
  std::vector<std::string> defects;
  std::vector<std::string> keyword_candidates;
  bool needs_review = true;  // extracted keywords always await human review

  bool accepted() const { return record.has_value(); }
};

struct KeywordExtractConfig {
  std::size_t max_keywords = 8;
  std::size_t min_tokens_char_mode = 2;
  std::set<std::string> stoplist = {"的", "了", "是", "在", "和",
                                    "the", "of",  "and", "a",  "to"};
};

// Maximal common contiguous token n-grams of ForwardReasoning and
// FinalAnswer, minus the stoplist; longest first, capped. Throws
// ValidationError when either segment is missing.
std::vector<std::string> extract_keywords(
    const BiCotDocument& reference, const KeywordExtractConfig& cfg = {});

// Runs the three generation stages in order; a stage whose response lacks
// its tag pair is retried up to max_retries, then the record is rejected.
// The final answer is always the provided gold answer.
AugmentationOutcome augment_record(const std::string& id,
                                   const std::string& question,
                                   const std::string& answer,
                                   TeacherClient& client, int max_retries = 2,
                                   const KeywordExtractConfig& kw_cfg = {});

struct DatasetValidation {
  std::size_t record_count = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Per-line record validation plus file-level checks: UTF-8, JSONL
// well-formedness, unique ids. Throws IoError on unreadable files.
DatasetValidation validate_dataset(const std::string& path);

}  // namespace bicot
