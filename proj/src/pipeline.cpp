#include "bicot/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include <httplib.h>
#include <json.hpp>

#include "bicot/config.hpp"
#include "bicot/errors.hpp"
#include "bicot/jsonl.hpp"
#include "bicot/text_metrics.hpp"
#include "bicot/unicode.hpp"

namespace bicot {

namespace {

constexpr const char* kSystemPrompt =
    "You are a careful assistant that augments question-answer pairs with "
    "structured reasoning. Follow the tag instructions exactly and output "
    "nothing outside the requested tags.";

constexpr const char* kReverseQuestionExemplar =
    "For example, the original question is: What are the characteristics of "
    "the stone material of Xie inkstones? The answer is: The inkstone "
    "material has a fine texture, combines both hardness and smoothness, "
    "with characteristics of being rough but not leaving marks, and smooth "
    "but not rejecting ink, and is praised as the \"Crown of Stones\" and "
    "the \"Pearl of Inkstones.\" The reverse question is: What type of stone "
    "has a fine texture, combines both hardness and smoothness, and has "
    "characteristics of being rough but not leaving marks, and smooth but "
    "not rejecting ink?";

std::string qa_block(const std::string& question, const std::string& answer) {
  return "\n\nQuestion: " + question + "\nAnswer: " + answer;
}

}  // namespace

AugmentationPrompts build_prompts(const std::string& question,
                                  const std::string& answer) {
  if (question.empty() || answer.empty())
    throw ValidationError("question and answer must be non-empty");
  AugmentationPrompts p;
  p.system = kSystemPrompt;
  p.forward_prompt =
      "Based on the following question and answer, please generate a "
      "detailed forward reasoning process that can answer the question, and "
      "include it within the <forward reasoning></forward reasoning> tags." +
      qa_block(question, answer);
  p.reverse_question_prompt =
      "Based on the following original question and answer, generate a "
      "reverse question. This reverse question should be a process that "
      "deduces the reason for the answer by considering the answer as known "
      "content. Please generate the question directly and enclose it within "
      "the <reverse question></reverse question> tags.\n\n" +
      std::string(kReverseQuestionExemplar) + qa_block(question, answer);
  p.reverse_reasoning_prompt =
      "Please generate a reverse reasoning process that can answer the "
      "reverse question for the following question, and enclose it within "
      "the <reverse reasoning></reverse reasoning> tags." +
      qa_block(question, answer);
  return p;
}

HttpTeacherClient::HttpTeacherClient(std::string endpoint, std::string token,
                                     std::string model, double temperature,
                                     int timeout_seconds,
                                     int transport_retries)
    : endpoint_(std::move(endpoint)),
      token_(std::move(token)),
      model_(std::move(model)),
      temperature_(temperature),
      timeout_seconds_(timeout_seconds),
      transport_retries_(transport_retries) {}

HttpTeacherClient HttpTeacherClient::from_environment() {
  const char* endpoint = std::getenv("BICOT_TEACHER_ENDPOINT");
  if (endpoint == nullptr || *endpoint == '\0')
    throw IoError("BICOT_TEACHER_ENDPOINT is not set");
  const char* token = std::getenv("BICOT_TEACHER_TOKEN");
  return HttpTeacherClient(endpoint, token ? token : "");
}

std::string HttpTeacherClient::send(const std::string& system,
                                    const std::string& prompt) {
  const std::string scheme = "http://";
  if (endpoint_.rfind(scheme, 0) != 0)
    throw IoError("teacher endpoint must be http://host[:port]/path");
  const auto path_pos = endpoint_.find('/', scheme.size());
  const std::string host = endpoint_.substr(
      scheme.size(),
      (path_pos == std::string::npos ? endpoint_.size() : path_pos) -
          scheme.size());
  const std::string path =
      path_pos == std::string::npos ? "/v1/chat/completions"
                                    : endpoint_.substr(path_pos);

  nlohmann::json body;
  body["model"] = model_;
  body["temperature"] = temperature_;
  body["messages"] = {{{"role", "system"}, {"content", system}},
                      {{"role", "user"}, {"content", prompt}}};
  const std::string payload = body.dump();

  httplib::Client cli(scheme + host);
  cli.set_connection_timeout(timeout_seconds_);
  cli.set_read_timeout(timeout_seconds_);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

  std::string last_error;
  for (int attempt = 0; attempt <= transport_retries_; ++attempt) {
    auto res = cli.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error: status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw IoError("teacher request failed: status " +
                    std::to_string(res->status));
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("malformed teacher response: ") + e.what());
    }
  }
  throw IoError("teacher unreachable after " +
                std::to_string(transport_retries_ + 1) + " attempts: " +
                last_error);
}

FixtureTeacherClient::FixtureTeacherClient(std::string directory)
    : directory_(std::move(directory)) {}

std::string FixtureTeacherClient::request_key(const std::string& system,
                                              const std::string& prompt) {
  return hex64(fnv1a64(system + '\x1f' + prompt));
}

std::string FixtureTeacherClient::send(const std::string& system,
                                       const std::string& prompt) {
  const std::string path =
      directory_ + "/" + request_key(system, prompt) + ".txt";
  return read_file(path);
}

void FixtureTeacherClient::store_fixture(const std::string& directory,
                                         const std::string& system,
                                         const std::string& prompt,
                                         const std::string& response) {
  std::filesystem::create_directories(directory);
  write_file(directory + "/" + request_key(system, prompt) + ".txt", response);
}

std::vector<std::string> extract_keywords(const BiCotDocument& reference,
                                          const KeywordExtractConfig& cfg) {
  if (!reference.has(SegmentKind::ForwardReasoning) ||
      !reference.has(SegmentKind::FinalAnswer))
    throw ValidationError(
        "keyword extraction needs forward reasoning and final answer");
  const auto fw_text = reference.segment_text(SegmentKind::ForwardReasoning);
  const auto fa_text = reference.segment_text(SegmentKind::FinalAnswer);
  const TokenizeMode mode = resolve_mode(
      std::string(fw_text) + std::string(fa_text), TokenizeMode::Auto);
  const auto a = tokenize(fw_text, mode);
  const auto b = tokenize(fa_text, mode);
  const std::size_t min_tokens =
      mode == TokenizeMode::Char ? cfg.min_tokens_char_mode : 1;

  // Common-suffix DP; a cell is a maximal common substring end when the
  // match cannot be extended to the right.
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> dp(
      n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (a.tokens[i - 1] == b.tokens[j - 1])
        dp[i][j] = dp[i - 1][j - 1] + 1;
    }
  }
  struct Candidate {
    std::string text;
    std::size_t token_len;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t run = dp[i][j];
      const bool extendable =
          i < n && j < m && a.tokens[i] == b.tokens[j];
      if (run < min_tokens || extendable) continue;
      std::string text;
      for (std::size_t t = i - run; t < i; ++t) {
        if (mode == TokenizeMode::Whitespace && !text.empty()) text += ' ';
        text += a.tokens[t];
      }
      candidates.push_back({std::move(text), run});
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.token_len != y.token_len) return x.token_len > y.token_len;
              return x.text < y.text;
            });

  std::vector<std::string> keywords;
  for (const auto& c : candidates) {
    if (keywords.size() >= cfg.max_keywords) break;
    if (cfg.stoplist.count(c.text)) continue;
    // Joining tokens can collapse whitespace; keep only true substrings so
    // downstream substring matching is guaranteed to hit.
    if (fw_text.find(c.text) == std::string_view::npos ||
        fa_text.find(c.text) == std::string_view::npos)
      continue;
    bool redundant = false;
    for (const auto& kept : keywords) {
      if (kept == c.text || kept.find(c.text) != std::string::npos) {
        redundant = true;
        break;
      }
    }
    if (!redundant) keywords.push_back(c.text);
  }
  return keywords;
}

namespace {

struct StageResult {
  std::string text;
  std::vector<KeywordAnnotation> annotations;
};

// Runs one generation stage; std::nullopt after the retry budget.
std::optional<StageResult> run_stage(TeacherClient& client,
                                     const std::string& system,
                                     const std::string& prompt,
                                     SegmentKind kind, int max_retries,
                                     AugmentationOutcome& outcome) {
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const std::string response = client.send(system, prompt);
    ++outcome.attempts;
    const auto parsed = parse_bicot(response);
    if (parsed.document.has(kind)) {
      StageResult result;
      result.text = std::string(parsed.document.segment_text(kind));
      for (const auto& a : parsed.document.keyword_annotations) {
        if (a.segment == kind) result.annotations.push_back(a);
      }
      return result;
    }
    outcome.defects.push_back("stage " + std::string(tag_name(kind)) +
                              ": response lacks tag pair (attempt " +
                              std::to_string(attempt + 1) + ")");
  }
  return std::nullopt;
}

}  // namespace

AugmentationOutcome augment_record(const std::string& id,
                                   const std::string& question,
                                   const std::string& answer,
                                   TeacherClient& client, int max_retries,
                                   const KeywordExtractConfig& kw_cfg) {
  AugmentationOutcome outcome;
  const auto prompts = build_prompts(question, answer);

  const auto fw = run_stage(client, prompts.system, prompts.forward_prompt,
                            SegmentKind::ForwardReasoning, max_retries,
                            outcome);
  if (!fw) return outcome;
  const auto rq = run_stage(client, prompts.system,
                            prompts.reverse_question_prompt,
                            SegmentKind::ReverseQuestion, max_retries,
                            outcome);
  if (!rq) return outcome;
  const std::string rr_prompt =
      prompts.reverse_reasoning_prompt + "\n\nReverse question: " + rq->text;
  const auto rr = run_stage(client, prompts.system, rr_prompt,
                            SegmentKind::ReverseReasoning, max_retries,
                            outcome);
  if (!rr) return outcome;

  QARecord record;
  record.id = id;
  record.question = question;
  record.reference.segments[SegmentKind::ForwardReasoning] = fw->text;
  record.reference.segments[SegmentKind::ReverseQuestion] = rq->text;
  record.reference.segments[SegmentKind::ReverseReasoning] = rr->text;
  // The gold answer stays authoritative; generation only extends it.
  record.reference.segments[SegmentKind::FinalAnswer] = answer;
  record.reference.raw_order = {kCanonicalOrder.begin(),
                                kCanonicalOrder.end()};
  for (const auto& stage : {*fw, *rq, *rr}) {
    for (const auto& a : stage.annotations)
      record.reference.keyword_annotations.push_back(a);
  }

  outcome.keyword_candidates = extract_keywords(record.reference, kw_cfg);
  if (outcome.keyword_candidates.empty()) {
    outcome.defects.push_back(
        "keywords: no common n-gram of forward reasoning and final answer");
    return outcome;
  }
  record.expected_keywords = outcome.keyword_candidates;

  const auto violations = validate_record(record);
  if (!violations.empty()) {
    for (const auto& v : violations) outcome.defects.push_back("record: " + v);
    return outcome;
  }
  outcome.record = std::move(record);
  return outcome;
}

DatasetValidation validate_dataset(const std::string& path) {
  DatasetValidation report;
  const std::string content = read_file(path);
  if (!content.empty() && content.back() != '\n') {
    const std::size_t lines =
        std::size_t(std::count(content.begin(), content.end(), '\n')) + 1;
    report.violations.push_back("line " + std::to_string(lines) +
                                ": missing trailing newline (truncated?)");
  }
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    std::string_view line(content.data() + pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    if (line.empty()) continue;
    const std::string prefix = "line " + std::to_string(line_no) + ": ";
    if (!is_valid_utf8(line)) {
      report.violations.push_back(prefix + "invalid UTF-8");
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      report.violations.push_back(prefix + "bad JSON: " + e.what());
      continue;
    }
    QARecord record;
    try {
      record = record_from_json(j);
    } catch (const ValidationError& e) {
      report.violations.push_back(prefix + e.what());
      continue;
    }
    ++report.record_count;
    if (!ids.insert(record.id).second)
      report.violations.push_back(prefix + "duplicate id \"" + record.id +
                                  "\"");
    for (const auto& v : validate_record(record))
      report.violations.push_back(prefix + v);
  }
  return report;
}

}  // namespace bicot
