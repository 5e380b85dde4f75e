#include "bicot/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bicot/errors.hpp"

namespace bicot {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": not a number: " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": not an integer: " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config key " + key + ": not a boolean: " + value);
}

TokenizeMode parse_tokenize_mode(const std::string& key,
                                 const std::string& value) {
  if (value == "char") return TokenizeMode::Char;
  if (value == "whitespace") return TokenizeMode::Whitespace;
  if (value == "auto") return TokenizeMode::Auto;
  throw ValidationError("config key " + key + ": unknown mode: " + value);
}

std::string_view tokenize_mode_name(TokenizeMode mode) {
  switch (mode) {
    case TokenizeMode::Char: return "char";
    case TokenizeMode::Whitespace: return "whitespace";
    case TokenizeMode::Auto: return "auto";
  }
  return "";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <typename T>
bool take(const KeyValueMap& kv, std::set<std::string>& consumed,
          const std::string& key, T& out,
          T (*parser)(const std::string&, const std::string&)) {
  const auto it = kv.find(key);
  if (it == kv.end()) return false;
  out = parser(key, it->second);
  consumed.insert(key);
  return true;
}

}  // namespace

KeyValueMap parse_key_value(std::string_view text) {
  KeyValueMap kv;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": empty key");
    kv[key] = value;
  }
  return kv;
}

KeyValueMap load_key_value_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_value(buf.str());
}

void apply_config(const KeyValueMap& kv, RewardConfig& cfg,
                  std::set<std::string>& consumed) {
  take(kv, consumed, "part_weight_fw",
       cfg.part_weights[SegmentKind::ForwardReasoning], parse_double);
  take(kv, consumed, "part_weight_rq",
       cfg.part_weights[SegmentKind::ReverseQuestion], parse_double);
  take(kv, consumed, "part_weight_rr",
       cfg.part_weights[SegmentKind::ReverseReasoning], parse_double);
  take(kv, consumed, "part_weight_fa",
       cfg.part_weights[SegmentKind::FinalAnswer], parse_double);
  take(kv, consumed, "keyword_score", cfg.keyword_score, parse_double);
  take(kv, consumed, "keyword_cap", cfg.keyword_cap, parse_double);
  take(kv, consumed, "lambda_format", cfg.lambda_format, parse_double);
  take(kv, consumed, "lambda_rouge", cfg.lambda_rouge, parse_double);
  take(kv, consumed, "lambda_keyword", cfg.lambda_keyword, parse_double);
  take(kv, consumed, "format_per_tag", cfg.format_per_tag, parse_double);
  if (const auto it = kv.find("keyword_match_mode"); it != kv.end()) {
    if (it->second == "anywhere")
      cfg.keyword_match_mode = KeywordMatchMode::Anywhere;
    else if (it->second == "both_fw_and_fa")
      cfg.keyword_match_mode = KeywordMatchMode::BothFwAndFa;
    else
      throw ValidationError("config key keyword_match_mode: unknown value: " +
                            it->second);
    consumed.insert(it->first);
  }
  if (const auto it = kv.find("tokenize_mode"); it != kv.end()) {
    cfg.tokenize_mode = parse_tokenize_mode(it->first, it->second);
    consumed.insert(it->first);
  }
  if (!(cfg.keyword_cap > 0.0))
    throw ValidationError("keyword_cap must be positive");
  for (const auto& [kind, w] : cfg.part_weights) {
    (void)kind;
    if (w < 0.0) throw ValidationError("part weights must be nonnegative");
  }
  if (cfg.lambda_format < 0.0 || cfg.lambda_rouge < 0.0 ||
      cfg.lambda_keyword < 0.0)
    throw ValidationError("lambdas must be nonnegative");
}

void apply_config(const KeyValueMap& kv, TrainConfig& cfg,
                  std::set<std::string>& consumed) {
  apply_config(kv, cfg.reward, consumed);
  if (const auto it = kv.find("group_size"); it != kv.end()) {
    cfg.group_size = int(parse_int(it->first, it->second));
    consumed.insert(it->first);
  }
  take(kv, consumed, "learning_rate", cfg.learning_rate, parse_double);
  if (const auto it = kv.find("iterations"); it != kv.end()) {
    cfg.iterations = int(parse_int(it->first, it->second));
    consumed.insert(it->first);
  }
  if (const auto it = kv.find("seed"); it != kv.end()) {
    cfg.seed = std::uint64_t(parse_int(it->first, it->second));
    consumed.insert(it->first);
  }
  if (const auto it = kv.find("cold_start"); it != kv.end()) {
    cfg.cold_start = parse_bool(it->first, it->second);
    consumed.insert(it->first);
  }
  take(kv, consumed, "clip_epsilon", cfg.clip.epsilon, parse_double);
  take(kv, consumed, "kl_beta", cfg.kl.beta, parse_double);
  if (const auto it = kv.find("kl_estimator"); it != kv.end()) {
    if (it->second == "exact_categorical")
      cfg.kl.estimator = KlEstimator::ExactCategorical;
    else if (it->second == "k3_sample")
      cfg.kl.estimator = KlEstimator::K3Sample;
    else
      throw ValidationError("config key kl_estimator: unknown value: " +
                            it->second);
    consumed.insert(it->first);
  }
  if (!(cfg.clip.epsilon > 0.0 && cfg.clip.epsilon < 1.0))
    throw ValidationError("clip_epsilon must be in (0, 1)");
  if (cfg.kl.beta < 0.0) throw ValidationError("kl_beta must be >= 0");
  if (cfg.group_size < 2) throw ValidationError("group_size must be >= 2");
  if (!(cfg.learning_rate > 0.0))
    throw ValidationError("learning_rate must be positive");
}

void apply_config(const KeyValueMap& kv, EvalConfig& cfg,
                  std::set<std::string>& consumed) {
  if (const auto it = kv.find("accuracy_criterion"); it != kv.end()) {
    if (it->second == "all_keywords_in_final_answer")
      cfg.accuracy_criterion = AccuracyCriterion::AllKeywordsInFinalAnswer;
    else if (it->second == "any_keyword")
      cfg.accuracy_criterion = AccuracyCriterion::AnyKeyword;
    else if (it->second == "rouge_threshold")
      cfg.accuracy_criterion = AccuracyCriterion::RougeThreshold;
    else
      throw ValidationError("config key accuracy_criterion: unknown value: " +
                            it->second);
    consumed.insert(it->first);
  }
  take(kv, consumed, "rouge_threshold", cfg.rouge_threshold, parse_double);
  if (const auto it = kv.find("tokenize_mode"); it != kv.end()) {
    cfg.tokenize_mode = parse_tokenize_mode(it->first, it->second);
    consumed.insert(it->first);
  }
  if (const auto it = kv.find("report_format"); it != kv.end()) {
    if (it->second == "markdown")
      cfg.report_format = ReportFormat::Markdown;
    else if (it->second == "csv")
      cfg.report_format = ReportFormat::Csv;
    else if (it->second == "json")
      cfg.report_format = ReportFormat::Json;
    else
      throw ValidationError("config key report_format: unknown value: " +
                            it->second);
    consumed.insert(it->first);
  }
  if (cfg.accuracy_criterion == AccuracyCriterion::RougeThreshold &&
      !(cfg.rouge_threshold > 0.0 && cfg.rouge_threshold <= 1.0))
    throw ValidationError("rouge_threshold must be in (0, 1]");
}

std::string canonical_string(const RewardConfig& cfg) {
  std::string s;
  s += "format_per_tag=" + fmt(cfg.format_per_tag) + "\n";
  s += "keyword_cap=" + fmt(cfg.keyword_cap) + "\n";
  s += "keyword_match_mode=";
  s += cfg.keyword_match_mode == KeywordMatchMode::Anywhere ? "anywhere"
                                                            : "both_fw_and_fa";
  s += "\n";
  s += "keyword_score=" + fmt(cfg.keyword_score) + "\n";
  s += "lambda_format=" + fmt(cfg.lambda_format) + "\n";
  s += "lambda_keyword=" + fmt(cfg.lambda_keyword) + "\n";
  s += "lambda_rouge=" + fmt(cfg.lambda_rouge) + "\n";
  s += "part_weight_fa=" +
       fmt(cfg.part_weights.at(SegmentKind::FinalAnswer)) + "\n";
  s += "part_weight_fw=" +
       fmt(cfg.part_weights.at(SegmentKind::ForwardReasoning)) + "\n";
  s += "part_weight_rq=" +
       fmt(cfg.part_weights.at(SegmentKind::ReverseQuestion)) + "\n";
  s += "part_weight_rr=" +
       fmt(cfg.part_weights.at(SegmentKind::ReverseReasoning)) + "\n";
  s += "tokenize_mode=";
  s += tokenize_mode_name(cfg.tokenize_mode);
  s += "\n";
  return s;
}

std::string canonical_string(const TrainConfig& cfg) {
  std::string s = canonical_string(cfg.reward);
  s += "clip_epsilon=" + fmt(cfg.clip.epsilon) + "\n";
  s += "cold_start=" + std::string(cfg.cold_start ? "true" : "false") + "\n";
  s += "group_size=" + std::to_string(cfg.group_size) + "\n";
  s += "iterations=" + std::to_string(cfg.iterations) + "\n";
  s += "kl_beta=" + fmt(cfg.kl.beta) + "\n";
  s += "kl_estimator=";
  s += cfg.kl.estimator == KlEstimator::ExactCategorical ? "exact_categorical"
                                                         : "k3_sample";
  s += "\n";
  s += "learning_rate=" + fmt(cfg.learning_rate) + "\n";
  s += "seed=" + std::to_string(cfg.seed) + "\n";
  return s;
}

std::string canonical_string(const EvalConfig& cfg) {
  std::string s = "accuracy_criterion=";
  switch (cfg.accuracy_criterion) {
    case AccuracyCriterion::AllKeywordsInFinalAnswer:
      s += "all_keywords_in_final_answer";
      break;
    case AccuracyCriterion::AnyKeyword:
      s += "any_keyword";
      break;
    case AccuracyCriterion::RougeThreshold:
      s += "rouge_threshold";
      break;
  }
  s += "\n";
  s += "report_format=";
  switch (cfg.report_format) {
    case ReportFormat::Markdown: s += "markdown"; break;
    case ReportFormat::Csv: s += "csv"; break;
    case ReportFormat::Json: s += "json"; break;
  }
  s += "\n";
  s += "rouge_threshold=" + fmt(cfg.rouge_threshold) + "\n";
  s += "tokenize_mode=";
  s += tokenize_mode_name(cfg.tokenize_mode);
  s += "\n";
  return s;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace bicot
