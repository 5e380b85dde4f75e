#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bicot/cot_document.hpp"
#include "bicot/text_metrics.hpp"

namespace bicot {

enum class KeywordMatchMode { Anywhere, BothFwAndFa };

struct RewardConfig {
  std::map<SegmentKind, double> part_weights = {
      {SegmentKind::ForwardReasoning, 0.2},
      {SegmentKind::ReverseQuestion, 0.2},
      {SegmentKind::ReverseReasoning, 0.2},
      {SegmentKind::FinalAnswer, 0.4},
  };
  double keyword_score = 0.25;
  double keyword_cap = 1.5;
  double lambda_format = 1.0;
  double lambda_rouge = 1.0;
  double lambda_keyword = 1.0;
  double format_per_tag = 0.25;
  KeywordMatchMode keyword_match_mode = KeywordMatchMode::BothFwAndFa;
  TokenizeMode tokenize_mode = TokenizeMode::Auto;
};

struct RewardBreakdown {
  double format = 0.0;
  double rouge = 0.0;
  double keyword = 0.0;
  double total = 0.0;
  std::map<SegmentKind, double> per_part_rouge;
  std::vector<std::string> matched_keywords;
};

// 0.25 per well-formed, non-duplicated tag pair; zeroed when the found
// segments are out of canonical order.
double format_reward(const ParseReport& report, const RewardConfig& cfg);

// Weighted per-part Rouge-L F against the reference. Segments missing from
// the candidate contribute 0. Throws ValidationError when the reference
// lacks a segment.
std::pair<double, std::map<SegmentKind, double>> rouge_reward(
    const BiCotDocument& cand, const BiCotDocument& ref,
    const RewardConfig& cfg);

// min(n_matches * keyword_score, keyword_cap); matches are exact substring
// hits on stripped segment text, counted once per distinct keyword.
std::pair<double, std::vector<std::string>> keyword_reward(
    const BiCotDocument& cand, const std::vector<std::string>& keywords,
    const RewardConfig& cfg);

double compose_reward(double format, double rouge, double keyword,
                      const RewardConfig& cfg);

// Throws ValidationError when the record itself is invalid.
RewardBreakdown score_completion(std::string_view text, const QARecord& record,
                                 const RewardConfig& cfg);

std::vector<RewardBreakdown> score_group(const std::vector<std::string>& texts,
                                         const QARecord& record,
                                         const RewardConfig& cfg);

}  // namespace bicot
