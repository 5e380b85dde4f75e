#include "bicot/reward.hpp"

#include "bicot/errors.hpp"

namespace bicot {

double format_reward(const ParseReport& report, const RewardConfig& cfg) {
  if (!report.ordered_correctly) return 0.0;
  double credit = 0.0;
  for (const SegmentKind kind : report.found_tags) {
    if (!report.duplicated_tags.count(kind)) credit += cfg.format_per_tag;
  }
  return credit;
}

std::pair<double, std::map<SegmentKind, double>> rouge_reward(
    const BiCotDocument& cand, const BiCotDocument& ref,
    const RewardConfig& cfg) {
  std::map<SegmentKind, double> per_part;
  double sum = 0.0;
  for (const SegmentKind kind : kCanonicalOrder) {
    if (!ref.has(kind))
      throw ValidationError("reference is missing segment " +
                            std::string(tag_name(kind)));
    const auto ref_text = ref.segment_text(kind);
    double f = 0.0;
    if (cand.has(kind)) {
      // Auto mode is resolved on the reference so a garbled candidate can
      // never flip the tokenization and abort scoring.
      const TokenizeMode mode = resolve_mode(ref_text, cfg.tokenize_mode);
      f = rouge_l(tokenize(cand.segment_text(kind), mode),
                  tokenize(ref_text, mode))
              .f;
    }
    per_part[kind] = f;
    const auto w = cfg.part_weights.find(kind);
    sum += (w == cfg.part_weights.end() ? 0.0 : w->second) * f;
  }
  return {sum, per_part};
}

std::pair<double, std::vector<std::string>> keyword_reward(
    const BiCotDocument& cand, const std::vector<std::string>& keywords,
    const RewardConfig& cfg) {
  std::vector<std::string> matched;
  for (const auto& kw : keywords) {
    if (kw.empty()) continue;
    bool hit = false;
    if (cfg.keyword_match_mode == KeywordMatchMode::BothFwAndFa) {
      hit = cand.segment_text(SegmentKind::ForwardReasoning).find(kw) !=
                std::string_view::npos &&
            cand.segment_text(SegmentKind::FinalAnswer).find(kw) !=
                std::string_view::npos;
    } else {
      for (const SegmentKind kind : kCanonicalOrder) {
        if (cand.segment_text(kind).find(kw) != std::string_view::npos) {
          hit = true;
          break;
        }
      }
    }
    if (hit) matched.push_back(kw);
  }
  const double raw = double(matched.size()) * cfg.keyword_score;
  return {std::min(raw, cfg.keyword_cap), matched};
}

double compose_reward(double format, double rouge, double keyword,
                      const RewardConfig& cfg) {
  return cfg.lambda_format * format + cfg.lambda_rouge * rouge +
         cfg.lambda_keyword * keyword;
}

RewardBreakdown score_completion(std::string_view text, const QARecord& record,
                                 const RewardConfig& cfg) {
  const auto violations = validate_record(record);
  if (!violations.empty())
    throw ValidationError("invalid record " + record.id + ": " +
                          violations.front());
  const auto parsed = parse_bicot(text);
  RewardBreakdown b;
  b.format = format_reward(parsed.report, cfg);
  auto [rouge, per_part] = rouge_reward(parsed.document, record.reference, cfg);
  b.rouge = rouge;
  b.per_part_rouge = std::move(per_part);
  auto [keyword, matched] =
      keyword_reward(parsed.document, record.expected_keywords, cfg);
  b.keyword = keyword;
  b.matched_keywords = std::move(matched);
  b.total = compose_reward(b.format, b.rouge, b.keyword, cfg);
  return b;
}

std::vector<RewardBreakdown> score_group(const std::vector<std::string>& texts,
                                         const QARecord& record,
                                         const RewardConfig& cfg) {
  std::vector<RewardBreakdown> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(score_completion(t, record, cfg));
  return out;
}

}  // namespace bicot
