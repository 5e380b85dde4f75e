#pragma once

#include <map>
#include <string>
#include <vector>

#include "bicot/cot_document.hpp"
#include "bicot/text_metrics.hpp"

namespace bicot {

enum class AccuracyCriterion {
  AllKeywordsInFinalAnswer,
  AnyKeyword,
  RougeThreshold,
};

enum class ReportFormat { Markdown, Csv, Json };

struct EvalConfig {
  AccuracyCriterion accuracy_criterion =
      AccuracyCriterion::AllKeywordsInFinalAnswer;
  double rouge_threshold = 0.5;  // used with RougeThreshold only
  TokenizeMode tokenize_mode = TokenizeMode::Auto;
  ReportFormat report_format = ReportFormat::Markdown;
};

struct EvalItem {
  std::string id;
  bool correct = false;
  double bleu4 = 0.0;
  double rouge_l_f = 0.0;
};

struct EvalReport {
  std::vector<EvalItem> items;  // sorted by id
  double accuracy = 0.0;        // percent
  double mean_bleu4 = 0.0;      // x100
  double mean_rouge_l = 0.0;    // x100
  std::string dataset_path;
  std::string config_hash;
  std::size_t item_count = 0;
  std::vector<std::string> warnings;
};

bool judge_accuracy(const BiCotDocument& output, const QARecord& record,
                    const EvalConfig& cfg);

// BLEU-4 and Rouge-L are computed on the FinalAnswer segment only. Missing
// outputs are scored as empty with a warning; duplicate dataset ids throw
// ValidationError.
EvalReport evaluate(const std::map<std::string, std::string>& outputs,
                    const std::vector<QARecord>& dataset,
                    const EvalConfig& cfg);

std::string render_report(const EvalReport& report, ReportFormat format,
                          const std::string& method_label = "method");

// Table-shaped markdown comparison: one row per (label, report).
std::string render_comparison(
    const std::vector<std::pair<std::string, EvalReport>>& reports);

EvalReport report_from_json_text(const std::string& text);

}  // namespace bicot
