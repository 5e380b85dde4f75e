#include "bicot/eval.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "bicot/config.hpp"
#include "bicot/errors.hpp"

namespace bicot {

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

bool judge_accuracy(const BiCotDocument& output, const QARecord& record,
                    const EvalConfig& cfg) {
  const auto fa = output.segment_text(SegmentKind::FinalAnswer);
  switch (cfg.accuracy_criterion) {
    case AccuracyCriterion::AllKeywordsInFinalAnswer: {
      if (!output.has(SegmentKind::FinalAnswer)) return false;
      for (const auto& kw : record.expected_keywords) {
        if (fa.find(kw) == std::string_view::npos) return false;
      }
      return true;
    }
    case AccuracyCriterion::AnyKeyword: {
      for (const auto& kw : record.expected_keywords) {
        for (const SegmentKind kind : kCanonicalOrder) {
          if (output.segment_text(kind).find(kw) != std::string_view::npos)
            return true;
        }
      }
      return false;
    }
    case AccuracyCriterion::RougeThreshold: {
      const auto ref_fa =
          record.reference.segment_text(SegmentKind::FinalAnswer);
      const TokenizeMode mode = resolve_mode(ref_fa, cfg.tokenize_mode);
      const auto score =
          rouge_l(tokenize(fa, mode), tokenize(ref_fa, mode));
      return score.f >= cfg.rouge_threshold;
    }
  }
  return false;
}

EvalReport evaluate(const std::map<std::string, std::string>& outputs,
                    const std::vector<QARecord>& dataset,
                    const EvalConfig& cfg) {
  EvalReport report;
  report.config_hash = config_hash(cfg);

  std::set<std::string> ids;
  for (const auto& r : dataset) {
    if (!ids.insert(r.id).second)
      throw ValidationError("duplicate dataset id: " + r.id);
  }

  std::vector<const QARecord*> sorted;
  sorted.reserve(dataset.size());
  for (const auto& r : dataset) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const QARecord* a, const QARecord* b) { return a->id < b->id; });

  double bleu_sum = 0.0, rouge_sum = 0.0;
  std::size_t correct = 0;
  for (const QARecord* record : sorted) {
    std::string raw;
    const auto it = outputs.find(record->id);
    if (it == outputs.end()) {
      report.warnings.push_back("missing output for id " + record->id +
                                "; scored as empty");
    } else {
      raw = it->second;
    }
    const auto parsed = parse_bicot(raw);
    EvalItem item;
    item.id = record->id;
    item.correct = judge_accuracy(parsed.document, *record, cfg);
    const auto ref_fa = record->reference.segment_text(SegmentKind::FinalAnswer);
    const TokenizeMode mode = resolve_mode(ref_fa, cfg.tokenize_mode);
    const auto cand_fa =
        tokenize(parsed.document.segment_text(SegmentKind::FinalAnswer), mode);
    const auto ref_tokens = tokenize(ref_fa, mode);
    item.bleu4 = bleu4(cand_fa, ref_tokens).score;
    item.rouge_l_f =
        parsed.document.has(SegmentKind::FinalAnswer)
            ? rouge_l(cand_fa, ref_tokens).f
            : 0.0;
    if (item.correct) ++correct;
    bleu_sum += item.bleu4;
    rouge_sum += item.rouge_l_f;
    report.items.push_back(std::move(item));
  }
  report.item_count = report.items.size();
  if (report.item_count > 0) {
    const double n = double(report.item_count);
    report.accuracy = 100.0 * double(correct) / n;
    report.mean_bleu4 = 100.0 * bleu_sum / n;
    report.mean_rouge_l = 100.0 * rouge_sum / n;
  }
  return report;
}

std::string render_report(const EvalReport& report, ReportFormat format,
                          const std::string& method_label) {
  switch (format) {
    case ReportFormat::Markdown: {
      std::string out = "| Methods | Accuracy | BLEU-4 | Rouge-L |\n";
      out += "| --- | --- | --- | --- |\n";
      out += "| " + method_label + " | " + fmt2(report.accuracy) + " | " +
             fmt2(report.mean_bleu4) + " | " + fmt2(report.mean_rouge_l) +
             " |\n";
      return out;
    }
    case ReportFormat::Csv: {
      std::string out = "id,correct,bleu4,rouge_l\n";
      for (const auto& item : report.items) {
        out += item.id;
        out += item.correct ? ",1," : ",0,";
        out += fmt_full(item.bleu4);
        out += ",";
        out += fmt_full(item.rouge_l_f);
        out += "\n";
      }
      out += "aggregate,accuracy=" + fmt2(report.accuracy) +
             ",bleu4=" + fmt2(report.mean_bleu4) +
             ",rouge_l=" + fmt2(report.mean_rouge_l) + "\n";
      return out;
    }
    case ReportFormat::Json: {
      nlohmann::json j;
      j["accuracy"] = report.accuracy;
      j["mean_bleu4"] = report.mean_bleu4;
      j["mean_rouge_l"] = report.mean_rouge_l;
      j["dataset_path"] = report.dataset_path;
      j["config_hash"] = report.config_hash;
      j["item_count"] = report.item_count;
      j["warnings"] = report.warnings;
      j["items"] = nlohmann::json::array();
      for (const auto& item : report.items) {
        j["items"].push_back({{"id", item.id},
                              {"correct", item.correct},
                              {"bleu4", item.bleu4},
                              {"rouge_l", item.rouge_l_f}});
      }
      return j.dump(2) + "\n";
    }
  }
  throw ValidationError("unknown report format");
}

std::string render_comparison(
    const std::vector<std::pair<std::string, EvalReport>>& reports) {
  std::string out = "| Methods | Accuracy | BLEU-4 | Rouge-L |\n";
  out += "| --- | --- | --- | --- |\n";
  for (const auto& [label, report] : reports) {
    out += "| " + label + " | " + fmt2(report.accuracy) + " | " +
           fmt2(report.mean_bleu4) + " | " + fmt2(report.mean_rouge_l) +
           " |\n";
  }
  return out;
}

EvalReport report_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad report JSON: ") + e.what());
  }
  EvalReport report;
  report.accuracy = j.at("accuracy").get<double>();
  report.mean_bleu4 = j.at("mean_bleu4").get<double>();
  report.mean_rouge_l = j.at("mean_rouge_l").get<double>();
  report.dataset_path = j.at("dataset_path").get<std::string>();
  report.config_hash = j.at("config_hash").get<std::string>();
  report.item_count = j.at("item_count").get<std::size_t>();
  report.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& item : j.at("items")) {
    report.items.push_back({item.at("id").get<std::string>(),
                            item.at("correct").get<bool>(),
                            item.at("bleu4").get<double>(),
                            item.at("rouge_l").get<double>()});
  }
  return report;
}

}  // namespace bicot
