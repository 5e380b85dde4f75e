#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bicot/config.hpp"
#include "bicot/errors.hpp"
#include "bicot/eval.hpp"
#include "bicot/jsonl.hpp"
#include "bicot/pipeline.hpp"
#include "bicot/reward.hpp"
#include "bicot/toy_lab.hpp"

namespace {

using namespace bicot;

KeyValueMap load_config_if_given(const std::string& path) {
  return path.empty() ? KeyValueMap{} : load_key_value_file(path);
}

void reject_unknown_keys(const KeyValueMap& kv,
                         const std::set<std::string>& consumed) {
  for (const auto& [key, value] : kv) {
    (void)value;
    if (!consumed.count(key))
      throw ValidationError("unknown config key: " + key);
  }
}

QARecord load_single_record(const std::string& path) {
  const auto records = load_dataset(path);
  if (records.empty()) throw ValidationError(path + ": no record found");
  return records.front();
}

int cmd_score(const std::string& completion_path, const std::string& record_path,
              const std::string& config_path) {
  RewardConfig cfg;
  const auto kv = load_config_if_given(config_path);
  std::set<std::string> consumed;
  apply_config(kv, cfg, consumed);
  reject_unknown_keys(kv, consumed);
  std::cerr << "config_hash: " << config_hash(cfg) << "\n";

  const std::string completion = read_file(completion_path);
  const QARecord record = load_single_record(record_path);
  const auto breakdown = score_completion(completion, record, cfg);
  std::cout << breakdown_to_json(breakdown).dump(2) << "\n";
  return 0;
}

int cmd_score_group(const std::string& completions_path,
                    const std::string& record_path,
                    const std::string& config_path) {
  RewardConfig cfg;
  const auto kv = load_config_if_given(config_path);
  std::set<std::string> consumed;
  apply_config(kv, cfg, consumed);
  reject_unknown_keys(kv, consumed);
  std::cerr << "config_hash: " << config_hash(cfg) << "\n";

  std::vector<std::string> texts;
  for (const auto& j : read_jsonl(completions_path)) {
    if (j.is_string())
      texts.push_back(j.get<std::string>());
    else if (j.is_object() && j.contains("text"))
      texts.push_back(j.at("text").get<std::string>());
    else
      throw ValidationError(completions_path +
                            ": each line must be a JSON string or {\"text\"}");
  }
  const QARecord record = load_single_record(record_path);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& b : score_group(texts, record, cfg))
    out.push_back(breakdown_to_json(b));
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_train_toy(const std::string& bank_path, const std::string& dataset_path,
                  int iters, std::uint64_t seed, bool cold_start,
                  const std::string& trace_path,
                  const std::string& config_path) {
  TrainConfig cfg;
  const auto kv = load_config_if_given(config_path);
  std::set<std::string> consumed;
  apply_config(kv, cfg, consumed);
  reject_unknown_keys(kv, consumed);
  cfg.iterations = iters;
  cfg.seed = seed;
  if (cold_start) cfg.cold_start = true;
  std::cerr << "config_hash: " << config_hash(cfg) << "\n";

  const auto bank = load_bank(bank_path);
  const auto dataset = load_dataset(dataset_path);
  const auto result = run_training(bank, dataset, cfg);

  if (!trace_path.empty())
    write_file(trace_path, trace_to_csv(result.trace));

  if (result.trace.rows.empty()) {
    std::cout << "iterations: 0 (policy untouched)\n";
  } else {
    const auto& last = result.trace.rows.back();
    char buf[128];
    std::snprintf(buf, sizeof(buf), "final mean reward: %.6f\n",
                  last.mean_reward);
    std::cout << buf;
  }
  for (const auto& [qid, best] : result.best_template) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: best template %zu, probability %.6f\n",
                  qid.c_str(), best, result.policy.probs(qid)[best]);
    std::cout << buf;
  }
  return 0;
}

int cmd_augment(const std::string& input_path, const std::string& output_path,
                const std::string& review_path, const std::string& fixtures_dir,
                bool live, int max_retries) {
  std::cerr << "config_hash: " << config_hash(RewardConfig{}) << "\n";
  std::unique_ptr<TeacherClient> client;
  if (live) {
    client = std::make_unique<HttpTeacherClient>(
        HttpTeacherClient::from_environment());
  } else {
    if (fixtures_dir.empty())
      throw ValidationError("either --fixtures DIR or --live is required");
    client = std::make_unique<FixtureTeacherClient>(fixtures_dir);
  }

  std::string records_out;
  std::string review_out;
  std::size_t accepted = 0, rejected = 0;
  for (const auto& j : read_jsonl(input_path)) {
    std::string id, question, answer;
    try {
      id = j.at("id").get<std::string>();
      question = j.at("question").get<std::string>();
      answer = j.at("answer").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(input_path + ": bad input row: " + e.what());
    }
    const auto outcome =
        augment_record(id, question, answer, *client, max_retries);
    if (outcome.accepted()) {
      ++accepted;
      records_out += record_to_json(*outcome.record).dump() + "\n";
    } else {
      ++rejected;
      std::cerr << "rejected " << id << ":";
      for (const auto& d : outcome.defects) std::cerr << " [" << d << "]";
      std::cerr << "\n";
    }
    nlohmann::json review{{"id", id},
                          {"accepted", outcome.accepted()},
                          {"attempts", outcome.attempts},
                          {"keyword_candidates", outcome.keyword_candidates},
                          {"needs_review", outcome.needs_review},
                          {"defects", outcome.defects}};
    review_out += review.dump() + "\n";
  }
  write_file(output_path, records_out);
  if (!review_path.empty()) write_file(review_path, review_out);
  std::cout << "accepted: " << accepted << "\nrejected: " << rejected << "\n";
  return 0;
}

int cmd_validate(const std::string& dataset_path) {
  std::cerr << "config_hash: " << config_hash(RewardConfig{}) << "\n";
  const auto report = validate_dataset(dataset_path);
  std::cout << "records: " << report.record_count << "\n";
  for (const auto& v : report.violations) std::cout << v << "\n";
  std::cout << "violations: " << report.violations.size() << "\n";
  return report.ok() ? 0 : 2;
}

int cmd_evaluate(const std::string& outputs_path,
                 const std::string& dataset_path, const std::string& format,
                 const std::string& out_path, const std::string& config_path) {
  EvalConfig cfg;
  const auto kv = load_config_if_given(config_path);
  std::set<std::string> consumed;
  apply_config(kv, cfg, consumed);
  reject_unknown_keys(kv, consumed);
  if (format == "markdown")
    cfg.report_format = ReportFormat::Markdown;
  else if (format == "csv")
    cfg.report_format = ReportFormat::Csv;
  else if (format == "json")
    cfg.report_format = ReportFormat::Json;
  else if (!format.empty())
    throw ValidationError("unknown format: " + format);
  std::cerr << "config_hash: " << config_hash(cfg) << "\n";

  const auto outputs = load_outputs(outputs_path);
  auto dataset = load_dataset(dataset_path);
  auto report = evaluate(outputs, dataset, cfg);
  report.dataset_path = dataset_path;
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

  // The markdown table always lands on stdout; csv/json go beside it.
  std::cout << render_report(report, ReportFormat::Markdown, "evaluated");
  if (cfg.report_format != ReportFormat::Markdown) {
    const std::string rendered = render_report(report, cfg.report_format);
    if (!out_path.empty())
      write_file(out_path, rendered);
    else
      std::cout << rendered;
  } else if (!out_path.empty()) {
    write_file(out_path, render_report(report, ReportFormat::Markdown));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bi-CoT reward scoring, group-relative policy optimization toy lab, "
      "data augmentation, and evaluation"};
  app.require_subcommand(1);

  std::string completion_path, completions_path, record_path, config_path;
  auto* score = app.add_subcommand("score", "Score one completion");
  score->add_option("--completion", completion_path, "Completion text file")
      ->required();
  score->add_option("--record", record_path, "QARecord JSONL file")
      ->required();
  score->add_option("--config", config_path, "Key-value config file");

  std::string g_record_path, g_config_path;
  auto* score_group_cmd =
      app.add_subcommand("score-group", "Score a group of completions");
  score_group_cmd
      ->add_option("--completions", completions_path,
                   "JSONL file, one completion string per line")
      ->required();
  score_group_cmd->add_option("--record", g_record_path, "QARecord JSONL file")
      ->required();
  score_group_cmd->add_option("--config", g_config_path,
                              "Key-value config file");

  std::string bank_path, dataset_path, trace_path, t_config_path;
  int iters = 0;
  std::uint64_t seed = 0;
  bool cold_start = false;
  auto* train = app.add_subcommand("train-toy",
                                   "Train the categorical toy policy");
  train->add_option("--bank", bank_path, "Template bank JSONL")->required();
  train->add_option("--dataset", dataset_path, "QARecord JSONL")->required();
  train->add_option("--iters", iters, "Training iterations")->required();
  train->add_option("--seed", seed, "RNG seed")->default_val(0);
  train->add_flag("--cold-start", cold_start,
                  "Bias initial logits toward well-formatted templates");
  train->add_option("--trace", trace_path, "Write CSV trace here");
  train->add_option("--config", t_config_path, "Key-value config file");

  std::string in_path, out_path, review_path, fixtures_dir;
  bool live = false;
  int max_retries = 2;
  auto* augment = app.add_subcommand(
      "augment", "Build Bi-CoT records from {id, question, answer} rows");
  augment->add_option("--input", in_path, "Input JSONL")->required();
  augment->add_option("--output", out_path, "Output QARecord JSONL")
      ->required();
  augment->add_option("--review", review_path,
                      "Sidecar JSONL of keyword candidates per id");
  augment->add_option("--fixtures", fixtures_dir,
                      "Replay recorded teacher responses from this directory");
  augment->add_flag(
      "--live", live,
      "Call the live teacher (BICOT_TEACHER_ENDPOINT / BICOT_TEACHER_TOKEN)");
  augment->add_option("--max-retries", max_retries,
                      "Per-stage retry budget");

  std::string v_dataset_path;
  auto* validate = app.add_subcommand("validate", "Validate a dataset file");
  validate->add_option("--dataset", v_dataset_path, "QARecord JSONL")
      ->required();

  std::string e_outputs, e_dataset, e_format, e_out, e_config;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Score outputs against a dataset");
  evaluate_cmd->add_option("--outputs", e_outputs, "JSONL of {id, output}")
      ->required();
  evaluate_cmd->add_option("--dataset", e_dataset, "QARecord JSONL")
      ->required();
  evaluate_cmd->add_option("--format", e_format, "markdown|csv|json");
  evaluate_cmd->add_option("--out", e_out, "Write the report here");
  evaluate_cmd->add_option("--config", e_config, "Key-value config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (score->parsed())
      return cmd_score(completion_path, record_path, config_path);
    if (score_group_cmd->parsed())
      return cmd_score_group(completions_path, g_record_path, g_config_path);
    if (train->parsed())
      return cmd_train_toy(bank_path, dataset_path, iters, seed, cold_start,
                           trace_path, t_config_path);
    if (augment->parsed())
      return cmd_augment(in_path, out_path, review_path, fixtures_dir, live,
                         max_retries);
    if (validate->parsed()) return cmd_validate(v_dataset_path);
    if (evaluate_cmd->parsed())
      return cmd_evaluate(e_outputs, e_dataset, e_format, e_out, e_config);
  } catch (const bicot::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const bicot::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
