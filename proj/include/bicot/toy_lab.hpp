#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bicot/cot_document.hpp"
#include "bicot/policy_opt.hpp"
#include "bicot/reward.hpp"

namespace bicot {

// Per question: K candidate completion texts of varying quality; the
// categorical policy picks among them.
struct TemplateBank {
  std::map<std::string, std::vector<std::string>> templates;
};

struct ToyPolicy {
  std::map<std::string, std::vector<double>> logits;

  std::vector<double> probs(const std::string& question_id) const;
  double logp(const std::string& question_id, std::size_t index) const;
};

struct TrainConfig {
  int group_size = 8;
  double learning_rate = 0.1;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool cold_start = false;
  ClipConfig clip;
  KlConfig kl;
  RewardConfig reward;
};

struct Draw {
  std::size_t index = 0;
  double logp = 0.0;  // under the sampling-time policy (becomes logp_old)
};

// G independent categorical draws via inverse CDF on a seeded generator so
// traces are bit-identical across runs. Throws ValidationError on an
// unknown question.
std::vector<Draw> sample_group(const ToyPolicy& policy,
                               const std::string& question_id, int group_size,
                               std::mt19937_64& rng);

struct StepDiagnostics {
  double loss = 0.0;
  double kl = 0.0;  // exact categorical KL to the reference
  std::vector<double> gradient;
  AdvantageSet advantages;
};

// One gradient-descent step on the clipped, KL-penalized group objective.
// The analytic gradient treats the clip min piecewise (min-branch active).
StepDiagnostics policy_step(ToyPolicy& policy, const ToyPolicy& reference,
                            const std::string& question_id,
                            std::span<const Draw> samples,
                            std::span<const double> rewards,
                            const TrainConfig& cfg);

// Scalar loss for a fixed sample set as a function of the current logits;
// shared by policy_step and the finite-difference check.
double toy_loss(std::span<const double> logits,
                std::span<const double> ref_probs,
                std::span<const Draw> samples, const AdvantageSet& advantages,
                const ClipConfig& clip, double beta);

// Central-difference verification of the analytic gradient. Coordinates
// whose perturbation changes any sample's active clip branch are skipped.
double finite_diff_check(const ToyPolicy& policy, const ToyPolicy& reference,
                         const std::string& question_id,
                         std::span<const Draw> samples,
                         std::span<const double> rewards,
                         const TrainConfig& cfg, double h = 1e-5);

struct TrainTraceRow {
  int iteration = 0;
  double mean_reward = 0.0;  // expected reward under the post-step policy
  double mean_best_prob = 0.0;
  double mean_kl = 0.0;
  double loss = 0.0;
};

struct TrainTrace {
  std::vector<TrainTraceRow> rows;
};

struct TrainResult {
  TrainTrace trace;
  ToyPolicy policy;
  // argmax of score_completion totals per question (ties -> lowest index)
  std::map<std::string, std::size_t> best_template;
};

// sample -> score -> step across questions (sorted by id) per iteration.
// cold_start biases initial logits (+2) toward templates whose format
// reward is 1.0. The reference policy is frozen at initialization.
TrainResult run_training(const TemplateBank& bank,
                         const std::vector<QARecord>& dataset,
                         const TrainConfig& cfg);

std::string trace_to_csv(const TrainTrace& trace);

}  // namespace bicot
