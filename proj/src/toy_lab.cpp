#include "bicot/toy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bicot/errors.hpp"

namespace bicot {

namespace {

std::vector<double> softmax(std::span<const double> logits) {
  double max_logit = logits[0];
  for (const double z : logits) max_logit = std::max(max_logit, z);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - max_logit);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

// 53-bit uniform in [0, 1); keeps sampling independent of the standard
// library's distribution implementations.
double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

const std::vector<double>& logits_for(
    const std::map<std::string, std::vector<double>>& logits,
    const std::string& question_id) {
  const auto it = logits.find(question_id);
  if (it == logits.end())
    throw ValidationError("unknown question id: " + question_id);
  return it->second;
}

// 0 = ratio branch active (or tied), 1 = saturated clip branch.
std::vector<int> branch_pattern(std::span<const double> probs,
                                std::span<const Draw> samples,
                                const AdvantageSet& advantages,
                                const ClipConfig& clip) {
  std::vector<int> pattern(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double ratio =
        probs[samples[i].index] / std::exp(samples[i].logp);
    const double adv = advantages.advantages[i];
    const double clipped =
        std::clamp(ratio, 1.0 - clip.epsilon, 1.0 + clip.epsilon);
    pattern[i] = ratio * adv <= clipped * adv ? 0 : 1;
  }
  return pattern;
}

}  // namespace

std::vector<double> ToyPolicy::probs(const std::string& question_id) const {
  return softmax(logits_for(logits, question_id));
}

double ToyPolicy::logp(const std::string& question_id,
                       std::size_t index) const {
  const auto p = probs(question_id);
  if (index >= p.size()) throw ValidationError("template index out of range");
  return std::log(p[index]);
}

std::vector<Draw> sample_group(const ToyPolicy& policy,
                               const std::string& question_id, int group_size,
                               std::mt19937_64& rng) {
  const auto p = policy.probs(question_id);
  std::vector<Draw> draws;
  draws.reserve(std::size_t(group_size));
  for (int g = 0; g < group_size; ++g) {
    const double u = uniform01(rng);
    double acc = 0.0;
    std::size_t pick = p.size() - 1;
    for (std::size_t k = 0; k < p.size(); ++k) {
      acc += p[k];
      if (u < acc) {
        pick = k;
        break;
      }
    }
    draws.push_back({pick, std::log(p[pick])});
  }
  return draws;
}

double toy_loss(std::span<const double> logits,
                std::span<const double> ref_probs,
                std::span<const Draw> samples, const AdvantageSet& advantages,
                const ClipConfig& clip, double beta) {
  const auto p = softmax(logits);
  double surrogate = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double ratio = p[samples[i].index] / std::exp(samples[i].logp);
    surrogate += clipped_term(ratio, advantages.advantages[i], clip);
  }
  surrogate /= double(samples.size());
  const double kl = kl_exact_categorical(p, ref_probs);
  return -surrogate + beta * kl;
}

StepDiagnostics policy_step(ToyPolicy& policy, const ToyPolicy& reference,
                            const std::string& question_id,
                            std::span<const Draw> samples,
                            std::span<const double> rewards,
                            const TrainConfig& cfg) {
  if (samples.size() != rewards.size())
    throw ValidationError("samples/rewards size mismatch");
  const auto it = policy.logits.find(question_id);
  if (it == policy.logits.end())
    throw ValidationError("unknown question id: " + question_id);
  auto& logits = it->second;
  const auto p = softmax(logits);
  const auto q = reference.probs(question_id);
  if (q.size() != p.size())
    throw ValidationError("reference policy size mismatch");

  StepDiagnostics diag;
  diag.advantages = normalize_advantages(rewards);
  const double m = double(samples.size());

  const double kl = kl_exact_categorical(p, q);
  diag.kl = kl;
  diag.loss = toy_loss(logits, q, samples, diag.advantages, cfg.clip,
                       cfg.kl.beta);

  diag.gradient.assign(logits.size(), 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t a = samples[i].index;
    const double adv = diag.advantages.advantages[i];
    const double ratio = p[a] / std::exp(samples[i].logp);
    const double clipped =
        std::clamp(ratio, 1.0 - cfg.clip.epsilon, 1.0 + cfg.clip.epsilon);
    if (ratio * adv > clipped * adv) continue;  // saturated, zero gradient
    for (std::size_t k = 0; k < logits.size(); ++k) {
      const double dprob = (k == a ? 1.0 : 0.0) - p[k];
      diag.gradient[k] -= adv * ratio * dprob / m;
    }
  }
  for (std::size_t k = 0; k < logits.size(); ++k) {
    diag.gradient[k] += cfg.kl.beta * p[k] * (std::log(p[k] / q[k]) - kl);
    logits[k] -= cfg.learning_rate * diag.gradient[k];
  }
  return diag;
}

double finite_diff_check(const ToyPolicy& policy, const ToyPolicy& reference,
                         const std::string& question_id,
                         std::span<const Draw> samples,
                         std::span<const double> rewards,
                         const TrainConfig& cfg, double h) {
  const auto& base_logits = logits_for(policy.logits, question_id);
  const auto q = reference.probs(question_id);
  const auto advantages = normalize_advantages(rewards);
  const auto base_probs = softmax(base_logits);
  const auto base_pattern =
      branch_pattern(base_probs, samples, advantages, cfg.clip);

  // Analytic gradient, recomputed here so the check stays independent of
  // policy_step's update bookkeeping.
  ToyPolicy scratch = policy;
  TrainConfig frozen = cfg;
  frozen.learning_rate = 0.0;
  const auto diag =
      policy_step(scratch, reference, question_id, samples, rewards, frozen);

  double max_rel_err = 0.0;
  for (std::size_t k = 0; k < base_logits.size(); ++k) {
    bool near_kink = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double ratio =
          base_probs[samples[i].index] / std::exp(samples[i].logp);
      if (std::abs(ratio - (1.0 - cfg.clip.epsilon)) < 10.0 * h ||
          std::abs(ratio - (1.0 + cfg.clip.epsilon)) < 10.0 * h)
        near_kink = true;
    }
    if (near_kink) continue;

    std::vector<double> z(base_logits);
    z[k] = base_logits[k] + h;
    const double plus = toy_loss(z, q, samples, advantages, cfg.clip,
                                 cfg.kl.beta);
    const auto pattern_plus =
        branch_pattern(softmax(z), samples, advantages, cfg.clip);
    z[k] = base_logits[k] - h;
    const double minus = toy_loss(z, q, samples, advantages, cfg.clip,
                                  cfg.kl.beta);
    const auto pattern_minus =
        branch_pattern(softmax(z), samples, advantages, cfg.clip);
    if (pattern_plus != base_pattern || pattern_minus != base_pattern)
      continue;  // perturbation crossed a clip kink

    const double numeric = (plus - minus) / (2.0 * h);
    const double analytic = diag.gradient[k];
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), 1e-3});
    max_rel_err = std::max(max_rel_err,
                           std::abs(analytic - numeric) / denom);
  }
  return max_rel_err;
}

TrainResult run_training(const TemplateBank& bank,
                         const std::vector<QARecord>& dataset,
                         const TrainConfig& cfg) {
  if (cfg.group_size < 2)
    throw ValidationError("group size must be at least 2");
  if (!(cfg.learning_rate > 0.0))
    throw ValidationError("learning rate must be positive");

  std::map<std::string, const QARecord*> records;
  for (const auto& r : dataset) records[r.id] = &r;
  std::size_t uniform_k = 0;
  for (const auto& [qid, templates] : bank.templates) {
    if (!records.count(qid))
      throw ValidationError("bank question " + qid + " not in dataset");
    if (templates.size() < 2)
      throw ValidationError("bank question " + qid + " needs >= 2 templates");
    if (uniform_k == 0) uniform_k = templates.size();
    if (templates.size() != uniform_k)
      throw ValidationError("bank template count is not uniform");
  }
  for (const auto& r : dataset) {
    if (!bank.templates.count(r.id))
      throw ValidationError("dataset question " + r.id +
                            " has no templates in the bank");
  }

  TrainResult result;
  // Deterministic per-template rewards, computed once.
  std::map<std::string, std::vector<double>> template_rewards;
  for (const auto& [qid, templates] : bank.templates) {
    std::vector<double> totals;
    totals.reserve(templates.size());
    for (const auto& t : templates)
      totals.push_back(
          score_completion(t, *records.at(qid), cfg.reward).total);
    const auto best =
        std::max_element(totals.begin(), totals.end()) - totals.begin();
    result.best_template[qid] = std::size_t(best);
    template_rewards[qid] = std::move(totals);
  }

  ToyPolicy policy;
  for (const auto& [qid, templates] : bank.templates) {
    std::vector<double> logits(templates.size(), 0.0);
    if (cfg.cold_start) {
      for (std::size_t k = 0; k < templates.size(); ++k) {
        const auto parsed = parse_bicot(templates[k]);
        if (format_reward(parsed.report, cfg.reward) == 1.0) logits[k] += 2.0;
      }
    }
    policy.logits[qid] = std::move(logits);
  }
  const ToyPolicy reference = policy;

  std::mt19937_64 rng(cfg.seed);
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    double kl_sum = 0.0;
    double loss_sum = 0.0;
    for (const auto& [qid, totals] : template_rewards) {
      const auto draws = sample_group(policy, qid, cfg.group_size, rng);
      std::vector<double> rewards;
      rewards.reserve(draws.size());
      for (const auto& d : draws) rewards.push_back(totals[d.index]);
      const auto diag =
          policy_step(policy, reference, qid, draws, rewards, cfg);
      kl_sum += diag.kl;
      loss_sum += diag.loss;
    }
    // Expected reward under the stepped policy; unlike a sampled mean this
    // is noise-free, so its trend reflects the optimization alone.
    double reward_sum = 0.0;
    double best_prob_sum = 0.0;
    for (const auto& [qid, totals] : template_rewards) {
      const auto p = policy.probs(qid);
      for (std::size_t k = 0; k < p.size(); ++k) reward_sum += p[k] * totals[k];
      best_prob_sum += p[result.best_template.at(qid)];
    }
    const double nq = double(template_rewards.size());
    result.trace.rows.push_back({iter, reward_sum / nq, best_prob_sum / nq,
                                 kl_sum / nq, loss_sum / nq});
  }
  result.policy = std::move(policy);
  return result;
}

std::string trace_to_csv(const TrainTrace& trace) {
  std::string out = "iteration,mean_reward,mean_best_prob,mean_kl,loss\n";
  char buf[192];
  for (const auto& row : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g\n",
                  row.iteration, row.mean_reward, row.mean_best_prob,
                  row.mean_kl, row.loss);
    out += buf;
  }
  return out;
}

}  // namespace bicot
