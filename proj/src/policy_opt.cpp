#include "bicot/policy_opt.hpp"

#include <algorithm>
#include <cmath>

#include "bicot/errors.hpp"

namespace bicot {

AdvantageSet normalize_advantages(std::span<const double> rewards,
                                  double eps) {
  if (rewards.empty())
    throw ValidationError("cannot normalize an empty reward group");
  AdvantageSet out;
  out.rewards.assign(rewards.begin(), rewards.end());
  const double n = double(rewards.size());
  double sum = 0.0;
  for (const double r : rewards) sum += r;
  out.mean = sum / n;
  double var = 0.0;
  for (const double r : rewards) var += (r - out.mean) * (r - out.mean);
  out.std_pop = std::sqrt(var / n);
  out.advantages.resize(rewards.size());
  if (out.std_pop < eps) {
    out.degenerate = true;
    std::fill(out.advantages.begin(), out.advantages.end(), 0.0);
  } else {
    for (std::size_t i = 0; i < rewards.size(); ++i)
      out.advantages[i] = (rewards[i] - out.mean) / out.std_pop;
  }
  return out;
}

double prob_ratio(double logp_new, double logp_old) {
  if (!std::isfinite(logp_new) || !std::isfinite(logp_old))
    throw ValidationError("non-finite log-probability");
  return std::exp(logp_new - logp_old);
}

double clipped_term(double ratio, double advantage, const ClipConfig& cfg) {
  if (!(ratio > 0.0))
    throw ValidationError("probability ratio must be positive");
  const double clipped =
      std::clamp(ratio, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_exact_categorical(std::span<const double> p,
                            std::span<const double> q) {
  if (p.size() != q.size())
    throw ValidationError("distribution size mismatch");
  double sp = 0.0, sq = 0.0;
  for (const double v : p) sp += v;
  for (const double v : q) sq += v;
  if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6)
    throw ValidationError("distributions must be normalized");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0)
      throw ValidationError("negative probability");
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw ValidationError("reference has zero support where policy > 0");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double kl_k3_sample(double logp_new, double logp_ref) {
  const double log_r = logp_ref - logp_new;
  return std::exp(log_r) - log_r - 1.0;
}

std::pair<double, GrpoDiagnostics> grpo_loss(std::span<const GroupSample> group,
                                             const AdvantageSet& advantages,
                                             const ClipConfig& clip,
                                             const KlConfig& kl) {
  if (group.empty()) throw ValidationError("empty sample group");
  if (group.size() != advantages.advantages.size())
    throw ValidationError("group/advantage size mismatch");
  GrpoDiagnostics diag;
  diag.ratios.reserve(group.size());
  diag.clipped.reserve(group.size());
  diag.kls.reserve(group.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double ratio = prob_ratio(group[i].logp_new, group[i].logp_old);
    const double adv = advantages.advantages[i];
    const double term = clipped_term(ratio, adv, clip);
    const double kl_i = kl_k3_sample(group[i].logp_new, group[i].logp_ref);
    diag.ratios.push_back(ratio);
    diag.clipped.push_back(term < ratio * adv);
    diag.kls.push_back(kl_i);
    sum += term - kl.beta * kl_i;
  }
  return {-sum / double(group.size()), std::move(diag)};
}

double dpo_loss(double logp_w_new, double logp_l_new, double logp_w_ref,
                double logp_l_ref, double beta) {
  for (const double v : {logp_w_new, logp_l_new, logp_w_ref, logp_l_ref}) {
    if (!std::isfinite(v))
      throw ValidationError("non-finite log-probability");
  }
  if (!(beta > 0.0)) throw ValidationError("dpo beta must be positive");
  const double margin =
      beta * ((logp_w_new - logp_w_ref) - (logp_l_new - logp_l_ref));
  // -log sigmoid(x) = log(1 + exp(-x)), computed stably.
  return margin >= 0.0 ? std::log1p(std::exp(-margin))
                       : -margin + std::log1p(std::exp(margin));
}

}  // namespace bicot
