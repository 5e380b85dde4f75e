#pragma once

#include <span>
#include <utility>
#include <vector>

namespace bicot {

struct AdvantageSet {
  std::vector<double> rewards;
  std::vector<double> advantages;
  double mean = 0.0;
  double std_pop = 0.0;
  bool degenerate = false;
};

// Group z-score with population std. Groups whose std falls below eps are
// degenerate and get all-zero advantages. Throws ValidationError on an
// empty group.
AdvantageSet normalize_advantages(std::span<const double> rewards,
                                  double eps = 1e-8);

// exp(logp_new - logp_old). Throws ValidationError on non-finite input.
double prob_ratio(double logp_new, double logp_old);

struct ClipConfig {
  double epsilon = 0.2;
};

// min(ratio * adv, clip(ratio, 1-eps, 1+eps) * adv). Throws ValidationError
// when ratio <= 0.
double clipped_term(double ratio, double advantage, const ClipConfig& cfg);

enum class KlEstimator { ExactCategorical, K3Sample };

struct KlConfig {
  double beta = 0.04;
  KlEstimator estimator = KlEstimator::K3Sample;
};

// Sum p[i] * log(p[i]/q[i]). Throws ValidationError when either vector is
// not a normalized distribution or q lacks support where p is positive.
double kl_exact_categorical(std::span<const double> p,
                            std::span<const double> q);

// r - log r - 1 with r = pi_ref/pi_theta at the sampled completion.
double kl_k3_sample(double logp_new, double logp_ref);

struct GroupSample {
  double logp_new = 0.0;
  double logp_old = 0.0;
  double logp_ref = 0.0;
  double reward = 0.0;
};

struct GrpoDiagnostics {
  std::vector<double> ratios;
  std::vector<bool> clipped;
  std::vector<double> kls;
};

// -(1/M) sum_i [clipped_term(ratio_i, adv_i) - beta * KL_i]. The per-sample
// KL uses the k3 estimator; exact KL needs full distributions and lives in
// the toy lab. Throws ValidationError on a size mismatch.
std::pair<double, GrpoDiagnostics> grpo_loss(std::span<const GroupSample> group,
                                             const AdvantageSet& advantages,
                                             const ClipConfig& clip,
                                             const KlConfig& kl);

// -log sigmoid(beta * ((logp_w_new - logp_w_ref) - (logp_l_new - logp_l_ref)))
double dpo_loss(double logp_w_new, double logp_l_new, double logp_w_ref,
                double logp_l_ref, double beta);

}  // namespace bicot
