#pragma once

#include <map>
#include <vector>

#include "handoff/core.hpp"
#include "handoff/matching.hpp"

namespace handoff {

inline constexpr double kProbEps = 1e-7;

/// Partial derivatives for one hypothesis; class_probs sized lazily.
struct HypGrad {
    std::array<double, 4> box{};
    std::vector<double> class_probs;
    double retention_prob = 0.0;
    double order_score = 0.0;
};

using PoolGrad = std::map<int, HypGrad>;  // keyed by hypothesis id

struct TermValue {
    double value = 0.0;
    PoolGrad grad;
};

struct LossReport {
    double l_cls = 0.0, l_l1 = 0.0, l_giou = 0.0;  // unweighted terms
    double l_det = 0.0;                            // lambda-weighted sum of the three
    double l_ret = 0.0, l_ord = 0.0;
    double l_total = 0.0;  // l_det + lambda_ret*l_ret + lambda_ord*l_ord
    PoolGrad grad;         // d l_total / d inputs
};

/// Binary cross-entropy with probability clamped to [eps, 1-eps].
double bce(double p, double target);

/// Mean over N hypotheses of summed per-class BCE against a one-hot target
/// at the matched class (all-zeros when unmatched).
TermValue classification_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                              const Assignment& a);

/// Mean over matched pairs of summed absolute coordinate differences.
TermValue box_l1_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                      const Assignment& a);

/// Mean over matched pairs of (1 - GIoU).
TermValue box_giou_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                        const Assignment& a);

/// Mean BCE of retention probabilities against {0,1} targets.
TermValue retention_loss(const std::vector<double>& retention_probs,
                         const std::vector<int>& targets);

/// sigma(o_j - o_i): probability that i precedes j (smaller score = earlier).
double precedence_prob(double o_i, double o_j);

/// 1 + gamma * ln(1 + n_mid) for a matched pair's ground-truth elements.
double difficulty_weight(const GroundTruthElement& i, const GroundTruthElement& j,
                         const GroundTruthPage& gt, double gamma);

/// Pair weights for every ordered matched pair, keyed by hypothesis ids.
std::map<std::pair<int, int>, double> pair_weights(const Assignment& a,
                                                   const GroundTruthPage& gt, double gamma);

/// Weighted pairwise BCE over the valid foreground pairs; gradient per
/// ordering score.
TermValue ordering_loss(const std::map<int, double>& order_scores,
                        const std::map<std::pair<int, int>, int>& precedence_targets,
                        const std::map<std::pair<int, int>, double>& weights);

LossReport detection_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                          const Assignment& a, const HandoffConfig& cfg);

/// All loss families under a fixed assignment.
LossReport total_loss_with_assignment(const HypothesisPool& pool, const GroundTruthPage& gt,
                                      const Assignment& a, const HandoffConfig& cfg);

/// Full objective: matching, target derivation, all loss families.
LossReport total_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                      const HandoffConfig& cfg);

/// Central finite-difference check of every analytic gradient entry under
/// a fixed assignment; returns the max relative error. Entries adjacent to
/// L1 kinks or probability clamps are skipped.
double max_gradient_rel_error(const HypothesisPool& pool, const GroundTruthPage& gt,
                              const HandoffConfig& cfg, double h = 1e-5);

/// LossReport as JSON, gradients keyed "(hyp_id, field)".
std::string loss_report_json(const LossReport& report, bool include_grads = true);

}  // namespace handoff
