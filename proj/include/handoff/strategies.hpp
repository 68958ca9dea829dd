#pragma once

#include <map>
#include <vector>

#include "handoff/core.hpp"

namespace handoff {

enum class SuppressionReason { kept, below_threshold, nms_suppressed, soft_nms_decayed };

struct RetentionDecision {
    int hypothesis_id = 0;
    double final_score = 0.0;
    bool retained = false;
    SuppressionReason reason = SuppressionReason::below_threshold;
};

struct HandoffResult {
    ParserInterface iface;
    std::vector<RetentionDecision> decisions;  // in pool order
};

/// s_i = retention_prob * max_c class_probs[c].
double final_score(const Hypothesis& h);

int argmax_class(const Hypothesis& h);

/// Learned NMS-free handoff: keep s_i >= tau, rank by ascending order
/// score with (y1, x1, id) tie-break.
HandoffResult handoff_learned(const HypothesisPool& pool, const HandoffConfig& cfg);

/// Per-class greedy hard NMS on s_i, survivors ranked by order score.
HandoffResult handoff_nms(const HypothesisPool& pool, const HandoffConfig& cfg);

/// Gaussian Soft-NMS: decay by exp(-iou^2/sigma), drop below the floor.
HandoffResult handoff_soft_nms(const HypothesisPool& pool, const HandoffConfig& cfg);

/// NMS retention, but survivors ranked by externally supplied scores that
/// never saw the suppression outcome.
HandoffResult handoff_decoupled(const HypothesisPool& pool, const HandoffConfig& cfg,
                                const std::map<int, double>& external_order);

/// Pass-through baseline: keep everything, rank by descending s_i.
HandoffResult handoff_raw(const HypothesisPool& pool, const HandoffConfig& cfg);

HandoffResult run_strategy(const HypothesisPool& pool, const HandoffConfig& cfg,
                           const std::map<int, double>* external_order = nullptr);

}  // namespace handoff
