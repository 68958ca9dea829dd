#pragma once

#include <map>
#include <utility>
#include <vector>

#include "handoff/core.hpp"

namespace handoff {

struct Assignment {
    std::vector<std::pair<int, int>> pairs;  // (hypothesis_id, gt_id)
    std::vector<int> unmatched_hypotheses;
    std::vector<int> unmatched_gt;
    double total_cost = 0.0;
};

struct Targets {
    std::vector<int> retention;  // t_i, indexed like pool.hypotheses
    // y_ij over ordered pairs of matched hypothesis ids; y=1 iff i earlier.
    std::map<std::pair<int, int>, int> precedence;
};

double match_cost(const Hypothesis& h, const GroundTruthElement& g, const HandoffConfig& cfg);

/// Minimum-cost one-to-one assignment over a rectangular cost matrix
/// (rows = hypotheses, cols = ground truth); exactly min(N,M) pairs.
Assignment hungarian(const std::vector<std::vector<double>>& cost);

Assignment match_pool(const HypothesisPool& pool, const GroundTruthPage& gt,
                      const HandoffConfig& cfg);

Targets derive_targets(const Assignment& a, const GroundTruthPage& gt,
                       const HypothesisPool& pool);

}  // namespace handoff
