#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "handoff/core.hpp"

namespace handoff {

struct MatchedPair {
    int pred_id = 0;
    int gt_id = 0;
    double iou = 0.0;
};

struct ClassCounts {
    int matches = 0;
    int predictions = 0;
    int ground_truth = 0;
};

struct PageMetrics {
    std::string page_id;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double reading_order_edit = 0.0;
    std::vector<MatchedPair> matched_pairs;
    std::map<int, ClassCounts> per_class;
};

struct ClassF1 {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct Summary {
    int pages = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;  // per-page means
    double reading_order_edit = 0.0;
    std::map<int, ClassF1> per_class;  // from pooled matches
};

/// Greedy same-class matching in descending IoU order at the threshold;
/// fills precision/recall/F1 and the matched pair list.
PageMetrics layout_prf(const ParserInterface& iface, const GroundTruthPage& gt,
                       double iou_threshold = 0.5);

/// Normalized Levenshtein distance between the matched predicted sequence
/// and the same ids sorted by ground-truth rank.
double reading_order_edit(const ParserInterface& iface, const GroundTruthPage& gt,
                          const std::vector<MatchedPair>& matched_pairs);

/// layout_prf + reading_order_edit in one call.
PageMetrics evaluate_page(const ParserInterface& iface, const GroundTruthPage& gt,
                          double iou_threshold = 0.5);

Summary aggregate(const std::vector<PageMetrics>& pages);

/// Levenshtein distance over integer sequences.
int edit_distance(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace handoff
