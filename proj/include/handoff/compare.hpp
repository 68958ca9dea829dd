#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "handoff/core.hpp"
#include "handoff/metrics.hpp"
#include "handoff/strategies.hpp"

namespace handoff {

struct CorpusPage {
    std::string stem;
    HypothesisPool pool;
    GroundTruthPage gt;
    std::optional<ParserInterface> oracle;
};

/// Rule-based reading order computed on the raw pool, before any
/// suppression: row-major (y1, x1, id) rank per hypothesis. Stands in for
/// an ordering model that never sees which instances survive.
std::map<int, double> row_major_external_order(const HypothesisPool& pool);

struct StrategyResult {
    std::string strategy;
    Summary summary;
    std::vector<PageMetrics> pages;
};

struct CompareReport {
    int report_version = 1;
    double iou_threshold = 0.5;
    std::vector<StrategyResult> strategies;
    std::optional<StrategyResult> oracle;
};

CompareReport compare_corpus(const std::vector<CorpusPage>& pages,
                             const std::vector<Strategy>& strategies, const HandoffConfig& cfg,
                             double iou_threshold = 0.5, int jobs = 0);

std::string compare_report_json(const CompareReport& report);
std::string compare_report_table(const CompareReport& report);

/// Loads `<stem>.pool.json` / `<stem>.gt.json` (+ optional
/// `<stem>.oracle.json`) pairs from a directory, sorted by stem.
std::vector<CorpusPage> load_corpus(const std::string& dir);

}  // namespace handoff
