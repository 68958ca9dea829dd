#include "handoff/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "handoff/batch.hpp"
#include "handoff/json_io.hpp"

namespace handoff {

namespace fs = std::filesystem;

std::map<int, double> row_major_external_order(const HypothesisPool& pool) {
    std::vector<const Hypothesis*> sorted;
    for (const Hypothesis& h : pool.hypotheses) sorted.push_back(&h);
    std::sort(sorted.begin(), sorted.end(), [](const Hypothesis* a, const Hypothesis* b) {
        if (a->box.y1 != b->box.y1) return a->box.y1 < b->box.y1;
        if (a->box.x1 != b->box.x1) return a->box.x1 < b->box.x1;
        return a->id < b->id;
    });
    std::map<int, double> order;
    for (size_t i = 0; i < sorted.size(); ++i) order[sorted[i]->id] = static_cast<double>(i);
    return order;
}

CompareReport compare_corpus(const std::vector<CorpusPage>& pages,
                             const std::vector<Strategy>& strategies, const HandoffConfig& cfg,
                             double iou_threshold, int jobs) {
    CompareReport report;
    report.iou_threshold = iou_threshold;
    const int n = static_cast<int>(pages.size());
    if (n == 0) throw ValidationError("compare requires a non-empty corpus");

    for (Strategy s : strategies) {
        HandoffConfig scfg = cfg;
        scfg.strategy = s;
        StrategyResult result;
        result.strategy = strategy_name(s);
        result.pages = batch::map_pages<PageMetrics>(
            n,
            [&](int i) {
                const CorpusPage& page = pages[i];
                std::map<int, double> ext;
                const std::map<int, double>* ext_ptr = nullptr;
                if (s == Strategy::decoupled_order_after_nms) {
                    ext = row_major_external_order(page.pool);
                    ext_ptr = &ext;
                }
                const HandoffResult r = run_strategy(page.pool, scfg, ext_ptr);
                PageMetrics m = evaluate_page(r.iface, page.gt, iou_threshold);
                m.page_id = page.stem;
                return m;
            },
            jobs);
        result.summary = aggregate(result.pages);
        report.strategies.push_back(std::move(result));
    }

    if (std::all_of(pages.begin(), pages.end(), [](const CorpusPage& p) { return p.oracle.has_value(); })) {
        StrategyResult result;
        result.strategy = "oracle";
        result.pages = batch::map_pages<PageMetrics>(
            n,
            [&](int i) {
                PageMetrics m = evaluate_page(*pages[i].oracle, pages[i].gt, iou_threshold);
                m.page_id = pages[i].stem;
                return m;
            },
            jobs);
        result.summary = aggregate(result.pages);
        report.oracle = std::move(result);
    }
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void append_summary(std::string& out, const Summary& s) {
    out += "{\"pages\":" + std::to_string(s.pages);
    out += ",\"precision\":" + fmt(s.precision);
    out += ",\"recall\":" + fmt(s.recall);
    out += ",\"f1\":" + fmt(s.f1);
    out += ",\"reading_order_edit\":" + fmt(s.reading_order_edit);
    out += ",\"per_class\":{";
    bool first = true;
    for (const auto& [cls, c] : s.per_class) {
        if (!first) out += ',';
        first = false;
        out += "\"" + std::to_string(cls) + "\":{\"precision\":" + fmt(c.precision) +
               ",\"recall\":" + fmt(c.recall) + ",\"f1\":" + fmt(c.f1) + "}";
    }
    out += "}}";
}

void append_strategy(std::string& out, const StrategyResult& r, const StrategyResult* oracle) {
    out += "{\"strategy\":\"" + r.strategy + "\",\"summary\":";
    append_summary(out, r.summary);
    if (oracle) {
        out += ",\"delta_vs_oracle\":{\"f1\":" + fmt(r.summary.f1 - oracle->summary.f1);
        out += ",\"reading_order_edit\":" +
               fmt(r.summary.reading_order_edit - oracle->summary.reading_order_edit) + "}";
    }
    out += ",\"pages\":[";
    for (size_t i = 0; i < r.pages.size(); ++i) {
        const PageMetrics& m = r.pages[i];
        if (i) out += ',';
        out += "{\"page_id\":\"" + m.page_id + "\",\"precision\":" + fmt(m.precision) +
               ",\"recall\":" + fmt(m.recall) + ",\"f1\":" + fmt(m.f1) +
               ",\"reading_order_edit\":" + fmt(m.reading_order_edit) + "}";
    }
    out += "]}";
}

}  // namespace

std::string compare_report_json(const CompareReport& report) {
    std::string out = "{\"report_version\":" + std::to_string(report.report_version);
    out += ",\"iou_threshold\":" + fmt(report.iou_threshold);
    out += ",\"strategies\":[";
    const StrategyResult* oracle = report.oracle ? &*report.oracle : nullptr;
    for (size_t i = 0; i < report.strategies.size(); ++i) {
        if (i) out += ',';
        append_strategy(out, report.strategies[i], oracle);
    }
    out += "]";
    if (oracle) {
        out += ",\"oracle\":";
        append_strategy(out, *oracle, nullptr);
    }
    out += "}";
    return out;
}

std::string compare_report_table(const CompareReport& report) {
    // P/R/F1 scaled by 100, edit raw; fixed-width columns.
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %8s %8s %8s %12s\n", "strategy", "P", "R", "F1",
                  "order_edit");
    out += line;
    out += std::string(52, '-') + "\n";
    auto row = [&](const StrategyResult& r) {
        std::snprintf(line, sizeof(line), "%-12s %8.2f %8.2f %8.2f %12.4f\n", r.strategy.c_str(),
                      100.0 * r.summary.precision, 100.0 * r.summary.recall, 100.0 * r.summary.f1,
                      r.summary.reading_order_edit);
        out += line;
    };
    for (const StrategyResult& r : report.strategies) row(r);
    if (report.oracle) row(*report.oracle);
    return out;
}

std::vector<CorpusPage> load_corpus(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    std::set<std::string> stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = ".pool.json";
        if (name.size() > suffix.size() && name.ends_with(suffix))
            stems.insert(name.substr(0, name.size() - suffix.size()));
    }
    std::vector<CorpusPage> pages;
    for (const std::string& stem : stems) {
        const fs::path base = fs::path(dir) / stem;
        const std::string gt_path = base.string() + ".gt.json";
        if (!fs::exists(gt_path)) throw IoError("missing ground truth for " + stem);
        CorpusPage page;
        page.stem = stem;
        page.pool = parse_pool(read_file(base.string() + ".pool.json")).pool;
        page.gt = parse_ground_truth(read_file(gt_path));
        const std::string oracle_path = base.string() + ".oracle.json";
        if (fs::exists(oracle_path)) page.oracle = parse_interface(read_file(oracle_path));
        pages.push_back(std::move(page));
    }
    if (pages.empty()) throw IoError("no *.pool.json files in " + dir);
    return pages;
}

}  // namespace handoff
