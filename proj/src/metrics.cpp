#include "handoff/metrics.hpp"

#include <algorithm>
#include <set>

#include "handoff/geometry.hpp"

namespace handoff {

PageMetrics layout_prf(const ParserInterface& iface, const GroundTruthPage& gt,
                       double iou_threshold) {
    PageMetrics m;
    m.page_id = iface.page_id;

    struct Candidate {
        double iou;
        int pred_idx;
        int gt_idx;
    };
    std::vector<Candidate> candidates;
    for (size_t p = 0; p < iface.instances.size(); ++p) {
        for (size_t g = 0; g < gt.elements.size(); ++g) {
            if (iface.instances[p].class_id != gt.elements[g].class_id) continue;
            const double ov = iou(iface.instances[p].box, gt.elements[g].box);
            if (ov >= iou_threshold) candidates.push_back({ov, static_cast<int>(p), static_cast<int>(g)});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.pred_idx != b.pred_idx) return a.pred_idx < b.pred_idx;
        return a.gt_idx < b.gt_idx;
    });
    std::set<int> used_pred, used_gt;
    for (const Candidate& c : candidates) {
        if (used_pred.count(c.pred_idx) || used_gt.count(c.gt_idx)) continue;
        used_pred.insert(c.pred_idx);
        used_gt.insert(c.gt_idx);
        m.matched_pairs.push_back(
            {iface.instances[c.pred_idx].hypothesis_id, gt.elements[c.gt_idx].id, c.iou});
    }

    const double n_pred = static_cast<double>(iface.instances.size());
    const double n_gt = static_cast<double>(gt.elements.size());
    const double n_match = static_cast<double>(m.matched_pairs.size());
    m.precision = n_pred > 0 ? n_match / n_pred : 0.0;
    m.recall = n_gt > 0 ? n_match / n_gt : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;

    for (size_t p = 0; p < iface.instances.size(); ++p) {
        ClassCounts& cc = m.per_class[iface.instances[p].class_id];
        cc.predictions += 1;
        if (used_pred.count(static_cast<int>(p))) cc.matches += 1;
    }
    for (const GroundTruthElement& e : gt.elements) m.per_class[e.class_id].ground_truth += 1;
    return m;
}

int edit_distance(const std::vector<int>& a, const std::vector<int>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double reading_order_edit(const ParserInterface& iface, const GroundTruthPage& gt,
                          const std::vector<MatchedPair>& matched_pairs) {
    if (matched_pairs.size() < 2) return 0.0;

    std::map<int, int> pred_to_gt;
    for (const MatchedPair& p : matched_pairs) pred_to_gt[p.pred_id] = p.gt_id;
    std::map<int, int> gt_rank;
    for (const GroundTruthElement& e : gt.elements) gt_rank[e.id] = e.order_rank;

    // Predicted sequence: matched gt ids in interface order.
    std::vector<int> predicted;
    for (const Instance& inst : iface.instances) {
        auto it = pred_to_gt.find(inst.hypothesis_id);
        if (it != pred_to_gt.end()) predicted.push_back(it->second);
    }
    std::vector<int> reference = predicted;
    std::sort(reference.begin(), reference.end(),
              [&](int a, int b) { return gt_rank.at(a) < gt_rank.at(b); });

    const size_t len = std::max(predicted.size(), reference.size());
    if (len == 0) return 0.0;
    return static_cast<double>(edit_distance(predicted, reference)) / static_cast<double>(len);
}

PageMetrics evaluate_page(const ParserInterface& iface, const GroundTruthPage& gt,
                          double iou_threshold) {
    PageMetrics m = layout_prf(iface, gt, iou_threshold);
    m.reading_order_edit = reading_order_edit(iface, gt, m.matched_pairs);
    return m;
}

Summary aggregate(const std::vector<PageMetrics>& pages) {
    if (pages.empty()) throw ValidationError("aggregate requires at least one page");
    Summary s;
    s.pages = static_cast<int>(pages.size());
    std::map<int, ClassCounts> pooled;
    for (const PageMetrics& m : pages) {
        s.precision += m.precision;
        s.recall += m.recall;
        s.f1 += m.f1;
        s.reading_order_edit += m.reading_order_edit;
        for (const auto& [cls, cc] : m.per_class) {
            pooled[cls].matches += cc.matches;
            pooled[cls].predictions += cc.predictions;
            pooled[cls].ground_truth += cc.ground_truth;
        }
    }
    const double n = static_cast<double>(s.pages);
    s.precision /= n;
    s.recall /= n;
    s.f1 /= n;
    s.reading_order_edit /= n;
    for (const auto& [cls, cc] : pooled) {
        ClassF1 c;
        c.precision = cc.predictions > 0 ? static_cast<double>(cc.matches) / cc.predictions : 0.0;
        c.recall = cc.ground_truth > 0 ? static_cast<double>(cc.matches) / cc.ground_truth : 0.0;
        c.f1 = (c.precision + c.recall) > 0.0
                   ? 2.0 * c.precision * c.recall / (c.precision + c.recall)
                   : 0.0;
        s.per_class[cls] = c;
    }
    return s;
}

}  // namespace handoff
