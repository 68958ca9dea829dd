#include "handoff/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "handoff/geometry.hpp"

namespace handoff {

double final_score(const Hypothesis& h) {
    double max_prob = 0.0;
    for (double p : h.class_probs) max_prob = std::max(max_prob, p);
    return h.retention_prob * max_prob;
}

int argmax_class(const Hypothesis& h) {
    int best = 0;
    for (size_t c = 1; c < h.class_probs.size(); ++c)
        if (h.class_probs[c] > h.class_probs[best]) best = static_cast<int>(c);
    return best;
}

namespace {

Instance make_instance(const Hypothesis& h) {
    return {h.id, h.box, argmax_class(h), final_score(h)};
}

/// Ascending key; ties by (y1, x1, id).
bool order_key_less(const Hypothesis& a, double ka, const Hypothesis& b, double kb) {
    if (ka != kb) return ka < kb;
    if (a.box.y1 != b.box.y1) return a.box.y1 < b.box.y1;
    if (a.box.x1 != b.box.x1) return a.box.x1 < b.box.x1;
    return a.id < b.id;
}

HandoffResult assemble(const HypothesisPool& pool,
                       const std::vector<std::pair<const Hypothesis*, double>>& survivors_keyed,
                       std::map<int, SuppressionReason> reasons,
                       std::map<int, double> scores) {
    auto keyed = survivors_keyed;
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        return order_key_less(*a.first, a.second, *b.first, b.second);
    });
    HandoffResult out;
    out.iface.page_id = pool.page_id;
    for (const auto& [h, key] : keyed) out.iface.instances.push_back(make_instance(*h));
    for (const Hypothesis& h : pool.hypotheses) {
        const auto reason = reasons.count(h.id) ? reasons[h.id] : SuppressionReason::kept;
        out.decisions.push_back({h.id, scores.count(h.id) ? scores[h.id] : final_score(h),
                                 reason == SuppressionReason::kept, reason});
    }
    return out;
}

/// Hard NMS survivor ids in pool order.
std::vector<const Hypothesis*> nms_survivors(const HypothesisPool& pool, const HandoffConfig& cfg,
                                             std::map<int, SuppressionReason>& reasons) {
    std::vector<const Hypothesis*> by_score;
    for (const Hypothesis& h : pool.hypotheses) by_score.push_back(&h);
    std::sort(by_score.begin(), by_score.end(), [](const Hypothesis* a, const Hypothesis* b) {
        const double sa = final_score(*a), sb = final_score(*b);
        if (sa != sb) return sa > sb;
        return a->id < b->id;
    });
    std::vector<const Hypothesis*> kept;
    for (const Hypothesis* h : by_score) {
        bool suppressed = false;
        for (const Hypothesis* k : kept) {
            if (!cfg.class_agnostic_nms && argmax_class(*k) != argmax_class(*h)) continue;
            if (iou(h->box, k->box) >= cfg.nms_iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (suppressed) reasons[h->id] = SuppressionReason::nms_suppressed;
        else kept.push_back(h);
    }
    return kept;
}

}  // namespace

HandoffResult handoff_learned(const HypothesisPool& pool, const HandoffConfig& cfg) {
    std::vector<std::pair<const Hypothesis*, double>> survivors;
    std::map<int, SuppressionReason> reasons;
    for (const Hypothesis& h : pool.hypotheses) {
        if (final_score(h) >= cfg.retention_threshold) survivors.emplace_back(&h, h.order_score);
        else reasons[h.id] = SuppressionReason::below_threshold;
    }
    return assemble(pool, survivors, std::move(reasons), {});
}

HandoffResult handoff_nms(const HypothesisPool& pool, const HandoffConfig& cfg) {
    std::map<int, SuppressionReason> reasons;
    std::vector<std::pair<const Hypothesis*, double>> survivors;
    for (const Hypothesis* h : nms_survivors(pool, cfg, reasons))
        survivors.emplace_back(h, h->order_score);
    return assemble(pool, survivors, std::move(reasons), {});
}

HandoffResult handoff_soft_nms(const HypothesisPool& pool, const HandoffConfig& cfg) {
    struct Entry {
        const Hypothesis* h;
        double score;
    };
    std::vector<Entry> remaining;
    for (const Hypothesis& h : pool.hypotheses) remaining.push_back({&h, final_score(h)});

    std::map<int, SuppressionReason> reasons;
    std::map<int, double> decayed_scores;
    std::vector<std::pair<const Hypothesis*, double>> survivors;
    while (!remaining.empty()) {
        auto best = std::min_element(remaining.begin(), remaining.end(), [](const Entry& a, const Entry& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.h->id < b.h->id;
        });
        const Entry picked = *best;
        remaining.erase(best);
        decayed_scores[picked.h->id] = picked.score;
        if (picked.score < cfg.soft_nms_score_floor) {
            reasons[picked.h->id] = SuppressionReason::soft_nms_decayed;
            continue;
        }
        survivors.emplace_back(picked.h, picked.h->order_score);
        for (Entry& e : remaining) {
            if (!cfg.class_agnostic_nms && argmax_class(*e.h) != argmax_class(*picked.h)) continue;
            const double ov = iou(e.h->box, picked.h->box);
            e.score *= std::exp(-(ov * ov) / cfg.soft_nms_sigma);
        }
    }
    return assemble(pool, survivors, std::move(reasons), std::move(decayed_scores));
}

HandoffResult handoff_decoupled(const HypothesisPool& pool, const HandoffConfig& cfg,
                                const std::map<int, double>& external_order) {
    for (const Hypothesis& h : pool.hypotheses)
        if (!external_order.count(h.id))
            throw ValidationError("missing external order score for hypothesis " +
                                  std::to_string(h.id));
    std::map<int, SuppressionReason> reasons;
    std::vector<std::pair<const Hypothesis*, double>> survivors;
    for (const Hypothesis* h : nms_survivors(pool, cfg, reasons))
        survivors.emplace_back(h, external_order.at(h->id));
    return assemble(pool, survivors, std::move(reasons), {});
}

HandoffResult handoff_raw(const HypothesisPool& pool, const HandoffConfig& cfg) {
    (void)cfg;
    std::vector<std::pair<const Hypothesis*, double>> survivors;
    for (const Hypothesis& h : pool.hypotheses) survivors.emplace_back(&h, -final_score(h));
    return assemble(pool, survivors, {}, {});
}

HandoffResult run_strategy(const HypothesisPool& pool, const HandoffConfig& cfg,
                           const std::map<int, double>* external_order) {
    switch (cfg.strategy) {
        case Strategy::learned_nms_free: return handoff_learned(pool, cfg);
        case Strategy::nms: return handoff_nms(pool, cfg);
        case Strategy::soft_nms: return handoff_soft_nms(pool, cfg);
        case Strategy::decoupled_order_after_nms:
            if (!external_order)
                throw ValidationError("decoupled strategy requires external order scores");
            return handoff_decoupled(pool, cfg, *external_order);
        case Strategy::raw: return handoff_raw(pool, cfg);
    }
    throw ValidationError("unknown strategy");
}

}  // namespace handoff
