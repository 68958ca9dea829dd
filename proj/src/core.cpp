#include "handoff/core.hpp"

#include <cmath>
#include <set>

namespace handoff {

Strategy strategy_from_name(const std::string& name) {
    if (name == "learned" || name == "learned_nms_free") return Strategy::learned_nms_free;
    if (name == "nms") return Strategy::nms;
    if (name == "soft_nms") return Strategy::soft_nms;
    if (name == "decoupled" || name == "decoupled_order_after_nms")
        return Strategy::decoupled_order_after_nms;
    if (name == "raw") return Strategy::raw;
    throw ValidationError("unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::learned_nms_free: return "learned";
        case Strategy::nms: return "nms";
        case Strategy::soft_nms: return "soft_nms";
        case Strategy::decoupled_order_after_nms: return "decoupled";
        case Strategy::raw: return "raw";
    }
    return "?";
}

void HandoffConfig::validate() const {
    auto in01 = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in01(retention_threshold)) throw ValidationError("retention_threshold must be in [0,1]");
    if (!in01(nms_iou_threshold)) throw ValidationError("nms_iou_threshold must be in [0,1]");
    if (!(std::isfinite(soft_nms_sigma) && soft_nms_sigma > 0.0))
        throw ValidationError("soft_nms_sigma must be positive");
    if (!in01(soft_nms_score_floor)) throw ValidationError("soft_nms_score_floor must be in [0,1]");
    for (double v : {gamma, lambda_cls, lambda_l1, lambda_giou, lambda_ret, lambda_ord})
        if (!(std::isfinite(v) && v >= 0.0))
            throw ValidationError("weights and gamma must be non-negative");
}

void check_interface(const ParserInterface& iface, const std::vector<int>& pool_ids) {
    std::set<int> pool(pool_ids.begin(), pool_ids.end());
    std::set<int> seen;
    for (const Instance& inst : iface.instances) {
        if (!pool.count(inst.hypothesis_id))
            throw ValidationError("interface references unknown hypothesis id " +
                                  std::to_string(inst.hypothesis_id));
        if (!seen.insert(inst.hypothesis_id).second)
            throw ValidationError("interface repeats hypothesis id " +
                                  std::to_string(inst.hypothesis_id));
    }
}

}  // namespace handoff
