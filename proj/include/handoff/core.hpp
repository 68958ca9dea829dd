#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace handoff {

// Exit-code contract: 0 success, 1 validation, 2 I/O.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Axis-aligned box in normalized page coordinates, x1 <= x2, y1 <= y2.
struct Box {
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    bool degenerate() const { return area() <= 0.0; }

    bool operator==(const Box&) const = default;
};

struct Hypothesis {
    int id = 0;
    Box box;
    std::vector<double> class_probs;  // independent per-class probabilities
    double retention_prob = 0.0;
    double order_score = 0.0;  // smaller = earlier

    bool operator==(const Hypothesis&) const = default;
};

struct HypothesisPool {
    std::string page_id;
    int page_width = 0;
    int page_height = 0;
    int num_classes = 0;
    std::vector<Hypothesis> hypotheses;

    bool operator==(const HypothesisPool&) const = default;
};

struct GroundTruthElement {
    int id = 0;
    Box box;
    int class_id = 0;
    int order_rank = 0;

    bool operator==(const GroundTruthElement&) const = default;
};

struct GroundTruthPage {
    std::string page_id;
    int num_classes = 0;
    std::vector<GroundTruthElement> elements;

    bool operator==(const GroundTruthPage&) const = default;
};

struct Instance {
    int hypothesis_id = 0;
    Box box;
    int class_id = 0;
    double score = 0.0;  // s_i = retention_prob * max class prob

    bool operator==(const Instance&) const = default;
};

/// The ordered, retained set handed to a downstream parser.
/// List position is the parser input order.
struct ParserInterface {
    std::string page_id;
    std::vector<Instance> instances;

    bool operator==(const ParserInterface&) const = default;
};

enum class Strategy {
    learned_nms_free,
    nms,
    soft_nms,
    decoupled_order_after_nms,
    raw,  // pass-through baseline: keep everything, rank by descending score
};

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

struct HandoffConfig {
    Strategy strategy = Strategy::learned_nms_free;
    double retention_threshold = 0.5;
    double nms_iou_threshold = 0.45;
    bool class_agnostic_nms = false;
    double soft_nms_sigma = 0.5;
    double soft_nms_score_floor = 0.1;
    double gamma = 1.0;
    double lambda_cls = 1.0;
    double lambda_l1 = 5.0;
    double lambda_giou = 2.0;
    double lambda_ret = 1.0;
    double lambda_ord = 1.0;

    void validate() const;
};

/// Throws ValidationError unless `iface` instance ids are a unique subset of
/// `pool_ids`.
void check_interface(const ParserInterface& iface, const std::vector<int>& pool_ids);

}  // namespace handoff
