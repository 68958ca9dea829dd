#include "handoff/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace handoff {

using nlohmann::json;

namespace {

double require_finite(double v, const std::string& where) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value in " + where);
    return v;
}

const json& field(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError("missing field '" + std::string(key) + "' in " + where);
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError("expected number in " + where);
    return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw SchemaError("expected integer in " + where);
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw SchemaError("expected string in " + where);
    return j.get<std::string>();
}

Box parse_box(const json& j, const std::string& where, std::vector<IngestWarning>* warnings,
              int hyp_id) {
    if (!j.is_array() || j.size() != 4) throw SchemaError("box must be [x1,y1,x2,y2] in " + where);
    double c[4];
    for (int k = 0; k < 4; ++k) {
        c[k] = require_finite(as_number(j[k], where), where);
        c[k] = std::clamp(c[k], 0.0, 1.0);
    }
    Box b{c[0], c[1], c[2], c[3]};
    if (b.x1 > b.x2) {
        std::swap(b.x1, b.x2);
        if (warnings) warnings->push_back({hyp_id, where + ": swapped x corners"});
    }
    if (b.y1 > b.y2) {
        std::swap(b.y1, b.y2);
        if (warnings) warnings->push_back({hyp_id, where + ": swapped y corners"});
    }
    return b;
}

// Shortest round-trip rendering, stable across platforms.
std::string fmt_shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void append_box(std::string& out, const Box& b, bool fixed) {
    auto f = fixed ? fmt_fixed6 : fmt_shortest;
    out += '[';
    out += f(b.x1);
    out += ',';
    out += f(b.y1);
    out += ',';
    out += f(b.x2);
    out += ',';
    out += f(b.y2);
    out += ']';
}

std::string quote(const std::string& s) {
    return json(s).dump();
}

}  // namespace

PoolParseResult parse_pool(const std::string& raw) {
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("pool JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("pool root must be an object");

    PoolParseResult out;
    HypothesisPool& pool = out.pool;
    pool.page_id = as_string(field(j, "page_id", "pool"), "pool.page_id");
    pool.page_width = as_int(field(j, "page_width", "pool"), "pool.page_width");
    pool.page_height = as_int(field(j, "page_height", "pool"), "pool.page_height");
    pool.num_classes = as_int(field(j, "num_classes", "pool"), "pool.num_classes");
    if (pool.page_width <= 0 || pool.page_height <= 0)
        throw ValidationError("page dimensions must be positive");
    if (pool.num_classes <= 0) throw ValidationError("num_classes must be positive");

    const json& hyps = field(j, "hypotheses", "pool");
    if (!hyps.is_array()) throw SchemaError("hypotheses must be an array");

    std::set<int> ids;
    for (const json& h : hyps) {
        Hypothesis hyp;
        const std::string where = "hypothesis";
        hyp.id = as_int(field(h, "id", where), where + ".id");
        if (!ids.insert(hyp.id).second)
            throw ValidationError("duplicate hypothesis id " + std::to_string(hyp.id));
        hyp.box = parse_box(field(h, "box", where), where + ".box", &out.warnings, hyp.id);
        const json& probs = field(h, "class_probs", where);
        if (!probs.is_array()) throw SchemaError("class_probs must be an array");
        if (static_cast<int>(probs.size()) != pool.num_classes)
            throw ValidationError("class_probs length " + std::to_string(probs.size()) +
                                  " != num_classes " + std::to_string(pool.num_classes));
        for (const json& p : probs) {
            double v = require_finite(as_number(p, where + ".class_probs"), where + ".class_probs");
            if (v < 0.0 || v > 1.0) throw ValidationError("class prob out of [0,1]");
            hyp.class_probs.push_back(v);
        }
        hyp.retention_prob =
            require_finite(as_number(field(h, "retention_prob", where), where), where);
        if (hyp.retention_prob < 0.0 || hyp.retention_prob > 1.0)
            throw ValidationError("retention_prob out of [0,1]");
        hyp.order_score = require_finite(as_number(field(h, "order_score", where), where), where);
        pool.hypotheses.push_back(std::move(hyp));
    }
    return out;
}

GroundTruthPage parse_ground_truth(const std::string& raw) {
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("gt JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("gt root must be an object");

    GroundTruthPage gt;
    gt.page_id = as_string(field(j, "page_id", "gt"), "gt.page_id");
    gt.num_classes = as_int(field(j, "num_classes", "gt"), "gt.num_classes");
    if (gt.num_classes <= 0) throw ValidationError("num_classes must be positive");

    const json& elems = field(j, "elements", "gt");
    if (!elems.is_array()) throw SchemaError("elements must be an array");

    std::set<int> ids;
    std::set<int> ranks;
    for (const json& e : elems) {
        GroundTruthElement el;
        el.id = as_int(field(e, "id", "element"), "element.id");
        if (!ids.insert(el.id).second)
            throw ValidationError("duplicate element id " + std::to_string(el.id));
        el.box = parse_box(field(e, "box", "element"), "element.box", nullptr, el.id);
        el.class_id = as_int(field(e, "class_id", "element"), "element.class_id");
        if (el.class_id < 0 || el.class_id >= gt.num_classes)
            throw ValidationError("class_id out of range");
        el.order_rank = as_int(field(e, "order_rank", "element"), "element.order_rank");
        if (el.order_rank < 0) throw ValidationError("order_rank must be non-negative");
        if (!ranks.insert(el.order_rank).second) throw ValidationError("duplicate order_rank");
        gt.elements.push_back(el);
    }
    // Ranks must form a contiguous 0..M-1 permutation.
    const int m = static_cast<int>(gt.elements.size());
    if (!ranks.empty() && (*ranks.begin() != 0 || *ranks.rbegin() != m - 1))
        throw ValidationError("order_rank values must form 0..M-1");
    return gt;
}

ParserInterface parse_interface(const std::string& raw) {
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("interface JSON parse error: ") + e.what());
    }
    ParserInterface iface;
    iface.page_id = as_string(field(j, "page_id", "interface"), "interface.page_id");
    const json& insts = field(j, "instances", "interface");
    if (!insts.is_array()) throw SchemaError("instances must be an array");
    std::set<int> ids;
    for (const json& e : insts) {
        Instance inst;
        inst.hypothesis_id = as_int(field(e, "hypothesis_id", "instance"), "instance");
        if (!ids.insert(inst.hypothesis_id).second)
            throw ValidationError("duplicate hypothesis_id in interface");
        inst.box = parse_box(field(e, "box", "instance"), "instance.box", nullptr, inst.hypothesis_id);
        inst.class_id = as_int(field(e, "class_id", "instance"), "instance");
        inst.score = require_finite(as_number(field(e, "score", "instance"), "instance"), "instance");
        iface.instances.push_back(inst);
    }
    return iface;
}

std::string serialize_pool(const HypothesisPool& pool) {
    std::string out;
    out += "{\"page_id\":" + quote(pool.page_id);
    out += ",\"page_width\":" + std::to_string(pool.page_width);
    out += ",\"page_height\":" + std::to_string(pool.page_height);
    out += ",\"num_classes\":" + std::to_string(pool.num_classes);
    out += ",\"hypotheses\":[";
    for (size_t i = 0; i < pool.hypotheses.size(); ++i) {
        const Hypothesis& h = pool.hypotheses[i];
        if (i) out += ',';
        out += "{\"id\":" + std::to_string(h.id) + ",\"box\":";
        append_box(out, h.box, false);
        out += ",\"class_probs\":[";
        for (size_t k = 0; k < h.class_probs.size(); ++k) {
            if (k) out += ',';
            out += fmt_shortest(h.class_probs[k]);
        }
        out += "],\"retention_prob\":" + fmt_shortest(h.retention_prob);
        out += ",\"order_score\":" + fmt_shortest(h.order_score);
        out += '}';
    }
    out += "]}";
    return out;
}

std::string serialize_ground_truth(const GroundTruthPage& gt) {
    std::string out;
    out += "{\"page_id\":" + quote(gt.page_id);
    out += ",\"num_classes\":" + std::to_string(gt.num_classes);
    out += ",\"elements\":[";
    for (size_t i = 0; i < gt.elements.size(); ++i) {
        const GroundTruthElement& e = gt.elements[i];
        if (i) out += ',';
        out += "{\"id\":" + std::to_string(e.id) + ",\"box\":";
        append_box(out, e.box, false);
        out += ",\"class_id\":" + std::to_string(e.class_id);
        out += ",\"order_rank\":" + std::to_string(e.order_rank);
        out += '}';
    }
    out += "]}";
    return out;
}

std::string serialize_interface(const ParserInterface& iface) {
    std::string out;
    out += "{\"page_id\":" + quote(iface.page_id);
    out += ",\"instances\":[";
    for (size_t i = 0; i < iface.instances.size(); ++i) {
        const Instance& inst = iface.instances[i];
        if (i) out += ',';
        out += "{\"hypothesis_id\":" + std::to_string(inst.hypothesis_id) + ",\"box\":";
        append_box(out, inst.box, true);
        out += ",\"class_id\":" + std::to_string(inst.class_id);
        out += ",\"score\":" + fmt_fixed6(inst.score);
        out += '}';
    }
    out += "]}";
    return out;
}

HandoffConfig parse_config(const std::string& raw) {
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("config root must be an object");

    HandoffConfig cfg;
    for (auto& [key, value] : j.items()) {
        if (key == "strategy") cfg.strategy = strategy_from_name(as_string(value, "config.strategy"));
        else if (key == "retention_threshold") cfg.retention_threshold = as_number(value, key);
        else if (key == "nms_iou_threshold") cfg.nms_iou_threshold = as_number(value, key);
        else if (key == "class_agnostic_nms") cfg.class_agnostic_nms = value.get<bool>();
        else if (key == "soft_nms_sigma") cfg.soft_nms_sigma = as_number(value, key);
        else if (key == "soft_nms_score_floor") cfg.soft_nms_score_floor = as_number(value, key);
        else if (key == "gamma") cfg.gamma = as_number(value, key);
        else if (key == "lambda_cls") cfg.lambda_cls = as_number(value, key);
        else if (key == "lambda_l1") cfg.lambda_l1 = as_number(value, key);
        else if (key == "lambda_giou") cfg.lambda_giou = as_number(value, key);
        else if (key == "lambda_ret") cfg.lambda_ret = as_number(value, key);
        else if (key == "lambda_ord") cfg.lambda_ord = as_number(value, key);
        else throw SchemaError("unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace handoff
