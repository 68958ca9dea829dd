#include "handoff/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "handoff/geometry.hpp"

namespace handoff {

namespace {

double clamp_prob(double p) {
    return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

/// d BCE(clamp(p), t) / dp; zero outside the clamp interval.
double bce_grad(double p, double target) {
    if (p <= kProbEps || p >= 1.0 - kProbEps) return 0.0;
    return (p - target) / (p * (1.0 - p));
}

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

HypGrad& grad_for(PoolGrad& g, const Hypothesis& h) {
    HypGrad& hg = g[h.id];
    if (hg.class_probs.size() != h.class_probs.size()) hg.class_probs.resize(h.class_probs.size(), 0.0);
    return hg;
}

const GroundTruthElement& gt_by_id(const GroundTruthPage& gt, int id) {
    for (const GroundTruthElement& e : gt.elements)
        if (e.id == id) return e;
    throw ValidationError("unknown ground-truth id " + std::to_string(id));
}

const Hypothesis& hyp_by_id(const HypothesisPool& pool, int id) {
    for (const Hypothesis& h : pool.hypotheses)
        if (h.id == id) return h;
    throw ValidationError("unknown hypothesis id " + std::to_string(id));
}

}  // namespace

double bce(double p, double target) {
    const double q = clamp_prob(p);
    return -(target * std::log(q) + (1.0 - target) * std::log(1.0 - q));
}

TermValue classification_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                              const Assignment& a) {
    TermValue out;
    const size_t n = pool.hypotheses.size();
    if (n == 0) return out;

    std::map<int, int> matched_class;  // hypothesis id -> gt class
    for (const auto& [hid, gid] : a.pairs) matched_class[hid] = gt_by_id(gt, gid).class_id;

    for (const Hypothesis& h : pool.hypotheses) {
        auto it = matched_class.find(h.id);
        HypGrad& hg = grad_for(out.grad, h);
        for (size_t c = 0; c < h.class_probs.size(); ++c) {
            const double t = (it != matched_class.end() && static_cast<int>(c) == it->second) ? 1.0 : 0.0;
            out.value += bce(h.class_probs[c], t);
            hg.class_probs[c] = bce_grad(h.class_probs[c], t) / static_cast<double>(n);
        }
    }
    out.value /= static_cast<double>(n);
    return out;
}

TermValue box_l1_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                      const Assignment& a) {
    TermValue out;
    if (a.pairs.empty()) return out;
    const double inv = 1.0 / static_cast<double>(a.pairs.size());
    for (const auto& [hid, gid] : a.pairs) {
        const Hypothesis& h = hyp_by_id(pool, hid);
        const Box& g = gt_by_id(gt, gid).box;
        const double d[4] = {h.box.x1 - g.x1, h.box.y1 - g.y1, h.box.x2 - g.x2, h.box.y2 - g.y2};
        HypGrad& hg = grad_for(out.grad, h);
        for (int k = 0; k < 4; ++k) {
            out.value += std::abs(d[k]) * inv;
            hg.box[k] += (d[k] > 0.0 ? 1.0 : (d[k] < 0.0 ? -1.0 : 0.0)) * inv;
        }
    }
    return out;
}

TermValue box_giou_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                        const Assignment& a) {
    TermValue out;
    if (a.pairs.empty()) return out;
    const double inv = 1.0 / static_cast<double>(a.pairs.size());
    for (const auto& [hid, gid] : a.pairs) {
        const Hypothesis& h = hyp_by_id(pool, hid);
        const Box& g = gt_by_id(gt, gid).box;
        out.value += (1.0 - giou(h.box, g)) * inv;
        const std::array<double, 4> dg = giou_grad_a(h.box, g);
        HypGrad& hg = grad_for(out.grad, h);
        for (int k = 0; k < 4; ++k) hg.box[k] += -dg[k] * inv;
    }
    return out;
}

TermValue retention_loss(const std::vector<double>& retention_probs,
                         const std::vector<int>& targets) {
    if (retention_probs.size() != targets.size())
        throw ValidationError("retention probs/targets size mismatch");
    TermValue out;
    const size_t n = retention_probs.size();
    if (n == 0) return out;
    for (size_t i = 0; i < n; ++i) {
        out.value += bce(retention_probs[i], targets[i]);
        HypGrad& hg = out.grad[static_cast<int>(i)];  // positional key; remapped by caller
        hg.retention_prob = bce_grad(retention_probs[i], targets[i]) / static_cast<double>(n);
    }
    out.value /= static_cast<double>(n);
    return out;
}

double precedence_prob(double o_i, double o_j) {
    return sigmoid(o_j - o_i);
}

double difficulty_weight(const GroundTruthElement& i, const GroundTruthElement& j,
                         const GroundTruthPage& gt, double gamma) {
    return 1.0 + gamma * std::log1p(static_cast<double>(n_mid(i, j, gt.elements)));
}

std::map<std::pair<int, int>, double> pair_weights(const Assignment& a,
                                                   const GroundTruthPage& gt, double gamma) {
    std::map<std::pair<int, int>, double> w;
    for (const auto& [hi, gi] : a.pairs)
        for (const auto& [hj, gj] : a.pairs)
            if (hi != hj)
                w[{hi, hj}] = difficulty_weight(gt_by_id(gt, gi), gt_by_id(gt, gj), gt, gamma);
    return w;
}

TermValue ordering_loss(const std::map<int, double>& order_scores,
                        const std::map<std::pair<int, int>, int>& precedence_targets,
                        const std::map<std::pair<int, int>, double>& weights) {
    TermValue out;
    if (precedence_targets.empty()) return out;
    const double inv = 1.0 / static_cast<double>(precedence_targets.size());
    for (const auto& [pair, y] : precedence_targets) {
        const auto [i, j] = pair;
        auto oi = order_scores.find(i);
        auto oj = order_scores.find(j);
        if (oi == order_scores.end() || oj == order_scores.end())
            throw ValidationError("ordering loss references unmatched hypothesis");
        auto wit = weights.find(pair);
        const double w = wit == weights.end() ? 1.0 : wit->second;
        const double d = oj->second - oi->second;
        // BCE(sigma(d), y) = y*softplus(-d) + (1-y)*softplus(d)
        out.value += w * (y * softplus(-d) + (1 - y) * softplus(d)) * inv;
        const double dd = w * (sigmoid(d) - y) * inv;
        out.grad[j].order_score += dd;
        out.grad[i].order_score -= dd;
    }
    return out;
}

namespace {

void accumulate(PoolGrad& total, const PoolGrad& term, double scale,
                const HypothesisPool* pool_for_positional = nullptr) {
    for (const auto& [key, hg] : term) {
        const int id = pool_for_positional ? pool_for_positional->hypotheses.at(key).id : key;
        HypGrad& dst = total[id];
        if (dst.class_probs.size() < hg.class_probs.size())
            dst.class_probs.resize(hg.class_probs.size(), 0.0);
        for (int k = 0; k < 4; ++k) dst.box[k] += scale * hg.box[k];
        for (size_t c = 0; c < hg.class_probs.size(); ++c)
            dst.class_probs[c] += scale * hg.class_probs[c];
        dst.retention_prob += scale * hg.retention_prob;
        dst.order_score += scale * hg.order_score;
    }
}

}  // namespace

LossReport detection_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                          const Assignment& a, const HandoffConfig& cfg) {
    LossReport r;
    const TermValue cls = classification_loss(pool, gt, a);
    const TermValue l1 = box_l1_loss(pool, gt, a);
    const TermValue gi = box_giou_loss(pool, gt, a);
    r.l_cls = cls.value;
    r.l_l1 = l1.value;
    r.l_giou = gi.value;
    r.l_det = cfg.lambda_cls * r.l_cls + cfg.lambda_l1 * r.l_l1 + cfg.lambda_giou * r.l_giou;
    accumulate(r.grad, cls.grad, cfg.lambda_cls);
    accumulate(r.grad, l1.grad, cfg.lambda_l1);
    accumulate(r.grad, gi.grad, cfg.lambda_giou);
    return r;
}

LossReport total_loss_with_assignment(const HypothesisPool& pool, const GroundTruthPage& gt,
                                      const Assignment& a, const HandoffConfig& cfg) {
    const Targets targets = derive_targets(a, gt, pool);

    LossReport r = detection_loss(pool, gt, a, cfg);

    std::vector<double> probs;
    probs.reserve(pool.hypotheses.size());
    for (const Hypothesis& h : pool.hypotheses) probs.push_back(h.retention_prob);
    const TermValue ret = retention_loss(probs, targets.retention);
    r.l_ret = ret.value;
    accumulate(r.grad, ret.grad, cfg.lambda_ret, &pool);

    std::map<int, double> scores;
    for (const auto& [hid, gid] : a.pairs) scores[hid] = hyp_by_id(pool, hid).order_score;
    const auto weights = pair_weights(a, gt, cfg.gamma);
    const TermValue ord = ordering_loss(scores, targets.precedence, weights);
    r.l_ord = ord.value;
    accumulate(r.grad, ord.grad, cfg.lambda_ord);

    r.l_total = r.l_det + cfg.lambda_ret * r.l_ret + cfg.lambda_ord * r.l_ord;
    return r;
}

LossReport total_loss(const HypothesisPool& pool, const GroundTruthPage& gt,
                      const HandoffConfig& cfg) {
    if (pool.num_classes != gt.num_classes)
        throw ValidationError("pool and ground truth disagree on num_classes");
    const Assignment a = match_pool(pool, gt, cfg);
    return total_loss_with_assignment(pool, gt, a, cfg);
}

double max_gradient_rel_error(const HypothesisPool& pool, const GroundTruthPage& gt,
                              const HandoffConfig& cfg, double h) {
    const Assignment a = match_pool(pool, gt, cfg);
    const LossReport base = total_loss_with_assignment(pool, gt, a, cfg);

    auto value_at = [&](const HypothesisPool& p) {
        return total_loss_with_assignment(p, gt, a, cfg).l_total;
    };
    auto rel = [](double analytic, double fd) {
        const double scale = std::max({1e-8, std::abs(analytic), std::abs(fd)});
        return std::abs(analytic - fd) / scale;
    };
    auto prob_ok = [](double p) { return p > 1e-3 && p < 1.0 - 1e-3; };

    std::map<int, const Box*> gt_box;  // matched gt box per hypothesis, for kink filter
    for (const auto& [hid, gid] : a.pairs)
        for (const GroundTruthElement& e : gt.elements)
            if (e.id == gid) gt_box[hid] = &e.box;

    double worst = 0.0;
    HypothesisPool work = pool;
    for (size_t i = 0; i < work.hypotheses.size(); ++i) {
        Hypothesis& hyp = work.hypotheses[i];
        auto grad_it = base.grad.find(hyp.id);
        const HypGrad* hg = grad_it == base.grad.end() ? nullptr : &grad_it->second;

        double* coords[4] = {&hyp.box.x1, &hyp.box.y1, &hyp.box.x2, &hyp.box.y2};
        const Box* g = gt_box.count(hyp.id) ? gt_box.at(hyp.id) : nullptr;
        for (int k = 0; k < 4; ++k) {
            if (g) {
                const double gc[4] = {g->x1, g->y1, g->x2, g->y2};
                if (std::abs(*coords[k] - gc[k]) < 1e-4) continue;  // L1 kink
            }
            const double saved = *coords[k];
            *coords[k] = saved + h;
            const double fp = value_at(work);
            *coords[k] = saved - h;
            const double fm = value_at(work);
            *coords[k] = saved;
            worst = std::max(worst, rel(hg ? hg->box[k] : 0.0, (fp - fm) / (2.0 * h)));
        }
        for (size_t c = 0; c < hyp.class_probs.size(); ++c) {
            if (!prob_ok(hyp.class_probs[c])) continue;
            const double saved = hyp.class_probs[c];
            hyp.class_probs[c] = saved + h;
            const double fp = value_at(work);
            hyp.class_probs[c] = saved - h;
            const double fm = value_at(work);
            hyp.class_probs[c] = saved;
            const double analytic = hg && c < hg->class_probs.size() ? hg->class_probs[c] : 0.0;
            worst = std::max(worst, rel(analytic, (fp - fm) / (2.0 * h)));
        }
        if (prob_ok(hyp.retention_prob)) {
            const double saved = hyp.retention_prob;
            hyp.retention_prob = saved + h;
            const double fp = value_at(work);
            hyp.retention_prob = saved - h;
            const double fm = value_at(work);
            hyp.retention_prob = saved;
            worst = std::max(worst, rel(hg ? hg->retention_prob : 0.0, (fp - fm) / (2.0 * h)));
        }
        {
            const double saved = hyp.order_score;
            hyp.order_score = saved + h;
            const double fp = value_at(work);
            hyp.order_score = saved - h;
            const double fm = value_at(work);
            hyp.order_score = saved;
            worst = std::max(worst, rel(hg ? hg->order_score : 0.0, (fp - fm) / (2.0 * h)));
        }
    }
    return worst;
}

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string loss_report_json(const LossReport& report, bool include_grads) {
    std::string out = "{\"l_cls\":" + fmt12(report.l_cls);
    out += ",\"l_l1\":" + fmt12(report.l_l1);
    out += ",\"l_giou\":" + fmt12(report.l_giou);
    out += ",\"l_det\":" + fmt12(report.l_det);
    out += ",\"l_ret\":" + fmt12(report.l_ret);
    out += ",\"l_ord\":" + fmt12(report.l_ord);
    out += ",\"l_total\":" + fmt12(report.l_total);
    if (include_grads) {
        out += ",\"gradients\":{";
        bool first = true;
        auto emit = [&](int id, const std::string& field, double v) {
            if (!first) out += ',';
            first = false;
            out += "\"(" + std::to_string(id) + ", " + field + ")\":" + fmt12(v);
        };
        for (const auto& [id, hg] : report.grad) {
            const char* names[4] = {"x1", "y1", "x2", "y2"};
            for (int k = 0; k < 4; ++k) emit(id, names[k], hg.box[k]);
            for (size_t c = 0; c < hg.class_probs.size(); ++c)
                emit(id, "class_probs[" + std::to_string(c) + "]", hg.class_probs[c]);
            emit(id, "retention_prob", hg.retention_prob);
            emit(id, "order_score", hg.order_score);
        }
        out += "}";
    }
    out += "}";
    return out;
}

}  // namespace handoff
