#include "handoff/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "handoff/geometry.hpp"

namespace handoff {

Scenario scenario_from_name(const std::string& name) {
    if (name == "clean") return Scenario::clean;
    if (name == "duplicates") return Scenario::duplicates;
    if (name == "incomplete_survivor") return Scenario::incomplete_survivor;
    if (name == "dense_grid") return Scenario::dense_grid;
    if (name == "random_mixed") return Scenario::random_mixed;
    throw ValidationError("unknown scenario '" + name + "'");
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::clean: return "clean";
        case Scenario::duplicates: return "duplicates";
        case Scenario::incomplete_survivor: return "incomplete_survivor";
        case Scenario::dense_grid: return "dense_grid";
        case Scenario::random_mixed: return "random_mixed";
    }
    return "?";
}

ScenarioSpec ScenarioSpec::preset(Scenario s, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.scenario = s;
    spec.seed = seed;
    switch (s) {
        case Scenario::clean:
            break;
        case Scenario::duplicates:
            spec.duplicate_rate = 0.6;
            spec.shift_sigma = 0.005;
            break;
        case Scenario::incomplete_survivor:
            spec.split_rate = 0.5;
            break;
        case Scenario::dense_grid:
            spec.elements_per_page = 12;
            break;
        case Scenario::random_mixed:
            spec.duplicate_rate = 0.3;
            spec.split_rate = 0.2;
            spec.false_positive_rate = 0.4;
            spec.shift_sigma = 0.005;
            break;
    }
    return spec;
}

// splitmix64: fully specified, so identical output on every platform.
std::uint64_t SynthRng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SynthRng::uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

double SynthRng::normal(double mean, double sigma) {
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * M_PI * u2);
}

int SynthRng::uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

namespace {

constexpr double kMargin = 0.05;
constexpr double kColGap = 0.03;
constexpr double kRowGap = 0.01;

double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

/// Jitter a box by per-corner truncated Gaussian noise; displacement of
/// each corner capped at `cap` times the box dimension so every jittered
/// candidate keeps IoU > 0.5 against its source.
Box jitter_box(const Box& b, SynthRng& rng, double sigma, double cap = 0.1) {
    if (sigma <= 0.0) return b;
    const double cx = cap * std::max(b.width(), 1e-3);
    const double cy = cap * std::max(b.height(), 1e-3);
    auto d = [&](double c) { return std::clamp(rng.normal(0.0, sigma), -c, c); };
    Box out{clamp01(b.x1 + d(cx)), clamp01(b.y1 + d(cy)), clamp01(b.x2 + d(cx)),
            clamp01(b.y2 + d(cy))};
    if (out.x1 > out.x2) std::swap(out.x1, out.x2);
    if (out.y1 > out.y2) std::swap(out.y1, out.y2);
    return out;
}

std::vector<double> class_vector(int num_classes, int true_class, double true_prob,
                                 SynthRng& rng, double noise_hi = 0.15) {
    std::vector<double> probs(num_classes);
    for (int c = 0; c < num_classes; ++c) probs[c] = rng.uniform(0.0, noise_hi);
    probs[true_class] = true_prob;
    return probs;
}

double order_noise(SynthRng& rng) {
    // Bounded below half a rank step so true candidates never swap order.
    return std::clamp(rng.normal(0.0, 0.05), -0.3, 0.3);
}

}  // namespace

GroundTruthPage generate_page(const ScenarioSpec& spec, SynthRng& rng,
                              const std::string& page_id) {
    GroundTruthPage gt;
    gt.page_id = page_id;
    gt.num_classes = spec.num_classes;

    const int total = spec.elements_per_page;
    if (total <= 0) throw ValidationError("elements_per_page must be positive");

    int cols;
    if (spec.scenario == Scenario::dense_grid) cols = 3;
    else cols = std::min(total, 1 + rng.uniform_int(0, 2));

    const double col_w = (1.0 - 2.0 * kMargin - (cols - 1) * kColGap) / cols;
    int rank = 0;
    for (int c = 0; c < cols; ++c) {
        const int in_col = total / cols + (c < total % cols ? 1 : 0);
        if (in_col == 0) continue;
        const double slot_h = (1.0 - 2.0 * kMargin - (in_col - 1) * kRowGap) / in_col;
        if (slot_h < 0.02) throw ValidationError("layout overflow: elements_per_page too large");
        const double x0 = kMargin + c * (col_w + kColGap);
        for (int r = 0; r < in_col; ++r) {
            const double y0 = kMargin + r * (slot_h + kRowGap);
            const double wf = total == 1 ? 1.0 : rng.uniform(0.75, 0.95);
            const double hf = total == 1 ? 0.9 : rng.uniform(0.6, 0.9);
            GroundTruthElement e;
            e.id = rank;
            e.box = {x0, y0, x0 + col_w * wf, y0 + slot_h * hf};
            e.class_id = rng.uniform_int(0, spec.num_classes - 1);
            e.order_rank = rank;
            gt.elements.push_back(e);
            ++rank;
        }
    }
    return gt;
}

void corrupt_to_pool(const GroundTruthPage& gt, const ScenarioSpec& spec, SynthRng& rng,
                     HypothesisPool& pool, std::map<int, int>& oracle) {
    pool.page_id = gt.page_id;
    pool.page_width = 1000;
    pool.page_height = 1400;
    pool.num_classes = gt.num_classes;
    pool.hypotheses.clear();
    oracle.clear();

    int next_id = 0;
    auto add = [&](const Box& box, int cls, double cls_prob, double ret, double order,
                   std::optional<int> gt_id) {
        Hypothesis h;
        h.id = next_id++;
        h.box = box;
        h.class_probs = class_vector(gt.num_classes, cls, cls_prob, rng);
        h.retention_prob = ret;
        h.order_score = order;
        if (gt_id) oracle[h.id] = *gt_id;
        pool.hypotheses.push_back(std::move(h));
    };

    for (const GroundTruthElement& e : gt.elements) {
        const double rank = static_cast<double>(e.order_rank);
        const bool split = rng.uniform() < spec.split_rate;
        const Box primary = jitter_box(e.box, rng, spec.shift_sigma);

        if (split) {
            // Well-localized candidate in a modest score band...
            add(primary, e.class_id, rng.uniform(0.80, 0.90), rng.uniform(0.75, 0.85),
                rank + order_noise(rng), e.id);
            // ...paired with a truncated fragment that outscores it. The
            // truncation fraction sits above the NMS threshold (so the
            // fragment suppresses the complete candidate) but below the
            // 0.5 evaluation IoU (so the survivor no longer matches).
            const double frac = rng.uniform(0.46, 0.49);
            Box trunc = primary;
            trunc.y2 = trunc.y1 + frac * primary.height();
            add(trunc, e.class_id, rng.uniform(0.92, 0.99), rng.uniform(0.92, 0.99),
                rank + order_noise(rng), e.id);
        } else {
            add(primary, e.class_id, rng.uniform(spec.true_cls_lo, spec.true_cls_hi),
                rng.uniform(spec.true_ret_lo, spec.true_ret_hi), rank + order_noise(rng), e.id);
        }

        if (rng.uniform() < spec.duplicate_rate) {
            // Competitive but sub-threshold duplicate; near-identical box.
            const Box dup = jitter_box(e.box, rng, 0.002, 0.02);
            add(dup, e.class_id, rng.uniform(0.70, 0.85), rng.uniform(0.40, 0.55),
                rank + order_noise(rng), e.id);
        }

        if (rng.uniform() < spec.false_positive_rate) {
            // Spurious candidate away from every gt element.
            for (int attempt = 0; attempt < 40; ++attempt) {
                const double w = rng.uniform(0.03, 0.08);
                const double h = rng.uniform(0.03, 0.08);
                const double x = rng.uniform(0.0, 1.0 - w);
                const double y = rng.uniform(0.0, 1.0 - h);
                const Box fp{x, y, x + w, y + h};
                double worst = 0.0;
                for (const GroundTruthElement& g : gt.elements)
                    worst = std::max(worst, iou(fp, g.box));
                if (worst < 0.05) {
                    add(fp, rng.uniform_int(0, gt.num_classes - 1),
                        rng.uniform(spec.spurious_cls_lo, spec.spurious_cls_hi),
                        rng.uniform(spec.spurious_ret_lo, spec.spurious_ret_hi),
                        rng.uniform(0.0, static_cast<double>(gt.elements.size())), std::nullopt);
                    break;
                }
            }
        }
    }
}

ParserInterface oracle_interface(const GroundTruthPage& gt, const HypothesisPool& pool,
                                 const std::map<int, int>& oracle) {
    ParserInterface iface;
    iface.page_id = gt.page_id;

    std::vector<const GroundTruthElement*> by_rank;
    for (const GroundTruthElement& e : gt.elements) by_rank.push_back(&e);
    std::sort(by_rank.begin(), by_rank.end(),
              [](const auto* a, const auto* b) { return a->order_rank < b->order_rank; });

    for (const GroundTruthElement* e : by_rank) {
        const Hypothesis* best = nullptr;
        double best_iou = -1.0;
        for (const Hypothesis& h : pool.hypotheses) {
            auto it = oracle.find(h.id);
            if (it == oracle.end() || it->second != e->id) continue;
            const double ov = iou(h.box, e->box);
            if (ov > best_iou || (ov == best_iou && best && h.id < best->id)) {
                best = &h;
                best_iou = ov;
            }
        }
        if (!best) continue;
        double max_prob = 0.0;
        int cls = 0;
        for (size_t c = 0; c < best->class_probs.size(); ++c)
            if (best->class_probs[c] > max_prob) {
                max_prob = best->class_probs[c];
                cls = static_cast<int>(c);
            }
        iface.instances.push_back({best->id, best->box, cls, best->retention_prob * max_prob});
    }
    return iface;
}

SynthPage generate(const ScenarioSpec& spec, int page_index) {
    const std::uint64_t page_seed =
        spec.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(page_index + 1));
    SynthRng rng(page_seed);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04d", scenario_name(spec.scenario).c_str(), page_index);

    SynthPage page;
    page.gt = generate_page(spec, rng, buf);
    corrupt_to_pool(page.gt, spec, rng, page.pool, page.oracle);
    return page;
}

std::vector<SynthPage> generate_corpus(const ScenarioSpec& spec, int pages) {
    std::vector<SynthPage> out;
    out.reserve(pages);
    for (int i = 0; i < pages; ++i) out.push_back(generate(spec, i));
    return out;
}

}  // namespace handoff
