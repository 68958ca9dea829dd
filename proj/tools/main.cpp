#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "handoff/compare.hpp"
#include "handoff/core.hpp"
#include "handoff/json_io.hpp"
#include "handoff/metrics.hpp"
#include "handoff/objectives.hpp"
#include "handoff/render.hpp"
#include "handoff/strategies.hpp"
#include "handoff/synth.hpp"

namespace fs = std::filesystem;
using namespace handoff;

namespace {

struct GlobalOpts {
    std::string config_path;
    int jobs = 0;
    bool quiet = false;
};

HandoffConfig load_config(const GlobalOpts& g) {
    std::string path = g.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("HANDOFF_CONFIG")) path = env;
    }
    if (path.empty()) return HandoffConfig{};
    return parse_config(read_file(path));
}

void info(const GlobalOpts& g, const std::string& msg) {
    if (!g.quiet) std::cout << msg << "\n";
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string page_metrics_json(const PageMetrics& m) {
    return "{\"page_id\":\"" + m.page_id + "\",\"precision\":" + fmt4(100.0 * m.precision) +
           ",\"recall\":" + fmt4(100.0 * m.recall) + ",\"f1\":" + fmt4(100.0 * m.f1) +
           ",\"reading_order_edit\":" + fmt4(m.reading_order_edit) + "}";
}

std::string eval_report_json(const std::vector<PageMetrics>& pages, const Summary& s) {
    std::string out = "{\"pages\":[";
    for (size_t i = 0; i < pages.size(); ++i) {
        if (i) out += ',';
        out += page_metrics_json(pages[i]);
    }
    out += "],\"summary\":{\"pages\":" + std::to_string(s.pages);
    out += ",\"precision\":" + fmt4(100.0 * s.precision);
    out += ",\"recall\":" + fmt4(100.0 * s.recall);
    out += ",\"f1\":" + fmt4(100.0 * s.f1);
    out += ",\"reading_order_edit\":" + fmt4(s.reading_order_edit);
    out += ",\"per_class\":{";
    bool first = true;
    for (const auto& [cls, c] : s.per_class) {
        if (!first) out += ',';
        first = false;
        out += "\"" + std::to_string(cls) + "\":{\"precision\":" + fmt4(100.0 * c.precision) +
               ",\"recall\":" + fmt4(100.0 * c.recall) + ",\"f1\":" + fmt4(100.0 * c.f1) + "}";
    }
    out += "}}}";
    return out;
}

std::string decisions_json(const std::vector<RetentionDecision>& decisions) {
    auto reason_name = [](SuppressionReason r) {
        switch (r) {
            case SuppressionReason::kept: return "kept";
            case SuppressionReason::below_threshold: return "below_threshold";
            case SuppressionReason::nms_suppressed: return "nms_suppressed";
            case SuppressionReason::soft_nms_decayed: return "soft_nms_decayed";
        }
        return "?";
    };
    std::string out = "[";
    for (size_t i = 0; i < decisions.size(); ++i) {
        const RetentionDecision& d = decisions[i];
        if (i) out += ',';
        out += "{\"hypothesis_id\":" + std::to_string(d.hypothesis_id) +
               ",\"final_score\":" + fmt4(d.final_score) +
               ",\"retained\":" + (d.retained ? "true" : "false") + ",\"reason\":\"" +
               reason_name(d.reason) + "\"}";
    }
    out += "]";
    return out;
}

int run_synth(const GlobalOpts& g, const std::string& scenario, int pages, std::uint64_t seed,
              int elements, const std::string& out_dir) {
    ScenarioSpec spec = ScenarioSpec::preset(scenario_from_name(scenario), seed);
    if (elements > 0) spec.elements_per_page = elements;
    fs::create_directories(out_dir);
    for (int i = 0; i < pages; ++i) {
        const SynthPage page = generate(spec, i);
        const std::string stem = (fs::path(out_dir) / page.gt.page_id).string();
        write_file(stem + ".pool.json", serialize_pool(page.pool));
        write_file(stem + ".gt.json", serialize_ground_truth(page.gt));
        write_file(stem + ".oracle.json",
                   serialize_interface(oracle_interface(page.gt, page.pool, page.oracle)));
    }
    info(g, "wrote " + std::to_string(pages) + " pages to " + out_dir);
    return 0;
}

int run_handoff(const GlobalOpts& g, const std::string& pool_path, const std::string& gt_path,
                const std::string& strategy, const std::string& out_path,
                const std::string& decisions_path, const std::string& external_order_path) {
    HandoffConfig cfg = load_config(g);
    if (!strategy.empty()) cfg.strategy = strategy_from_name(strategy);
    const HypothesisPool pool = parse_pool(read_file(pool_path)).pool;
    if (!gt_path.empty()) {
        const GroundTruthPage gt = parse_ground_truth(read_file(gt_path));
        if (gt.num_classes != pool.num_classes)
            throw ValidationError("pool and ground truth disagree on num_classes");
    }

    std::map<int, double> ext;
    const std::map<int, double>* ext_ptr = nullptr;
    if (cfg.strategy == Strategy::decoupled_order_after_nms) {
        if (!external_order_path.empty()) {
            const auto j = nlohmann::json::parse(read_file(external_order_path));
            for (auto& [key, value] : j.items()) ext[std::stoi(key)] = value.get<double>();
        } else {
            ext = row_major_external_order(pool);
        }
        ext_ptr = &ext;
    }
    const HandoffResult r = run_strategy(pool, cfg, ext_ptr);

    std::vector<int> pool_ids;
    for (const Hypothesis& h : pool.hypotheses) pool_ids.push_back(h.id);
    check_interface(r.iface, pool_ids);

    write_file(out_path, serialize_interface(r.iface));
    if (!decisions_path.empty()) write_file(decisions_path, decisions_json(r.decisions));
    info(g, "retained " + std::to_string(r.iface.instances.size()) + " of " +
                std::to_string(pool.hypotheses.size()) + " hypotheses");
    return 0;
}

int run_eval(const GlobalOpts& g, const std::string& pred, const std::string& gt_arg, double iou,
             const std::string& out_path) {
    std::vector<PageMetrics> pages;
    if (fs::is_directory(pred)) {
        if (!fs::is_directory(gt_arg)) throw IoError("--gt must be a directory when --pred is");
        std::vector<std::pair<std::string, std::string>> stems;  // (stem, pred path)
        for (const auto& entry : fs::directory_iterator(pred)) {
            const std::string name = entry.path().filename().string();
            const std::string suffix = ".iface.json";
            if (name.size() > suffix.size() && name.ends_with(suffix))
                stems.emplace_back(name.substr(0, name.size() - suffix.size()),
                                   entry.path().string());
        }
        std::sort(stems.begin(), stems.end());
        if (stems.empty()) throw IoError("no *.iface.json files in " + pred);
        for (const auto& [stem, pred_path] : stems) {
            const std::string gt_path = (fs::path(gt_arg) / (stem + ".gt.json")).string();
            if (!fs::exists(gt_path)) throw IoError("missing ground truth for " + stem);
            const ParserInterface iface = parse_interface(read_file(pred_path));
            const GroundTruthPage gt = parse_ground_truth(read_file(gt_path));
            PageMetrics m = evaluate_page(iface, gt, iou);
            m.page_id = stem;
            pages.push_back(std::move(m));
        }
    } else {
        const ParserInterface iface = parse_interface(read_file(pred));
        const GroundTruthPage gt = parse_ground_truth(read_file(gt_arg));
        pages.push_back(evaluate_page(iface, gt, iou));
    }
    const Summary s = aggregate(pages);
    const std::string report = eval_report_json(pages, s);
    if (!out_path.empty()) write_file(out_path, report);
    else std::cout << report << "\n";
    info(g, "F1 " + fmt4(100.0 * s.f1) + "  order_edit " + fmt4(s.reading_order_edit));
    return 0;
}

int run_loss(const GlobalOpts& g, const std::string& pool_path, const std::string& gt_path,
             bool check_gradients, const std::string& out_path) {
    const HandoffConfig cfg = load_config(g);
    const HypothesisPool pool = parse_pool(read_file(pool_path)).pool;
    const GroundTruthPage gt = parse_ground_truth(read_file(gt_path));
    const LossReport r = total_loss(pool, gt, cfg);

    std::string out = loss_report_json(r);
    if (check_gradients) {
        const double err = max_gradient_rel_error(pool, gt, cfg);
        out.pop_back();  // strip trailing '}'
        char buf[64];
        std::snprintf(buf, sizeof(buf), ",\"max_gradient_rel_error\":%.6e}", err);
        out += buf;
        char msg[64];
        std::snprintf(msg, sizeof(msg), "max gradient rel error %.6e", err);
        info(g, msg);
        if (err > 1e-4) {
            std::cerr << "gradient check failed: " << err << "\n";
            if (!out_path.empty()) write_file(out_path, out);
            return 1;
        }
    }
    if (!out_path.empty()) write_file(out_path, out);
    else std::cout << out << "\n";
    return 0;
}

int run_compare(const GlobalOpts& g, const std::string& dir, const std::string& strategies_csv,
                double iou, const std::string& out_path) {
    const HandoffConfig cfg = load_config(g);
    std::vector<Strategy> strategies;
    std::string csv = strategies_csv;
    size_t pos;
    while ((pos = csv.find(',')) != std::string::npos) {
        strategies.push_back(strategy_from_name(csv.substr(0, pos)));
        csv.erase(0, pos + 1);
    }
    if (!csv.empty()) strategies.push_back(strategy_from_name(csv));
    if (strategies.empty()) throw ValidationError("no strategies requested");

    const std::vector<CorpusPage> pages = load_corpus(dir);
    const CompareReport report = compare_corpus(pages, strategies, cfg, iou, g.jobs);
    if (!out_path.empty()) write_file(out_path, compare_report_json(report));
    if (!g.quiet) std::cout << compare_report_table(report);
    return 0;
}

int run_render(const GlobalOpts& g, const std::string& pool_path, const std::string& iface_path,
               const std::string& gt_path, const std::string& out_path) {
    std::optional<ParserInterface> iface;
    if (!iface_path.empty()) {
        iface = parse_interface(read_file(iface_path));
    } else if (!pool_path.empty()) {
        // Render the raw pool as-is: every hypothesis in pool order.
        const HypothesisPool pool = parse_pool(read_file(pool_path)).pool;
        ParserInterface all;
        all.page_id = pool.page_id;
        for (const Hypothesis& h : pool.hypotheses)
            all.instances.push_back({h.id, h.box, argmax_class(h), final_score(h)});
        iface = std::move(all);
    }
    std::optional<GroundTruthPage> gt;
    if (!gt_path.empty()) gt = parse_ground_truth(read_file(gt_path));
    if (!iface && !gt) throw ValidationError("render needs --pool, --iface, or --gt");
    write_file(out_path, render_svg(iface, gt));
    info(g, "wrote " + out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detector-to-parser handoff toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "Config file (JSON); HANDOFF_CONFIG as fallback");
    app.add_option("--jobs", g.jobs, "Worker threads for per-page parallelism (0 = default)");
    app.add_flag("--quiet", g.quiet, "Suppress informational output");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    std::string scenario = "clean", out_dir;
    int pages = 10, elements = 0;
    std::uint64_t seed = 0;
    synth->add_option("--scenario", scenario,
                      "clean|duplicates|incomplete_survivor|dense_grid|random_mixed");
    synth->add_option("--pages", pages, "Number of pages");
    synth->add_option("--seed", seed, "Base seed");
    synth->add_option("--elements", elements, "Elements per page (0 = scenario default)");
    synth->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* handoff_cmd = app.add_subcommand("handoff", "Build a parser interface from a pool");
    std::string pool_path, gt_path, strategy, out_path, decisions_path, external_order_path;
    handoff_cmd->add_option("--pool", pool_path, "Pool JSON")->required();
    handoff_cmd->add_option("--gt", gt_path, "Ground-truth JSON (validated if given)");
    handoff_cmd->add_option("--strategy", strategy, "learned|nms|soft_nms|decoupled|raw");
    handoff_cmd->add_option("--out", out_path, "Output interface JSON")->required();
    handoff_cmd->add_option("--decisions", decisions_path, "Per-hypothesis decision dump");
    handoff_cmd->add_option("--external-order", external_order_path,
                            "External order scores (JSON map id -> score) for decoupled");

    auto* eval = app.add_subcommand("eval", "Evaluate interfaces against ground truth");
    std::string pred, eval_gt, eval_out;
    double iou_thr = 0.5;
    eval->add_option("--pred", pred, "Interface file or directory of *.iface.json")->required();
    eval->add_option("--gt", eval_gt, "Ground-truth file or directory")->required();
    eval->add_option("--iou", iou_thr, "Matching IoU threshold");
    eval->add_option("--out", eval_out, "Report JSON path (stdout if omitted)");

    auto* loss = app.add_subcommand("loss", "Compute the training objective on a pool/gt pair");
    std::string loss_pool, loss_gt, loss_out;
    bool check_gradients = false;
    loss->add_option("--pool", loss_pool, "Pool JSON")->required();
    loss->add_option("--gt", loss_gt, "Ground-truth JSON")->required();
    loss->add_flag("--check-gradients", check_gradients, "Verify against finite differences");
    loss->add_option("--out", loss_out, "Report JSON path (stdout if omitted)");

    auto* compare = app.add_subcommand("compare", "Run strategies over a corpus and compare");
    std::string cmp_dir, cmp_strategies = "learned,nms,soft_nms,decoupled,raw", cmp_out;
    double cmp_iou = 0.5;
    compare->add_option("--dir", cmp_dir, "Corpus directory")->required();
    compare->add_option("--strategies", cmp_strategies, "Comma-separated strategy names");
    compare->add_option("--iou", cmp_iou, "Matching IoU threshold");
    compare->add_option("--out", cmp_out, "Report JSON path");

    auto* render = app.add_subcommand("render", "Render a debug SVG overlay");
    std::string r_pool, r_iface, r_gt, r_out;
    render->add_option("--pool", r_pool, "Pool JSON (renders all hypotheses)");
    render->add_option("--iface", r_iface, "Interface JSON");
    render->add_option("--gt", r_gt, "Ground-truth JSON");
    render->add_option("--out", r_out, "Output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return run_synth(g, scenario, pages, seed, elements, out_dir);
        if (handoff_cmd->parsed())
            return run_handoff(g, pool_path, gt_path, strategy, out_path, decisions_path,
                               external_order_path);
        if (eval->parsed()) return run_eval(g, pred, eval_gt, iou_thr, eval_out);
        if (loss->parsed()) return run_loss(g, loss_pool, loss_gt, check_gradients, loss_out);
        if (compare->parsed()) return run_compare(g, cmp_dir, cmp_strategies, cmp_iou, cmp_out);
        if (render->parsed()) return run_render(g, r_pool, r_iface, r_gt, r_out);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
