#include "handoff/render.hpp"

#include <cstdio>

namespace handoff {

namespace {

const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                          "#a65628", "#f781bf", "#999999"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string render_svg(const std::optional<ParserInterface>& iface,
                       const std::optional<GroundTruthPage>& gt, int width, int height) {
    const double w = width, h = height;
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (gt) {
        for (const GroundTruthElement& e : gt->elements) {
            out += "<rect x=\"" + num(e.box.x1 * w) + "\" y=\"" + num(e.box.y1 * h) +
                   "\" width=\"" + num(e.box.width() * w) + "\" height=\"" + num(e.box.height() * h) +
                   "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";
            out += "<text x=\"" + num(e.box.x1 * w + 3) + "\" y=\"" + num(e.box.y1 * h + 12) +
                   "\" font-size=\"10\" fill=\"#333333\">r" + std::to_string(e.order_rank) +
                   "</text>\n";
        }
    }

    if (iface) {
        for (const Instance& inst : iface->instances) {
            const char* color = kPalette[inst.class_id % 8];
            out += "<rect x=\"" + num(inst.box.x1 * w) + "\" y=\"" + num(inst.box.y1 * h) +
                   "\" width=\"" + num(inst.box.width() * w) + "\" height=\"" +
                   num(inst.box.height() * h) + "\" fill=\"" + color +
                   "\" fill-opacity=\"0.25\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
            out += "<text x=\"" + num(inst.box.x1 * w + 3) + "\" y=\"" + num(inst.box.y2 * h - 4) +
                   "\" font-size=\"10\" fill=\"" + color + "\">s=" + num(inst.score) + "</text>\n";
        }
        for (size_t i = 0; i + 1 < iface->instances.size(); ++i) {
            const Box& a = iface->instances[i].box;
            const Box& b = iface->instances[i + 1].box;
            out += "<line x1=\"" + num((a.x1 + a.x2) / 2 * w) + "\" y1=\"" +
                   num((a.y1 + a.y2) / 2 * h) + "\" x2=\"" + num((b.x1 + b.x2) / 2 * w) +
                   "\" y2=\"" + num((b.y1 + b.y2) / 2 * h) +
                   "\" stroke=\"#222222\" stroke-width=\"1\" marker-end=\"url(#arrow)\"/>\n";
        }
        out += "<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" "
               "refY=\"3\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#222222\"/>"
               "</marker></defs>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace handoff
