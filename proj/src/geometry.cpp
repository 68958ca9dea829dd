#include "handoff/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace handoff {

GeomReport box_geometry(const Box& a, const Box& b) {
    GeomReport r;
    const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double area_a = a.degenerate() ? 0.0 : a.area();
    const double area_b = b.degenerate() ? 0.0 : b.area();
    r.intersection_area = (area_a > 0.0 && area_b > 0.0) ? iw * ih : 0.0;
    r.union_area = area_a + area_b - r.intersection_area;
    const double ew = std::max(a.x2, b.x2) - std::min(a.x1, b.x1);
    const double eh = std::max(a.y2, b.y2) - std::min(a.y1, b.y1);
    r.enclosure_area = ew * eh;

    r.iou = r.union_area > kDenomGuard ? r.intersection_area / r.union_area : 0.0;
    if (r.enclosure_area > kDenomGuard) {
        r.giou = r.iou - (r.enclosure_area - r.union_area) / r.enclosure_area;
    } else {
        r.giou = 0.0;
    }
    return r;
}

double iou(const Box& a, const Box& b) {
    return box_geometry(a, b).iou;
}

double giou(const Box& a, const Box& b) {
    return box_geometry(a, b).giou;
}

std::pair<double, double> center(const Box& b) {
    return {(b.x1 + b.x2) / 2.0, (b.y1 + b.y2) / 2.0};
}

int n_mid(const GroundTruthElement& i, const GroundTruthElement& j,
          const std::vector<GroundTruthElement>& others) {
    const auto [cxi, cyi] = center(i.box);
    const auto [cxj, cyj] = center(j.box);
    const double x_lo = std::min(cxi, cxj), x_hi = std::max(cxi, cxj);
    const double y_lo = std::min(cyi, cyj), y_hi = std::max(cyi, cyj);
    int count = 0;
    for (const GroundTruthElement& e : others) {
        if (e.id == i.id || e.id == j.id) continue;
        const auto [cx, cy] = center(e.box);
        if (cx >= x_lo && cx <= x_hi && cy >= y_lo && cy <= y_hi) ++count;
    }
    return count;
}

std::array<double, 4> giou_grad_a(const Box& a, const Box& b) {
    const GeomReport r = box_geometry(a, b);
    if (r.union_area <= kDenomGuard || r.enclosure_area <= kDenomGuard) return {0, 0, 0, 0};

    const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double ew = std::max(a.x2, b.x2) - std::min(a.x1, b.x1);
    const double eh = std::max(a.y2, b.y2) - std::min(a.y1, b.y1);
    const bool overlap = iw > 0.0 && ih > 0.0;

    // dI/dtheta: nonzero only when a's coordinate is the active min/max.
    std::array<double, 4> dI{};
    if (overlap) {
        if (a.x1 >= b.x1) dI[0] = -ih;
        if (a.y1 >= b.y1) dI[1] = -iw;
        if (a.x2 <= b.x2) dI[2] = ih;
        if (a.y2 <= b.y2) dI[3] = iw;
    }
    const double aw = a.width(), ah = a.height();
    const std::array<double, 4> dA{-ah, -aw, ah, aw};
    std::array<double, 4> dU{};
    for (int k = 0; k < 4; ++k) dU[k] = dA[k] - dI[k];

    std::array<double, 4> dE{};
    if (a.x1 <= b.x1) dE[0] = -eh;
    if (a.y1 <= b.y1) dE[1] = -ew;
    if (a.x2 >= b.x2) dE[2] = eh;
    if (a.y2 >= b.y2) dE[3] = ew;

    const double I = r.intersection_area, U = r.union_area, E = r.enclosure_area;
    std::array<double, 4> g{};
    for (int k = 0; k < 4; ++k) {
        const double d_iou = (dI[k] * U - I * dU[k]) / (U * U);
        const double d_pen = ((dE[k] - dU[k]) * E - (E - U) * dE[k]) / (E * E);
        g[k] = d_iou - d_pen;
    }
    return g;
}

}  // namespace handoff
